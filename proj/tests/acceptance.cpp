// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sphgrf/harness.hpp"
#include "sphgrf/heat.hpp"
#include "sphgrf/sampler.hpp"
#include "sphgrf/specfun.hpp"
#include "sphgrf/spectrum.hpp"
#include "test_util.hpp"

using namespace sphgrf;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

long double binom(long double r, int k) {
    long double c = 1.0L;
    for (int i = 1; i <= k; ++i) c *= (r - k + i) / i;
    return c;
}

// ---------------------------------------------------------------------------

Outcome basis() {
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> um(-1.0, 1.0);
    double worst_p = 0.0, worst_a = 0.0, worst_j = 0.0;
    std::vector<testutil::Poly> rod(11);
    for (int l = 0; l <= 10; ++l) rod[l] = testutil::legendre_rodrigues(l);
    const double ab[][2] = {{0, 0}, {1, 1}, {2, 2}, {0.5, -0.5}};
    for (int trial = 0; trial < 1000; ++trial) {
        const double mu = um(gen);
        const double theta = std::acos(mu);
        for (int l = 0; l <= 10; ++l) {
            worst_p = std::max(worst_p, std::abs(legendre_p(l, mu) -
                                                 static_cast<double>(testutil::eval(rod[l], mu))));
            testutil::Poly d = rod[l];
            for (int m = 0; m <= l; ++m) {
                const long double norm =
                    std::sqrt((2.0L * l + 1.0L) / (4.0L * std::numbers::pi_v<long double>) *
                              testutil::factorial(l - m) / testutil::factorial(l + m));
                const long double oracle = norm * ((m % 2) ? -1.0L : 1.0L) *
                                           std::pow(std::sqrt(1.0L - (long double)mu * mu), m) *
                                           testutil::eval(d, mu);
                worst_a = std::max(worst_a, std::abs(assoc_legendre_normalized(l, m, theta) -
                                                     static_cast<double>(oracle)));
                d = testutil::derivative(d);
            }
            for (const auto& p : ab) {
                long double s = 0.0L;
                for (int k = 0; k <= l; ++k) {
                    s += binom(l + p[0], l - k) * binom(l + p[1], k) * std::pow((mu - 1.0L) / 2.0L, k) *
                         std::pow((mu + 1.0L) / 2.0L, l - k);
                }
                worst_j = std::max(worst_j, std::abs(jacobi_p(l, p[0], p[1], mu) - static_cast<double>(s)) /
                                                static_cast<double>(std::max(1.0L, std::abs(s))));
            }
        }
    }
    constexpr int lmax = 200;
    std::vector<double> table(tri_index(lmax, lmax) + 1);
    std::uniform_real_distribution<double> ut(0.0, kPi);
    double worst_add = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        assoc_legendre_normalized_all(lmax, ut(gen), table);
        for (int l = 0; l <= lmax; ++l) {
            double s = table[tri_index(l, 0)] * table[tri_index(l, 0)];
            for (int m = 1; m <= l; ++m) s += 2.0 * table[tri_index(l, m)] * table[tri_index(l, m)];
            worst_add = std::max(worst_add, std::abs(s - (2.0 * l + 1.0) / (4.0 * kPi)));
        }
    }
    const bool ok = worst_p < 1e-12 && worst_a < 1e-12 && worst_j < 1e-12 && worst_add < 1e-8;
    return {ok, fmt("P %.1e, L %.1e, Jacobi %.1e (tol 1e-12); addition l<=200 %.1e (tol 1e-8)", worst_p,
                    worst_a, worst_j, worst_add)};
}

Outcome norm_identity() {
    constexpr int kappa = 64;
    double worst = 0.0, literal_ratio_min = 1e300, literal_ratio_max = 0.0;
    for (double alpha : {3.0, 5.0}) {
        const auto p = AngularPowerSpectrum::power_law(1.0, alpha);
        for (int n = 0; n <= 2; ++n) {
            const double quad =
                weighted_deriv_norm_quadrature(p, n, BandLimit(kappa), gauss_legendre(kappa + n + 1));
            long double corrected = 0.0L, literal = 0.0L;
            for (int l = n; l <= kappa; ++l) {
                const long double a = std::pow(l + 1.0L, -alpha);
                const long double fr = testutil::factorial(l + n) / testutil::factorial(l - n);
                const long double fp2 = 16.0L * std::numbers::pi_v<long double> * std::numbers::pi_v<long double>;
                corrected += 2.0L * a * a * (2.0L * l + 1.0L) / fp2 * fr;
                literal += a * a * (2.0L * l + 1.0L) / (2.0L * fp2) * fr;
            }
            worst = std::max(worst, std::abs(quad - (double)corrected) / (double)corrected);
            const double ratio = quad / static_cast<double>(literal);
            literal_ratio_min = std::min(literal_ratio_min, ratio);
            literal_ratio_max = std::max(literal_ratio_max, ratio);
        }
    }
    return {worst < 1e-10,
            fmt("max rel residual %.2e vs sum 2A^2(2l+1)/(4pi)^2 (l+n)!/(l-n)! (tol 1e-10); "
                "printed constant A^2(2l+1)/(2(4pi)^2) is off by factor %.12f..%.12f",
                worst, literal_ratio_min, literal_ratio_max)};
}

ExperimentConfig base(ExperimentKind kind, double alpha, int samples) {
    ExperimentConfig c;
    c.kind = kind;
    c.alpha = alpha;
    c.kappas = {2, 4, 8, 16, 32, 64};
    c.kappa_ref = 128;
    c.n_samples = samples;
    c.grid_theta = 64;
    c.grid_phi = 128;
    return c;
}

std::vector<ErrorTable> grf_tables;

Outcome grf_rate() {
    bool ok = true;
    std::string detail;
    const double tol[] = {0.1, 0.2};
    int i = 0;
    for (double alpha : {3.0, 5.0}) {
        const ExperimentConfig c = base(ExperimentKind::grf_ms, alpha, 1000);
        const ErrorTable t = run_experiment(c);
        grf_tables.push_back(t);
        const double target = -(alpha - 2.0) / 2.0;
        const bool pass = std::abs(t.fitted_slope_l2 - target) <= tol[i] &&
                          std::abs(t.fitted_slope_sup - target) <= tol[i];
        ok = ok && pass;
        detail += fmt("alpha=%g slopes L2 %.3f, sup %.3f in %.1f+-%.1f [vs kappa: L2 %.3f sup %.3f]; ", alpha,
                      t.fitted_slope_l2, t.fitted_slope_sup, target, tol[i], t.fitted_slope_l2_vs_kappa,
                      t.fitted_slope_sup_vs_kappa);
        ++i;
    }
    return {ok, detail};
}

Outcome exact_tail() {
    if (grf_tables.size() != 2) return {false, "criterion 3 tables unavailable"};
    bool ok = true;
    double worst_z = 0.0;
    int i = 0;
    for (double alpha : {3.0, 5.0}) {
        for (const auto& r : grf_tables[i].rows) {
            double tail = 0.0;
            for (int l = r.kappa + 1; l <= 128; ++l) tail += (2.0 * l + 1.0) * std::pow(l + 1.0, -alpha);
            const double z = std::abs(r.mean_sq_l2 - tail) / r.stderr_mean_sq_l2;
            worst_z = std::max(worst_z, z);
            ok = ok && z < 3.0;
        }
        ++i;
    }
    return {ok, fmt("max |MC - tail| / SE = %.2f over 12 rows (tol 3)", worst_z)};
}

Outcome path_counts(ExperimentKind kind, const std::vector<double>& alphas, double tol) {
    bool ok = true;
    std::string detail;
    for (double alpha : alphas) {
        ExperimentConfig c = base(kind, alpha, 1);
        const double target = c.theoretical_slope();
        int hits = 0;
        std::string slopes;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            c.seed = seed;
            const ErrorTable t = run_experiment(c);
            if (std::abs(t.fitted_slope_l2 - target) <= tol && std::abs(t.fitted_slope_sup - target) <= tol) ++hits;
            slopes += fmt("%.2f/%.2f ", t.fitted_slope_l2, t.fitted_slope_sup);
        }
        ok = ok && hits >= 8;
        detail += fmt("alpha=%g %d/10 within %.2f+-%.2f on L2 and sup (%s); ", alpha, hits, target, tol, slopes.c_str());
    }
    return {ok, detail};
}

Outcome heat_rates() {
    bool ok = true;
    std::string detail;
    const double alphas[] = {1.0, 3.0, 5.0};
    const double tol[] = {0.15, 0.2, 0.3};
    for (int i = 0; i < 3; ++i) {
        ExperimentConfig c = base(ExperimentKind::heat_ms, alphas[i], 100);
        c.t_end = 1.0;
        c.steps = 1;
        const ErrorTable t = run_experiment(c);
        const double target = c.theoretical_slope();
        const bool pass = std::abs(t.fitted_slope_l2 - target) <= tol[i] &&
                          std::abs(t.fitted_slope_sup - target) <= tol[i];
        ok = ok && pass;
        detail += fmt("alpha=%g slopes L2 %.3f, sup %.3f in %.1f+-%.2f; ", alphas[i], t.fitted_slope_l2,
                      t.fitted_slope_sup, target, tol[i]);
    }
    const Outcome path = path_counts(ExperimentKind::heat_path, {1.0, 3.0, 5.0}, 0.35);
    return {ok && path.pass, detail + "path: " + path.detail};
}

Outcome law_invariance() {
    std::mt19937_64 gen(707);
    std::uniform_int_distribution<int> ell(0, 128);
    std::uniform_int_distribution<int> nsteps(1, 32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int l = ell(gen);
        std::vector<double> pts{0.0, 1.0};
        const int steps = nsteps(gen);
        for (int k = 1; k < steps; ++k) pts.push_back(u(gen));
        std::sort(pts.begin(), pts.end());
        const double lam = l * (l + 1.0);
        double composed = 0.0;
        for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
            composed += std::exp(-2.0 * lam * (1.0 - pts[j + 1])) * sigma2(l, pts[j + 1] - pts[j]);
        }
        const double exact = l == 0 ? 1.0 : -std::expm1(-2.0 * lam) / (2.0 * lam);
        worst = std::max(worst, std::abs(composed - exact) / exact);
    }

    const QWienerSpec q(AngularPowerSpectrum::power_law(1.0, 3.0));
    const RngStream rng(708);
    constexpr int kappa = 4, n = 10000;
    double worst_z = 0.0;
    for (int steps : {1, 10}) {
        const TimeGrid grid = TimeGrid::uniform(1.0, steps);
        const ModeState x0(kappa);
        std::vector<testutil::Moments> m1(tri_index(kappa, kappa) + 1), m2(m1.size());
        for (int s = 0; s < n; ++s) {
            const ModeState end = evolve(x0, grid, q, rng, static_cast<std::uint64_t>(s));
            for (std::size_t k = 0; k < m1.size(); ++k) {
                m1[k].add(end.coeffs.c1[k]);
                m2[k].add(end.coeffs.c2[k]);
            }
        }
        for (int l = 0; l <= kappa; ++l) {
            const double lam = l * (l + 1.0);
            const double s2 = l == 0 ? 1.0 : -std::expm1(-2.0 * lam) / (2.0 * lam);
            for (int m = 0; m <= l; ++m) {
                // Real components carry A_l sigma^2 (m = 0) and 2 A_l sigma^2 (m >= 1).
                const double v = (m == 0 ? 1.0 : 2.0) * std::pow(l + 1.0, -3.0) * s2;
                const double sd = v * std::sqrt(2.0 / (n - 1));
                worst_z = std::max(worst_z, std::abs(m1[tri_index(l, m)].variance() - v) / sd);
                if (m > 0) worst_z = std::max(worst_z, std::abs(m2[tri_index(l, m)].variance() - v) / sd);
            }
        }
    }
    return {worst < 1e-12 && worst_z < 4.0,
            fmt("composition max rel err %.1e over 1000 cases (tol 1e-12); per-mode variance max z %.2f for "
                "1 and 10 steps (tol 4)",
                worst, worst_z)};
}

Outcome lognormal_and_regularity() {
    bool ok = true;
    std::string detail;
    constexpr int kappa = 64;
    for (double alpha : {3.0, 5.0}) {
        const auto p = AngularPowerSpectrum::power_law(1.0, alpha);
        double k0 = 0.0;
        for (int l = 0; l <= kappa; ++l) k0 += (2.0 * l + 1.0) / (4.0 * kPi) * std::pow(l + 1.0, -alpha);
        const RngStream rng(809);
        testutil::Moments m;
        for (int s = 0; s < 10000; ++s) {
            const auto c = draw_coefficients(kappa, rng, static_cast<std::uint64_t>(s)).scaled(p);
            m.add(std::exp(evaluate_point(c, 0.7, 2.1)));
        }
        const double z = std::abs(m.mean - std::exp(k0 / 2.0)) / m.stderr_mean();
        ok = ok && z < 3.0;
        const double gamma = regularity_report(p).holder_sup;
        const double want = alpha == 3.0 ? 0.5 : 1.0;
        ok = ok && gamma == want;
        detail += fmt("alpha=%g E exp(T) %.5f vs %.5f (z %.2f, tol 3), gamma_sup %.2f (want %.1f); ", alpha, m.mean,
                      std::exp(k0 / 2.0), z, gamma, want);
    }
    return {ok, detail};
}

Outcome determinism() {
    const auto root = testutil::scratch("acceptance_c9");
    struct Case {
        std::vector<std::string> cmd;
        std::vector<std::string> files;
    };
    const std::vector<Case> cases = {
        {{"converge", "--kind", "grf-ms", "--alpha", "3", "--samples", "100"}, {"converge.csv", "converge.svg"}},
        {{"converge", "--kind", "heat-path", "--alpha", "5", "--samples", "1", "--steps", "4"},
         {"converge.csv", "converge.svg"}},
        {{"sample", "--alpha", "3", "--kappa", "100"}, {"field.csv"}},
        {{"heat", "--alpha", "3", "--kappa", "32", "--steps", "5"}, {"trajectory.csv", "field.csv"}},
    };
    bool ok = true;
    int compared = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto a = root / ("run" + std::to_string(i));
        const auto b = root / ("replay" + std::to_string(i));
        std::vector<std::string> args{"--seed", "2024", "--threads", "1", "--out-dir", a.string()};
        args.insert(args.end(), cases[i].cmd.begin(), cases[i].cmd.end());
        std::ostringstream out, err;
        if (cli::run(args, out, err) != 0) return {false, "run failed: " + err.str()};
        if (cli::run({"--threads", "8", "--out-dir", b.string(), "replay", (a / "run.json").string()}, out, err) !=
            0) {
            return {false, "replay failed: " + err.str()};
        }
        for (const auto& f : cases[i].files) {
            ok = ok && testutil::slurp(a / f) == testutil::slurp(b / f) && !testutil::slurp(a / f).empty();
            ++compared;
        }
    }
    return {ok, fmt("%d output files byte-identical between 1-thread run and 8-thread replay", compared)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"basis correctness", basis},
        {"weighted derivative norm identity", norm_identity},
        {"GRF mean-square rate", grf_rate},
        {"exact-tail oracle", exact_tail},
        {"pathwise GRF rate", [] { return path_counts(ExperimentKind::grf_path, {3.0, 5.0}, 0.3); }},
        {"heat-equation rates", heat_rates},
        {"law invariance under time discretization", law_invariance},
        {"lognormal moment and regularity exponents", lognormal_and_regularity},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %zu %s: %s(%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
