#include "sphgrf/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "sphgrf/errors.hpp"

namespace sphgrf {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// sum_{j >= q} j^{-s} for integer q >= 1 and s > 1: direct summation up to a
// cutoff, Euler-Maclaurin (through the B_6 term) beyond it.
double hurwitz_tail(double s, long long q) {
    const long long a = std::max<long long>(q, 256);
    const double ad = static_cast<double>(a);
    double sum = std::pow(ad, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(ad, -s) +
                 s * std::pow(ad, -s - 1.0) / 12.0 -
                 s * (s + 1.0) * (s + 2.0) * std::pow(ad, -s - 3.0) / 720.0 +
                 s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * std::pow(ad, -s - 5.0) /
                     30240.0;
    for (long long j = a - 1; j >= q; --j) sum += std::pow(static_cast<double>(j), -s);
    return sum;
}

// sum_{l >= first} f(l) for f asymptotically proportional to l^{-p}, p > 1.
// Explicit summation over 2^20 terms, remainder from the power-law integral.
template <typename F>
double power_series_sum(F&& f, int first, double p) {
    constexpr long long kTerms = 1LL << 20;
    const long long last = static_cast<long long>(first) + kTerms;
    const double x = static_cast<double>(last) - 0.5;
    double sum = f(x) * x / (p - 1.0);
    for (long long l = last - 1; l >= first; --l) sum += f(static_cast<double>(l));
    return sum;
}

double double_factorial_odd(int p) {
    // (2p-1)!!
    double r = 1.0;
    for (int k = 2 * p - 1; k > 1; k -= 2) r *= k;
    return r;
}

void check_trace(const AngularPowerSpectrum& s) {
    if (s.is_power_law() && s.alpha() <= 2.0) {
        throw DivergenceError("sum (2l+1) A_l diverges for power law with alpha=" +
                              std::to_string(s.alpha()) + " <= 2");
    }
}

}  // namespace

AngularPowerSpectrum AngularPowerSpectrum::power_law(double c, double alpha) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("power-law constant C must be > 0");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("power-law alpha must be > 0");
    AngularPowerSpectrum s;
    s.model_ = Model::power_law;
    s.c_ = c;
    s.alpha_ = alpha;
    return s;
}

AngularPowerSpectrum AngularPowerSpectrum::tabulated(std::vector<double> values) {
    for (std::size_t l = 0; l < values.size(); ++l) {
        if (!(values[l] >= 0.0) || !std::isfinite(values[l])) {
            throw ConfigError("spectrum value at l=" + std::to_string(l) +
                              " must be finite and nonnegative");
        }
    }
    while (!values.empty() && values.back() == 0.0) values.pop_back();
    AngularPowerSpectrum s;
    s.model_ = Model::tabulated;
    s.values_ = std::move(values);
    return s;
}

AngularPowerSpectrum AngularPowerSpectrum::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open spectrum file " + path.string());
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double ell = 0.0;
        double a = 0.0;
        if (!(fields >> ell >> a)) {
            if (line_no == 1) continue;  // header
            throw ConfigError("malformed spectrum line " + std::to_string(line_no));
        }
        if (ell < 0.0 || ell != std::floor(ell) || ell > 1e7) {
            throw ConfigError("degree must be a nonnegative integer on line " +
                              std::to_string(line_no));
        }
        const auto idx = static_cast<std::size_t>(ell);
        if (values.size() <= idx) values.resize(idx + 1, 0.0);
        values[idx] = a;
    }
    return tabulated(std::move(values));
}

double AngularPowerSpectrum::value(int ell) const {
    if (ell < 0) throw DomainError("negative degree");
    if (model_ == Model::power_law) return c_ * std::pow(ell + 1.0, -alpha_);
    const auto idx = static_cast<std::size_t>(ell);
    return idx < values_.size() ? values_[idx] : 0.0;
}

std::optional<int> AngularPowerSpectrum::max_degree() const {
    if (model_ == Model::power_law) return std::nullopt;
    return static_cast<int>(values_.size()) - 1;
}

std::vector<double> AngularPowerSpectrum::values_up_to(int kappa) const {
    std::vector<double> out(static_cast<std::size_t>(kappa + 1));
    for (int l = 0; l <= kappa; ++l) out[static_cast<std::size_t>(l)] = value(l);
    return out;
}

double geodesic_distance(const Vec3& x, const Vec3& y) {
    const double dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

KernelValue kernel_kI(const AngularPowerSpectrum& spectrum, double mu, BandLimit band) {
    if (!(std::abs(mu) <= 1.0)) throw DomainError("kernel_kI argument outside [-1,1]");
    std::vector<double> p(static_cast<std::size_t>(band.kappa) + 1);
    legendre_p_all(band.kappa, mu, p);
    KernelValue out;
    for (int l = 0; l <= band.kappa; ++l) {
        out.value += spectrum.value(l) * (2.0 * l + 1.0) / kFourPi * p[static_cast<std::size_t>(l)];
    }
    out.tail_bound = tail_sum(spectrum, band.kappa) / kFourPi;
    return out;
}

KernelValue kernel_k(const AngularPowerSpectrum& spectrum, double r, BandLimit band) {
    if (!(r >= 0.0 && r <= std::numbers::pi)) throw DomainError("distance r outside [0, pi]");
    return kernel_kI(spectrum, std::clamp(std::cos(r), -1.0, 1.0), band);
}

KernelValue kernel_kT(const AngularPowerSpectrum& spectrum, const Vec3& x, const Vec3& y,
                      BandLimit band) {
    for (const Vec3* v : {&x, &y}) {
        const double n = std::sqrt((*v)[0] * (*v)[0] + (*v)[1] * (*v)[1] + (*v)[2] * (*v)[2]);
        if (!(std::abs(n - 1.0) <= 1e-12)) throw DomainError("kernel_kT needs unit vectors");
    }
    const double dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    return kernel_kI(spectrum, std::clamp(dot, -1.0, 1.0), band);
}

double tail_sum(const AngularPowerSpectrum& spectrum, int kappa) {
    if (kappa < -1) throw ConfigError("tail_sum needs kappa >= -1");
    if (spectrum.is_power_law()) {
        check_trace(spectrum);
        // sum_{l>kappa} (2l+1)(l+1)^{-a} = sum_{j>=kappa+2} (2 j^{1-a} - j^{-a})
        const long long q = static_cast<long long>(kappa) + 2;
        const double a = spectrum.alpha();
        return spectrum.c() * (2.0 * hurwitz_tail(a - 1.0, q) - hurwitz_tail(a, q));
    }
    double sum = 0.0;
    const auto& t = spectrum.table();
    for (std::size_t l = static_cast<std::size_t>(kappa + 1); l < t.size(); ++l) {
        sum += (2.0 * static_cast<double>(l) + 1.0) * t[l];
    }
    return sum;
}

double trace_q(const AngularPowerSpectrum& spectrum) { return tail_sum(spectrum, -1); }

FlaggedValue sobolev_equiv_norm(const AngularPowerSpectrum& spectrum, double eta) {
    if (!(eta >= 0.0)) throw ConfigError("eta must be >= 0");
    const auto term = [&](double l, double a) {
        const double u = a / (2.0 * std::numbers::pi);
        const double w = l == 0.0 ? (eta > 0.0 ? 0.0 : 1.0) : std::pow(l, 2.0 * eta);
        return u * u * (2.0 * l + 1.0) / 2.0 * (1.0 + w);
    };
    if (spectrum.is_power_law()) {
        const double alpha = spectrum.alpha();
        const double p = eta > 0.0 ? 2.0 * alpha - 1.0 - 2.0 * eta : 2.0 * alpha - 1.0;
        if (p <= 1.0) return {std::numeric_limits<double>::infinity(), true};
        const double c = spectrum.c();
        const double value = power_series_sum(
            [&](double l) { return term(l, c * std::pow(l + 1.0, -alpha)); }, 0, p);
        return {value, false};
    }
    double sum = 0.0;
    const auto& t = spectrum.table();
    for (std::size_t l = 0; l < t.size(); ++l) sum += term(static_cast<double>(l), t[l]);
    return {sum, false};
}

double factorial_ratio(int ell, int n) {
    if (n < 0 || n > ell) throw DomainError("factorial_ratio needs 0 <= n <= l");
    double r = 1.0;
    for (int j = -n + 1; j <= n; ++j) r *= static_cast<double>(ell + j);
    return r;
}

double weighted_deriv_norm_quadrature(const AngularPowerSpectrum& spectrum, int n,
                                      BandLimit band, const QuadratureRule& rule) {
    if (n < 0) throw ConfigError("derivative order must be >= 0");
    const int kappa = band.kappa;
    if (n > kappa) return 0.0;
    if (rule.exact_degree() < 2 * kappa + 2 * n) {
        throw InsufficientQuadratureError(
            "quadrature of degree " + std::to_string(rule.exact_degree()) +
            " cannot integrate degree " + std::to_string(2 * kappa + 2 * n) + " exactly");
    }
    // d^n/dmu^n P_l = (l+n)!/(2^n l!) P_{l-n}^{(n,n)}
    std::vector<double> coef(static_cast<std::size_t>(kappa - n) + 1);
    for (int l = n; l <= kappa; ++l) {
        double rising = 1.0;
        for (int j = 1; j <= n; ++j) rising *= static_cast<double>(l + j);
        coef[static_cast<std::size_t>(l - n)] =
            spectrum.value(l) * (2.0 * l + 1.0) / kFourPi * rising / std::ldexp(1.0, n);
    }
    std::vector<double> jac(coef.size());
    double integral = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double mu = rule.nodes[q];
        jacobi_p_all(kappa - n, n, n, mu, jac);
        double d = 0.0;
        for (std::size_t k = 0; k < coef.size(); ++k) d += coef[k] * jac[k];
        integral += rule.weights[q] * d * d * std::pow(1.0 - mu * mu, n);
    }
    return integral;
}

double weighted_deriv_norm_spectral(const AngularPowerSpectrum& spectrum, int n, BandLimit band) {
    if (n < 0) throw ConfigError("derivative order must be >= 0");
    double sum = 0.0;
    for (int l = n; l <= band.kappa; ++l) {
        const double a = spectrum.value(l);
        sum += a * a * 2.0 * (2.0 * l + 1.0) / (kFourPi * kFourPi) * factorial_ratio(l, n);
    }
    return sum;
}

double holder_constant(const AngularPowerSpectrum& spectrum, double beta) {
    if (!(beta >= 0.0 && beta <= 2.0)) throw ConfigError("beta must lie in [0, 2]");
    if (beta == 0.0) return trace_q(spectrum) / (2.0 * std::numbers::pi);
    const auto term = [&](double l, double a) {
        return a * (2.0 * l + 1.0) * std::pow(l * (l + 1.0), beta / 2.0);
    };
    double sum = 0.0;
    if (spectrum.is_power_law()) {
        const double alpha = spectrum.alpha();
        const double p = alpha - 1.0 - beta;
        if (p <= 1.0) {
            throw DivergenceError("Hoelder constant diverges: need beta < alpha - 2 = " +
                                  std::to_string(alpha - 2.0));
        }
        const double c = spectrum.c();
        sum = power_series_sum([&](double l) { return term(l, c * std::pow(l + 1.0, -alpha)); },
                               0, p);
    } else {
        const auto& t = spectrum.table();
        for (std::size_t l = 0; l < t.size(); ++l) sum += term(static_cast<double>(l), t[l]);
    }
    return sum / (2.0 * std::numbers::pi);
}

double moment_constant(const AngularPowerSpectrum& spectrum, double beta, int p) {
    if (p < 1) throw ConfigError("moment order p must be >= 1");
    return 2.0 * double_factorial_odd(p) * std::pow(holder_constant(spectrum, beta), p);
}

RegularityReport regularity_report(const AngularPowerSpectrum& spectrum) {
    RegularityReport r;
    if (spectrum.band_limited()) {
        r.beta_sup = std::numeric_limits<double>::infinity();
        r.holder_sup = 1.0;
        r.diff_order = -1;
        r.lognormal_holder_sup = 1.0;
        r.continuous = true;
        r.band_limited = true;
        return r;
    }
    // sum (l+1)^{-alpha} l^{1+beta} < inf  <=>  beta < alpha - 2
    r.beta_sup = std::max(spectrum.alpha() - 2.0, 0.0);
    r.continuous = r.beta_sup > 0.0;
    r.holder_sup = std::min(r.beta_sup / 2.0, 1.0);
    r.diff_order = r.continuous ? static_cast<int>(std::ceil(r.beta_sup / 2.0)) - 1 : 0;
    r.lognormal_holder_sup = r.holder_sup;
    return r;
}

std::string to_json(const RegularityReport& report, const AngularPowerSpectrum& spectrum) {
    nlohmann::ordered_json j;
    if (spectrum.is_power_law()) {
        j["model"] = "power_law";
        j["C"] = spectrum.c();
        j["alpha"] = spectrum.alpha();
    } else {
        j["model"] = "tabulated";
        j["max_degree"] = *spectrum.max_degree();
    }
    const auto finite_or_null = [](double v) -> nlohmann::ordered_json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    j["beta_sup"] = finite_or_null(report.beta_sup);
    j["holder_sup"] = report.holder_sup;
    j["diff_order"] = report.diff_order < 0 ? nlohmann::ordered_json(nullptr)
                                            : nlohmann::ordered_json(report.diff_order);
    j["lognormal_holder_sup"] = report.lognormal_holder_sup;
    j["continuous"] = report.continuous;
    j["band_limited"] = report.band_limited;
    return j.dump(2);
}

}  // namespace sphgrf
