#include "sphgrf/heat.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>

#include "sphgrf/errors.hpp"
#include "sphgrf/field_io.hpp"

namespace sphgrf {

QWienerSpec::QWienerSpec(AngularPowerSpectrum s) : spectrum(std::move(s)) {
    try {
        trace = trace_q(spectrum);
    } catch (const DivergenceError&) {
        trace = std::numeric_limits<double>::infinity();
    }
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw ConfigError("time grid needs at least two points");
    for (std::size_t j = 0; j + 1 < points_.size(); ++j) {
        if (!(points_[j + 1] > points_[j])) throw ConfigError("time grid must be strictly increasing");
    }
}

TimeGrid TimeGrid::uniform(double t_end, int steps, double t0) {
    if (steps < 1) throw ConfigError("time grid needs at least one step");
    if (!(t_end > t0)) throw ConfigError("time horizon must exceed the start time");
    std::vector<double> pts(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) pts[static_cast<std::size_t>(j)] = t0 + (t_end - t0) * j / steps;
    pts.back() = t_end;
    return TimeGrid(std::move(pts));
}

double sigma2(int ell, double h) {
    if (ell < 0) throw DomainError("negative degree");
    if (!(h > 0.0)) throw DomainError("step size must be positive");
    if (ell == 0) return h;
    const double x = 2.0 * ell * (ell + 1.0);
    return -std::expm1(-x * h) / x;
}

ModeState project_initial(const HarmonicCoefficients& x0, int kappa) {
    ModeState s;
    s.coeffs = x0.truncated(kappa);
    s.t = 0.0;
    return s;
}

ModeState project_initial(const FieldSample& x0, int kappa) {
    const SphereGrid& g = x0.grid;
    if (g.kind() != GridKind::gauss_latitudes || g.n_theta() < kappa + 1 ||
        g.n_phi() < 2 * kappa + 1) {
        throw InsufficientQuadratureError(
            "projection at band " + std::to_string(kappa) +
            " needs a Gauss-latitude grid with N_theta >= kappa+1 and N_phi >= 2 kappa+1");
    }
    ModeState s(kappa);
    const int nt = g.n_theta();
    const int np = g.n_phi();
    const double dphi = 2.0 * std::numbers::pi / np;
    std::vector<double> leg(BandLimit(kappa).triangle_size());
    std::vector<double> fc(static_cast<std::size_t>(kappa) + 1);
    std::vector<double> fs(static_cast<std::size_t>(kappa) + 1);
    for (int i = 0; i < nt; ++i) {
        const double w = g.theta_weights()[static_cast<std::size_t>(i)];
        assoc_legendre_normalized_all(kappa, g.thetas()[static_cast<std::size_t>(i)], leg);
        for (int m = 0; m <= kappa; ++m) {
            double sc = 0.0;
            double ss = 0.0;
            for (int j = 0; j < np; ++j) {
                const double ph = g.phis()[static_cast<std::size_t>(j)];
                sc += x0.at(i, j) * std::cos(m * ph);
                ss += x0.at(i, j) * std::sin(m * ph);
            }
            fc[static_cast<std::size_t>(m)] = sc * dphi;
            fs[static_cast<std::size_t>(m)] = ss * dphi;
        }
        for (int l = 0; l <= kappa; ++l) {
            s.coeffs.cos_coeff(l, 0) += w * leg[tri_index(l, 0)] * fc[0];
            for (int m = 1; m <= l; ++m) {
                const double lw = 2.0 * w * leg[tri_index(l, m)];
                s.coeffs.cos_coeff(l, m) += lw * fc[static_cast<std::size_t>(m)];
                s.coeffs.sin_coeff(l, m) += lw * fs[static_cast<std::size_t>(m)];
            }
        }
    }
    return s;
}

ModeState step(const ModeState& state, double h, const QWienerSpec& qspec, const RngStream& rng,
               std::uint64_t sample_index, std::uint32_t step_index) {
    if (!(h > 0.0)) throw DomainError("step size must be positive");
    ModeState next = state;
    next.t = state.t + h;
    for (int l = 0; l <= state.kappa(); ++l) {
        const double decay = std::exp(-static_cast<double>(l) * (l + 1.0) * h);
        const double a = qspec.spectrum.value(l);
        const double sd = std::sqrt(sigma2(l, h));
        const double gain0 = std::sqrt(a) * sd;
        const double gain = std::sqrt(2.0 * a) * sd;
        for (int m = 0; m <= l; ++m) {
            const std::size_t t = tri_index(l, m);
            double z1 = 0.0;
            double z2 = 0.0;
            if (a > 0.0) std::tie(z1, z2) = rng.normal_pair({sample_index, l, m, step_index});
            if (m == 0) {
                next.coeffs.c1[t] = decay * state.coeffs.c1[t] + gain0 * z1;
            } else {
                next.coeffs.c1[t] = decay * state.coeffs.c1[t] + gain * z1;
                next.coeffs.c2[t] = decay * state.coeffs.c2[t] + gain * z2;
            }
        }
    }
    return next;
}

ModeState evolve(const ModeState& state, const TimeGrid& grid, const QWienerSpec& qspec,
                 const RngStream& rng, std::uint64_t sample_index) {
    if (state.t != grid.points().front()) {
        throw ConfigError("initial state time does not match the time grid start");
    }
    ModeState s = state;
    for (std::size_t j = 0; j < grid.steps(); ++j) {
        s = step(s, grid.step(j), qspec, rng, sample_index, static_cast<std::uint32_t>(j));
        s.t = grid.points()[j + 1];
    }
    return s;
}

ModeState evolve_with_dump(const ModeState& state, const TimeGrid& grid, const QWienerSpec& qspec,
                           const RngStream& rng, std::uint64_t sample_index, std::ostream& dump) {
    if (state.t != grid.points().front()) {
        throw ConfigError("initial state time does not match the time grid start");
    }
    ModeState s = state;
    write_mode_rows(dump, s);
    for (std::size_t j = 0; j < grid.steps(); ++j) {
        s = step(s, grid.step(j), qspec, rng, sample_index, static_cast<std::uint32_t>(j));
        s.t = grid.points()[j + 1];
        write_mode_rows(dump, s);
    }
    return s;
}

ModeLaw exact_mode_law(int ell, double t, const QWienerSpec& qspec, double x0_coeff, int m) {
    if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
    if (m < 0 || m > ell) throw OrderError("order outside [0, l]");
    if (t == 0.0) return {x0_coeff, 0.0};
    const double a = qspec.spectrum.value(ell);
    const double scale = m == 0 ? 1.0 : 2.0;
    return {std::exp(-static_cast<double>(ell) * (ell + 1.0) * t) * x0_coeff,
            scale * a * sigma2(ell, t)};
}

void write_mode_rows(std::ostream& out, const ModeState& state) {
    const std::string t = format_double(state.t);
    for (int l = 0; l <= state.kappa(); ++l) {
        for (int m = 0; m <= l; ++m) {
            out << t << ',' << l << ',' << m << ',' << format_double(state.coeffs.cos_coeff(l, m))
                << ',' << format_double(state.coeffs.sin_coeff(l, m)) << '\n';
        }
    }
}

}  // namespace sphgrf
