#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

#include "sphgrf/grid.hpp"
#include "sphgrf/rng.hpp"
#include "sphgrf/sampler.hpp"
#include "sphgrf/spectrum.hpp"

namespace sphgrf {

/// Isotropic Q-Wiener noise: Q has eigenvalues A_l on the spherical harmonics.
///
/// trace Q = sum (2l+1) A_l is +inf for power laws with alpha <= 2. Such noise
/// is not trace class, but every truncated solution X^kappa is still well
/// defined, so the spec is accepted and trace_class() reports the condition.
struct QWienerSpec {
    AngularPowerSpectrum spectrum;
    double trace = 0.0;

    explicit QWienerSpec(AngularPowerSpectrum s);
    [[nodiscard]] bool trace_class() const noexcept { return std::isfinite(trace); }
};

/// Coefficients of the heat-equation solution at time t.
struct ModeState {
    HarmonicCoefficients coeffs;
    double t = 0.0;

    ModeState() = default;
    explicit ModeState(int kappa, double t0 = 0.0) : coeffs(kappa), t(t0) {}
    [[nodiscard]] int kappa() const noexcept { return coeffs.kappa; }
};

/// 0 = t_0 < t_1 < ... < t_n = T.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> points);
    static TimeGrid uniform(double t_end, int steps, double t0 = 0.0);

    [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
    [[nodiscard]] std::size_t steps() const noexcept { return points_.size() - 1; }
    [[nodiscard]] double step(std::size_t j) const { return points_[j + 1] - points_[j]; }

private:
    std::vector<double> points_;
};

/// Variance of int_0^h exp(-l(l+1)(h-s)) dbeta(s):
///   (1 - exp(-2 l(l+1) h)) / (2 l(l+1)),   and exactly h for l = 0.
[[nodiscard]] double sigma2(int ell, double h);

/// Coefficients of a band-limited initial condition.
[[nodiscard]] ModeState project_initial(const HarmonicCoefficients& x0, int kappa);

/// Analysis of a grid field: exact when the grid has Gauss latitudes with
/// N_theta >= kappa + 1 and N_phi >= 2 kappa + 1; throws
/// InsufficientQuadratureError otherwise.
[[nodiscard]] ModeState project_initial(const FieldSample& x0, int kappa);

/// One exact step of the per-mode Ornstein-Uhlenbeck recursion
///   c <- exp(-l(l+1) h) c + gain * N,
/// gain = sqrt(A_l) sigma_lh (m = 0), sqrt(2 A_l) sigma_lh (m >= 1), with N the
/// stream variate at (sample, l, m, component, step_index).
[[nodiscard]] ModeState step(const ModeState& state, double h, const QWienerSpec& qspec,
                             const RngStream& rng, std::uint64_t sample_index,
                             std::uint32_t step_index);

/// Folds step over the time grid; requires state.t == grid.points().front().
[[nodiscard]] ModeState evolve(const ModeState& state, const TimeGrid& grid,
                               const QWienerSpec& qspec, const RngStream& rng,
                               std::uint64_t sample_index);

/// As evolve, writing "t,ell,m,c1,c2" rows for the initial and every
/// subsequent state to the stream.
[[nodiscard]] ModeState evolve_with_dump(const ModeState& state, const TimeGrid& grid,
                                         const QWienerSpec& qspec, const RngStream& rng,
                                         std::uint64_t sample_index, std::ostream& dump);

struct ModeLaw {
    double mean = 0.0;
    double variance = 0.0;
};

/// Law of one real coefficient at time t started from x0_coeff:
/// mean exp(-l(l+1)t) x0, variance A_l sigma2(l,t) for m = 0 and
/// 2 A_l sigma2(l,t) per real component for m >= 1.
[[nodiscard]] ModeLaw exact_mode_law(int ell, double t, const QWienerSpec& qspec, double x0_coeff,
                                     int m = 0);

/// Writes "t,ell,m,c1,c2" rows of a state (no header).
void write_mode_rows(std::ostream& out, const ModeState& state);

}  // namespace sphgrf
