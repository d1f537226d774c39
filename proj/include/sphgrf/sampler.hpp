#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sphgrf/grid.hpp"
#include "sphgrf/rng.hpp"
#include "sphgrf/specfun.hpp"
#include "sphgrf/spectrum.hpp"

namespace sphgrf {

/// Highest band limit addressable by the coefficient stream.
inline constexpr int kMaxBandLimit = 65535;

/// Real expansion coefficients in the basis
///   L_l0(theta),  L_lm(theta) cos(m phi),  L_lm(theta) sin(m phi)  (m >= 1),
/// i.e. f = sum_l [c1_l0 L_l0 + sum_m L_lm (c1_lm cos(m phi) + c2_lm sin(m phi))].
/// Both tables are indexed by tri_index(l, m); c2 at m = 0 is always zero.
struct HarmonicCoefficients {
    int kappa = 0;
    std::vector<double> c1;
    std::vector<double> c2;

    HarmonicCoefficients() : HarmonicCoefficients(0) {}
    explicit HarmonicCoefficients(int band);

    [[nodiscard]] double& cos_coeff(int ell, int m) { return c1[tri_index(ell, m)]; }
    [[nodiscard]] double cos_coeff(int ell, int m) const { return c1[tri_index(ell, m)]; }
    [[nodiscard]] double& sin_coeff(int ell, int m) { return c2[tri_index(ell, m)]; }
    [[nodiscard]] double sin_coeff(int ell, int m) const { return c2[tri_index(ell, m)]; }

    /// Copy restricted to l <= band (zero-padded when band > kappa).
    [[nodiscard]] HarmonicCoefficients truncated(int band) const;
    /// sum of squared coefficients weighted by basis norms = ||f||^2_{L2(S^2)}.
    [[nodiscard]] double l2_norm_squared() const;
};

/// Standard normal KL variates X1_lm (0 <= m <= l) and X2_lm (1 <= m <= l).
/// Stores exactly (kappa + 1)^2 values.
class CoefficientDraw {
public:
    CoefficientDraw(int band, std::vector<double> x1, std::vector<double> x2);

    [[nodiscard]] int kappa() const noexcept { return kappa_; }
    [[nodiscard]] double x1(int ell, int m) const { return x1_[tri_index(ell, m)]; }
    /// m >= 1
    [[nodiscard]] double x2(int ell, int m) const {
        return x2_[static_cast<std::size_t>(ell) * static_cast<std::size_t>(ell - 1) / 2 +
                   static_cast<std::size_t>(m - 1)];
    }
    [[nodiscard]] std::size_t variate_count() const noexcept { return x1_.size() + x2_.size(); }
    [[nodiscard]] const std::vector<double>& x1_table() const noexcept { return x1_; }
    [[nodiscard]] const std::vector<double>& x2_table() const noexcept { return x2_; }

    /// The draw at a smaller band limit (a literal prefix of this one).
    [[nodiscard]] CoefficientDraw prefix(int band) const;

    /// Scaled KL coefficients: sqrt(A_l) X1_l0 and sqrt(2 A_l) (X1_lm, X2_lm).
    [[nodiscard]] HarmonicCoefficients scaled(const AngularPowerSpectrum& spectrum) const;

private:
    int kappa_;
    std::vector<double> x1_;
    std::vector<double> x2_;
};

/// Draws the variates at stream addresses (sample_index, l, m, component, step).
[[nodiscard]] CoefficientDraw draw_coefficients(int kappa, const RngStream& rng,
                                                std::uint64_t sample_index,
                                                std::uint32_t step = 0);

/// Precomputed L_lm(theta_i) and cos/sin(m phi_j) tables for one grid and
/// band limit; immutable and shareable between threads.
class SynthesisPlan {
public:
    SynthesisPlan(SphereGrid grid, int kappa);

    [[nodiscard]] const SphereGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] int kappa() const noexcept { return kappa_; }
    [[nodiscard]] const double* legendre_row(int i) const {
        return legendre_.data() + static_cast<std::size_t>(i) * tri_;
    }
    [[nodiscard]] const double* cos_row(int m) const {
        return cos_.data() + static_cast<std::size_t>(m) * static_cast<std::size_t>(grid_.n_phi());
    }
    [[nodiscard]] const double* sin_row(int m) const {
        return sin_.data() + static_cast<std::size_t>(m) * static_cast<std::size_t>(grid_.n_phi());
    }

private:
    SphereGrid grid_;
    int kappa_;
    std::size_t tri_;
    std::vector<double> legendre_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Evaluates the expansion restricted to l <= ell_max on the plan's grid.
///
/// Per latitude, order-m accumulators a_m = sum_l c1_lm L_lm(theta_i) and
/// b_m = sum_l c2_lm L_lm(theta_i) are summed in ascending l, then combined
/// over longitudes in ascending m. The order is fixed, so truncating the
/// coefficients and lowering ell_max give bitwise-identical results.
[[nodiscard]] FieldSample synthesize_to(const HarmonicCoefficients& coeffs,
                                        const SynthesisPlan& plan, int ell_max, int threads = 1);
[[nodiscard]] FieldSample synthesize(const HarmonicCoefficients& coeffs, const SynthesisPlan& plan,
                                     int threads = 1);

/// T^kappa on the grid for a KL draw.
[[nodiscard]] FieldSample synthesize(const CoefficientDraw& draw,
                                     const AngularPowerSpectrum& spectrum, const SphereGrid& grid,
                                     int threads = 1);

/// Value of the expansion at a single point.
[[nodiscard]] double evaluate_point(const HarmonicCoefficients& coeffs, double theta, double phi);

/// Pointwise exp; throws RangeError if any value exceeds 700.
[[nodiscard]] FieldSample lognormal_transform(const FieldSample& field);

/// Wavefront OBJ of the sphere deformed radially by the (positive) field:
/// N_theta * N_phi grid vertices plus two poles, outward-wound quads and pole
/// fans.
void export_deformed_mesh(const FieldSample& field, const std::filesystem::path& path);

}  // namespace sphgrf
