#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphgrf/specfun.hpp"

namespace sphgrf {

/// Angular power spectrum (A_l) of a centered isotropic Gaussian field on S^2.
///
/// Two models: a power law A_l = C (l+1)^{-alpha}, which satisfies the decay
/// hypothesis A_l <= C l^{-alpha} for l >= 1, and a finite table (zero beyond
/// its length). Values are immutable once constructed.
class AngularPowerSpectrum {
public:
    enum class Model { power_law, tabulated };

    static AngularPowerSpectrum power_law(double c, double alpha);
    static AngularPowerSpectrum tabulated(std::vector<double> values);
    /// All-zero spectrum (the degenerate field T == 0).
    static AngularPowerSpectrum zero() { return tabulated({}); }
    /// Two-column CSV "l,A_l" (optional header line, '#' comments). Missing
    /// degrees are zero.
    static AngularPowerSpectrum load_csv(const std::filesystem::path& path);

    [[nodiscard]] double value(int ell) const;
    [[nodiscard]] double operator()(int ell) const { return value(ell); }

    [[nodiscard]] Model model() const noexcept { return model_; }
    [[nodiscard]] bool is_power_law() const noexcept { return model_ == Model::power_law; }
    /// True when only finitely many A_l are nonzero.
    [[nodiscard]] bool band_limited() const noexcept { return model_ == Model::tabulated; }
    /// Largest l with a (possibly) nonzero value; -1 for the zero spectrum,
    /// nullopt for the power law.
    [[nodiscard]] std::optional<int> max_degree() const;

    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] const std::vector<double>& table() const noexcept { return values_; }

    /// A_l for 0 <= l <= kappa.
    [[nodiscard]] std::vector<double> values_up_to(int kappa) const;

private:
    AngularPowerSpectrum() = default;

    Model model_ = Model::tabulated;
    double c_ = 0.0;
    double alpha_ = 0.0;
    std::vector<double> values_;
};

/// A sum that may diverge; divergence is flagged rather than thrown.
struct FlaggedValue {
    double value = 0.0;
    bool divergent = false;
};

/// Band-limited kernel evaluation plus a rigorous bound on the truncated part.
struct KernelValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

using Vec3 = std::array<double, 3>;

/// Geodesic distance arccos<x,y> on the unit sphere.
[[nodiscard]] double geodesic_distance(const Vec3& x, const Vec3& y);

/// k(r) = sum_{l<=kappa} A_l (2l+1)/(4 pi) P_l(cos r), with |k - value| <= tail_bound.
[[nodiscard]] KernelValue kernel_k(const AngularPowerSpectrum& spectrum, double r, BandLimit band);
/// k_I(mu) = k(arccos mu).
[[nodiscard]] KernelValue kernel_kI(const AngularPowerSpectrum& spectrum, double mu,
                                    BandLimit band);
/// k_T(x, y) = k_I(<x, y>) for unit vectors x, y.
[[nodiscard]] KernelValue kernel_kT(const AngularPowerSpectrum& spectrum, const Vec3& x,
                                    const Vec3& y, BandLimit band);

/// sum_{l > kappa} (2l+1) A_l. kappa = -1 gives the full trace.
[[nodiscard]] double tail_sum(const AngularPowerSpectrum& spectrum, int kappa);

/// trace Q = sum_l (2l+1) A_l.
[[nodiscard]] double trace_q(const AngularPowerSpectrum& spectrum);

/// sum_l u_l^2 (2l+1)/2 (1 + l^{2 eta}) with u_l = A_l / (2 pi).
[[nodiscard]] FlaggedValue sobolev_equiv_norm(const AngularPowerSpectrum& spectrum, double eta);

/// (l+n)! / (l-n)! for 0 <= n <= l, as a double.
[[nodiscard]] double factorial_ratio(int ell, int n);

/// int_{-1}^{1} |d^n/dmu^n k_I(mu)|^2 (1-mu^2)^n dmu for the band-limited
/// kernel, evaluated with the supplied rule (which must be exact for degree
/// 2 kappa + 2n).
[[nodiscard]] double weighted_deriv_norm_quadrature(const AngularPowerSpectrum& spectrum, int n,
                                                    BandLimit band, const QuadratureRule& rule);

/// Closed form of the same integral: sum_{n<=l<=kappa} 2 A_l^2 (2l+1)/(4pi)^2 (l+n)!/(l-n)!.
[[nodiscard]] double weighted_deriv_norm_spectral(const AngularPowerSpectrum& spectrum, int n,
                                                  BandLimit band);

/// C_beta = (2 pi)^{-1} sum_l A_l (2l+1) (l(l+1))^{beta/2}, beta in [0, 2].
/// Throws DivergenceError when the series diverges.
[[nodiscard]] double holder_constant(const AngularPowerSpectrum& spectrum, double beta);

/// Bound 2 c_{2p} C_beta^p on E|T(x)-T(y)|^{2p} / d(x,y)^{beta p}, with
/// c_{2p} = (2p-1)!!.
[[nodiscard]] double moment_constant(const AngularPowerSpectrum& spectrum, double beta, int p);

struct RegularityReport {
    /// Supremum of admissible beta in sum_l A_l l^{1+beta} < inf (not attained);
    /// +inf for band-limited spectra.
    double beta_sup = 0.0;
    /// Supremum sample Hoelder exponent, capped at 1.
    double holder_sup = 0.0;
    /// Number of continuous derivatives; -1 when unbounded (band-limited).
    int diff_order = 0;
    double lognormal_holder_sup = 0.0;
    /// A continuous modification is guaranteed (beta_sup > 0).
    bool continuous = false;
    bool band_limited = false;
};

[[nodiscard]] RegularityReport regularity_report(const AngularPowerSpectrum& spectrum);

/// JSON text of a report, with the generating spectrum parameters.
[[nodiscard]] std::string to_json(const RegularityReport& report,
                                  const AngularPowerSpectrum& spectrum);

}  // namespace sphgrf
