#pragma once

// Special functions on [-1,1] and the sphere.
//
// Phase convention: the associated Legendre functions carry the
// Condon-Shortley factor (-1)^m,
//
//     P_lm(mu) = (-1)^m (1 - mu^2)^{m/2} d^m/dmu^m P_l(mu),
//
// so L_11(pi/2) < 0 and Y_{l,-m} = (-1)^m conj(Y_lm). Libraries that omit the
// phase (e.g. some geodesy codes) differ by that sign for odd m.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sphgrf {

/// Maximum retained degree of a truncated harmonic expansion.
struct BandLimit {
    int kappa = 0;

    constexpr BandLimit() = default;
    explicit BandLimit(int k);

    /// Number of (l, m >= 0) pairs with l <= kappa.
    [[nodiscard]] constexpr std::size_t triangle_size() const noexcept {
        const auto k = static_cast<std::size_t>(kappa);
        return (k + 1) * (k + 2) / 2;
    }
};

/// Packed index of (l, m), 0 <= m <= l, in a lower-triangular table.
[[nodiscard]] constexpr std::size_t tri_index(int ell, int m) noexcept {
    return static_cast<std::size_t>(ell) * static_cast<std::size_t>(ell + 1) / 2 +
           static_cast<std::size_t>(m);
}

struct QuadratureRule {
    std::vector<double> nodes;    ///< strictly increasing, in (-1, 1)
    std::vector<double> weights;  ///< positive

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
    /// Highest polynomial degree integrated exactly (2n - 1 for Gauss-Legendre).
    [[nodiscard]] int exact_degree() const noexcept {
        return 2 * static_cast<int>(nodes.size()) - 1;
    }
};

/// Legendre polynomial P_l(mu) by the three-term recurrence.
[[nodiscard]] double legendre_p(int ell, double mu);

/// P_0(mu), ..., P_lmax(mu) written to out (size lmax + 1).
void legendre_p_all(int lmax, double mu, std::span<double> out);

/// Normalized associated Legendre function
///   L_lm(theta) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_lm(cos theta)
/// evaluated with a recurrence on the normalized values (stable to high degree).
[[nodiscard]] double assoc_legendre_normalized(int ell, int m, double theta);

/// All L_lm(theta), 0 <= m <= l <= lmax, in tri_index order.
void assoc_legendre_normalized_all(int lmax, double theta, std::span<double> out);

/// Jacobi polynomial P_n^{(a,b)}(mu).
[[nodiscard]] double jacobi_p(int n, double a, double b, double mu);

/// P_0^{(a,b)}(mu), ..., P_nmax^{(a,b)}(mu) written to out (size nmax + 1).
void jacobi_p_all(int nmax, double a, double b, double mu, std::span<double> out);

/// Complex spherical harmonic Y_lm(theta, phi), |m| <= l.
[[nodiscard]] std::complex<double> sph_harm(int ell, int m, double theta, double phi);

/// n-point Gauss-Legendre rule on [-1, 1].
[[nodiscard]] QuadratureRule gauss_legendre(int n);

}  // namespace sphgrf
