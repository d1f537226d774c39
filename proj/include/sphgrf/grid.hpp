#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace sphgrf {

enum class GridKind { equiangular, gauss_latitudes };

/// Tensor-product (theta, phi) lattice with quadrature weights on S^2.
///
/// equiangular: theta_i = (i + 1/2) pi / N_theta (pole-free) with Fejer
/// first-rule weights in cos(theta); exact for polynomials in cos(theta) of
/// degree < N_theta.
/// gauss_latitudes: cos(theta_i) at Gauss-Legendre nodes; exact to degree
/// 2 N_theta - 1.
/// Longitudes are uniform, phi_j = 2 pi j / N_phi, with trapezoidal weights.
class SphereGrid {
public:
    static SphereGrid equiangular(int n_theta, int n_phi);
    static SphereGrid gauss_latitudes(int n_theta, int n_phi);

    [[nodiscard]] GridKind kind() const noexcept { return kind_; }
    [[nodiscard]] int n_theta() const noexcept { return static_cast<int>(thetas_.size()); }
    [[nodiscard]] int n_phi() const noexcept { return static_cast<int>(phis_.size()); }
    [[nodiscard]] std::size_t size() const noexcept { return thetas_.size() * phis_.size(); }
    [[nodiscard]] const std::vector<double>& thetas() const noexcept { return thetas_; }
    [[nodiscard]] const std::vector<double>& phis() const noexcept { return phis_; }
    /// Latitude weight (integrates in mu = cos theta; sums to 2).
    [[nodiscard]] const std::vector<double>& theta_weights() const noexcept { return theta_w_; }
    [[nodiscard]] double weight(int i, [[maybe_unused]] int j) const noexcept {
        return theta_w_[static_cast<std::size_t>(i)] * phi_w_;
    }
    /// Largest total degree d such that every band-limited function of
    /// degree <= d integrates exactly.
    [[nodiscard]] int exact_degree() const noexcept;

    bool operator==(const SphereGrid&) const = default;

private:
    SphereGrid() = default;

    GridKind kind_ = GridKind::equiangular;
    std::vector<double> thetas_;
    std::vector<double> phis_;
    std::vector<double> theta_w_;
    double phi_w_ = 0.0;
};

/// Real field values on a grid, row-major in (theta, phi).
struct FieldSample {
    SphereGrid grid;
    std::vector<double> values;

    explicit FieldSample(SphereGrid g)
        : grid(std::move(g)), values(grid.size(), 0.0) {}

    [[nodiscard]] double& at(int i, int j) {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.n_phi()) +
                      static_cast<std::size_t>(j)];
    }
    [[nodiscard]] double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.n_phi()) +
                      static_cast<std::size_t>(j)];
    }
};

struct GridNorms {
    double l2 = 0.0;
    double sup = 0.0;
};

/// L2(S^2) (by the grid quadrature) and grid-sup norms of a - b.
[[nodiscard]] GridNorms grid_norms(const FieldSample& a, const FieldSample& b);

}  // namespace sphgrf
