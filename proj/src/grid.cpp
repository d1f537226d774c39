#include "sphgrf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sphgrf/errors.hpp"
#include "sphgrf/specfun.hpp"

namespace sphgrf {

namespace {

void check_dims(int n_theta, int n_phi) {
    if (n_theta < 1 || n_phi < 1) throw ConfigError("grid dimensions must be positive");
}

std::vector<double> uniform_phis(int n_phi) {
    std::vector<double> phis(static_cast<std::size_t>(n_phi));
    for (int j = 0; j < n_phi; ++j) phis[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / n_phi;
    return phis;
}

}  // namespace

SphereGrid SphereGrid::equiangular(int n_theta, int n_phi) {
    check_dims(n_theta, n_phi);
    SphereGrid g;
    g.kind_ = GridKind::equiangular;
    g.thetas_.resize(static_cast<std::size_t>(n_theta));
    g.theta_w_.resize(static_cast<std::size_t>(n_theta));
    const double n = n_theta;
    for (int i = 0; i < n_theta; ++i) {
        const double theta = (i + 0.5) * std::numbers::pi / n;
        // Fejer's first rule
        double s = 0.0;
        for (int k = 1; k <= n_theta / 2; ++k) {
            s += std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
        }
        g.thetas_[static_cast<std::size_t>(i)] = theta;
        g.theta_w_[static_cast<std::size_t>(i)] = 2.0 / n * (1.0 - 2.0 * s);
    }
    g.phis_ = uniform_phis(n_phi);
    g.phi_w_ = 2.0 * std::numbers::pi / n_phi;
    return g;
}

SphereGrid SphereGrid::gauss_latitudes(int n_theta, int n_phi) {
    check_dims(n_theta, n_phi);
    SphereGrid g;
    g.kind_ = GridKind::gauss_latitudes;
    const QuadratureRule rule = gauss_legendre(n_theta);
    // Nodes ascend in mu, so theta = arccos(mu) descends; reverse for increasing theta.
    g.thetas_.resize(rule.size());
    g.theta_w_.resize(rule.size());
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const std::size_t src = rule.size() - 1 - k;
        g.thetas_[k] = std::acos(rule.nodes[src]);
        g.theta_w_[k] = rule.weights[src];
    }
    g.phis_ = uniform_phis(n_phi);
    g.phi_w_ = 2.0 * std::numbers::pi / n_phi;
    return g;
}

int SphereGrid::exact_degree() const noexcept {
    const int lat = kind_ == GridKind::gauss_latitudes ? 2 * n_theta() - 1 : n_theta() - 1;
    return std::min(lat, n_phi() - 1);
}

GridNorms grid_norms(const FieldSample& a, const FieldSample& b) {
    if (!(a.grid == b.grid)) throw ConfigError("grid_norms: fields live on different grids");
    if (a.values.size() != b.values.size() || a.values.size() != a.grid.size()) {
        throw ConfigError("grid_norms: value array does not match grid");
    }
    GridNorms out;
    double sum = 0.0;
    const int nt = a.grid.n_theta();
    const int np = a.grid.n_phi();
    for (int i = 0; i < nt; ++i) {
        double row = 0.0;
        for (int j = 0; j < np; ++j) {
            const double d = a.at(i, j) - b.at(i, j);
            row += d * d;
            out.sup = std::max(out.sup, std::abs(d));
        }
        sum += a.grid.weight(i, 0) * row;
    }
    out.l2 = std::sqrt(sum);
    return out;
}

}  // namespace sphgrf
