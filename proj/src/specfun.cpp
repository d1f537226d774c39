#include "sphgrf/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sphgrf/errors.hpp"

namespace sphgrf {

namespace {

void check_mu(double mu) {
    if (!(std::abs(mu) <= 1.0)) {
        throw DomainError("argument mu=" + std::to_string(mu) + " outside [-1,1]");
    }
}

void check_degree(int ell) {
    if (ell < 0) throw DomainError("negative degree " + std::to_string(ell));
}

}  // namespace

BandLimit::BandLimit(int k) : kappa(k) {
    if (k < 0) throw ConfigError("band limit must be nonnegative, got " + std::to_string(k));
}

void legendre_p_all(int lmax, double mu, std::span<double> out) {
    check_degree(lmax);
    check_mu(mu);
    out[0] = 1.0;
    if (lmax == 0) return;
    out[1] = mu;
    for (int l = 1; l < lmax; ++l) {
        out[l + 1] = ((2.0 * l + 1.0) * mu * out[l] - l * out[l - 1]) / (l + 1.0);
    }
}

double legendre_p(int ell, double mu) {
    check_degree(ell);
    check_mu(mu);
    if (ell == 0) return 1.0;
    double pm1 = 1.0;
    double p = mu;
    for (int l = 1; l < ell; ++l) {
        const double next = ((2.0 * l + 1.0) * mu * p - l * pm1) / (l + 1.0);
        pm1 = p;
        p = next;
    }
    return p;
}

void assoc_legendre_normalized_all(int lmax, double theta, std::span<double> out) {
    check_degree(lmax);
    const double x = std::cos(theta);
    const double s = std::sin(theta);

    // Diagonal L_mm, then upward in l for each order.
    double diag = 0.5 / std::sqrt(std::numbers::pi);
    for (int m = 0; m <= lmax; ++m) {
        if (m > 0) diag *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        out[tri_index(m, m)] = diag;
        if (m == lmax) break;
        double prev2 = diag;
        double prev1 = std::sqrt(2.0 * m + 3.0) * x * diag;
        out[tri_index(m + 1, m)] = prev1;
        const double mm = static_cast<double>(m) * m;
        for (int l = m + 2; l <= lmax; ++l) {
            const double ll = static_cast<double>(l) * l;
            const double lm1 = static_cast<double>(l - 1) * (l - 1);
            const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
            const double b = std::sqrt((lm1 - mm) / (4.0 * lm1 - 1.0));
            const double cur = a * (x * prev1 - b * prev2);
            out[tri_index(l, m)] = cur;
            prev2 = prev1;
            prev1 = cur;
        }
    }
}

double assoc_legendre_normalized(int ell, int m, double theta) {
    check_degree(ell);
    if (m < 0 || m > ell) {
        throw OrderError("order m=" + std::to_string(m) + " invalid for degree " +
                         std::to_string(ell));
    }
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    double diag = 0.5 / std::sqrt(std::numbers::pi);
    for (int k = 1; k <= m; ++k) diag *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
    if (ell == m) return diag;
    double prev2 = diag;
    double prev1 = std::sqrt(2.0 * m + 3.0) * x * diag;
    const double mm = static_cast<double>(m) * m;
    for (int l = m + 2; l <= ell; ++l) {
        const double ll = static_cast<double>(l) * l;
        const double lm1 = static_cast<double>(l - 1) * (l - 1);
        const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
        const double b = std::sqrt((lm1 - mm) / (4.0 * lm1 - 1.0));
        const double cur = a * (x * prev1 - b * prev2);
        prev2 = prev1;
        prev1 = cur;
    }
    return prev1;
}

void jacobi_p_all(int nmax, double a, double b, double mu, std::span<double> out) {
    check_degree(nmax);
    check_mu(mu);
    if (!(a > -1.0) || !(b > -1.0)) throw DomainError("Jacobi parameters must exceed -1");
    out[0] = 1.0;
    if (nmax == 0) return;
    out[1] = (a + 1.0) + 0.5 * (a + b + 2.0) * (mu - 1.0);
    const double ab = a + b;
    for (int n = 2; n <= nmax; ++n) {
        const double c = 2.0 * n + ab;
        const double lhs = 2.0 * n * (n + ab) * (c - 2.0);
        const double t1 = (c - 1.0) * (c * (c - 2.0) * mu + a * a - b * b);
        const double t2 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * c;
        out[n] = (t1 * out[n - 1] - t2 * out[n - 2]) / lhs;
    }
}

double jacobi_p(int n, double a, double b, double mu) {
    check_degree(n);
    std::vector<double> buf(static_cast<std::size_t>(n) + 1);
    jacobi_p_all(n, a, b, mu, buf);
    return buf.back();
}

std::complex<double> sph_harm(int ell, int m, double theta, double phi) {
    check_degree(ell);
    if (std::abs(m) > ell) {
        throw OrderError("order m=" + std::to_string(m) + " invalid for degree " +
                         std::to_string(ell));
    }
    const int am = std::abs(m);
    const double l = assoc_legendre_normalized(ell, am, theta);
    const std::complex<double> y = std::polar(1.0, am * phi) * l;
    if (m >= 0) return y;
    return (am % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
}

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw ConfigError("Gauss-Legendre rule needs n >= 1");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi's initial guess for the i-th largest root.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int l = 1; l < n; ++l) {
                const double p2 = ((2.0 * l + 1.0) * x * p1 - l * p0) / (l + 1.0);
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 1 ? x : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15) break;
        }
        // Re-evaluate the derivative at the converged node.
        {
            double p0 = 1.0;
            double p1 = x;
            for (int l = 1; l < n; ++l) {
                const double p2 = ((2.0 * l + 1.0) * x * p1 - l * p0) / (l + 1.0);
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 1 ? x : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

}  // namespace sphgrf
