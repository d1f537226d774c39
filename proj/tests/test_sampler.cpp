#include <doctest.h>

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "sphgrf/errors.hpp"
#include "sphgrf/sampler.hpp"
#include "test_util.hpp"

using namespace sphgrf;

namespace {

constexpr double kPi = std::numbers::pi;

using V3 = std::array<double, 3>;

V3 cross(const V3& a, const V3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

struct Obj {
    std::vector<V3> vertices;
    std::vector<std::vector<int>> faces;
};

Obj read_obj(const std::filesystem::path& p) {
    Obj obj;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            V3 v{};
            ss >> v[0] >> v[1] >> v[2];
            obj.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> f;
            int k;
            while (ss >> k) f.push_back(k - 1);
            obj.faces.push_back(f);
        }
    }
    return obj;
}

}  // namespace

TEST_CASE("coefficient draws") {
    const RngStream rng(5);
    CHECK(draw_coefficients(0, rng, 0).variate_count() == 1);
    CHECK(draw_coefficients(64, rng, 0).variate_count() == 4225);
    CHECK(draw_coefficients(7, rng, 3).variate_count() == 64);
    CHECK_THROWS_AS((void)draw_coefficients(-1, rng, 0), ConfigError);

    const auto big = draw_coefficients(40, rng, 9);
    const auto small = draw_coefficients(17, rng, 9);
    const auto pre = big.prefix(17);
    CHECK(pre.x1_table() == small.x1_table());
    CHECK(pre.x2_table() == small.x2_table());
    CHECK(big.x1(3, 2) == rng.normal(9, 3, 2, 1));
    CHECK(big.x2(3, 2) == rng.normal(9, 3, 2, 2));
    CHECK(big.x2(5, 1) == rng.normal(9, 5, 1, 2));
    CHECK_THROWS_AS((void)big.prefix(41), ConfigError);

    const auto spec = AngularPowerSpectrum::power_law(2.0, 3.0);
    const auto c = big.scaled(spec);
    CHECK(c.cos_coeff(4, 0) == doctest::Approx(std::sqrt(spec(4)) * big.x1(4, 0)).epsilon(1e-15));
    CHECK(c.cos_coeff(4, 3) == doctest::Approx(std::sqrt(2 * spec(4)) * big.x1(4, 3)).epsilon(1e-15));
    CHECK(c.sin_coeff(4, 3) == doctest::Approx(std::sqrt(2 * spec(4)) * big.x2(4, 3)).epsilon(1e-15));
    CHECK(c.sin_coeff(4, 0) == 0.0);
}

TEST_CASE("KL variates are standard normal") {
    const RngStream rng(77);
    constexpr int n = 10000;
    testutil::Moments a, b, c;
    for (int s = 0; s < n; ++s) {
        const auto d = draw_coefficients(6, rng, static_cast<std::uint64_t>(s));
        a.add(d.x1(0, 0));
        b.add(d.x1(6, 4));
        c.add(d.x2(5, 5));
    }
    for (const auto* m : {&a, &b, &c}) {
        CHECK(std::abs(m->variance() - 1.0) < 3e-2 * std::sqrt(2.0));
        CHECK(std::abs(m->mean) < 4.0 / std::sqrt(n));
    }
}

TEST_CASE("synthesis examples") {
    const auto grid = SphereGrid::equiangular(7, 9);
    const auto constant = AngularPowerSpectrum::tabulated({4.0 * kPi});
    const CoefficientDraw d(0, {1.75}, {});
    const FieldSample f = synthesize(d, constant, grid);
    for (double v : f.values) CHECK(v == doctest::Approx(1.75).epsilon(1e-15));

    const auto p = AngularPowerSpectrum::power_law(1.0, 3.0);
    const FieldSample g = synthesize(draw_coefficients(0, RngStream(1), 0), p, grid);
    for (double v : g.values) CHECK(v == g.values.front());
}

TEST_CASE("synthesis matches direct evaluation of the real expansion") {
    const auto grid = SphereGrid::gauss_latitudes(9, 13);
    const auto p = AngularPowerSpectrum::power_law(1.0, 2.5);
    const auto d = draw_coefficients(8, RngStream(3), 0);
    const FieldSample f = synthesize(d, p, grid);
    for (int i = 0; i < grid.n_theta(); ++i) {
        for (int j = 0; j < grid.n_phi(); ++j) {
            const double th = grid.thetas()[i], ph = grid.phis()[j];
            // Direct sum with complex harmonics: Re Y_lm = L_lm cos, Im Y_lm = L_lm sin.
            double direct = 0.0;
            for (int l = 0; l <= 8; ++l) {
                direct += std::sqrt(p(l)) * d.x1(l, 0) * sph_harm(l, 0, th, ph).real();
                for (int m = 1; m <= l; ++m) {
                    const auto y = sph_harm(l, m, th, ph);
                    direct += std::sqrt(2.0 * p(l)) * (d.x1(l, m) * y.real() + d.x2(l, m) * y.imag());
                }
            }
            REQUIRE(std::abs(f.at(i, j) - direct) < 1e-13);
            REQUIRE(std::abs(evaluate_point(d.scaled(p), th, ph) - direct) < 1e-13);
        }
    }
}

TEST_CASE("nesting is bitwise exact") {
    const auto grid = SphereGrid::equiangular(16, 32);
    const auto p = AngularPowerSpectrum::power_law(1.0, 3.0);
    const RngStream rng(8);
    const auto big = draw_coefficients(40, rng, 2);
    const SynthesisPlan plan(grid, 40);
    const auto coeffs = big.scaled(p);
    for (int k : {0, 1, 7, 20, 39}) {
        const FieldSample direct = synthesize(big.prefix(k), p, grid);
        const FieldSample partial = synthesize_to(coeffs, plan, k);
        const FieldSample fresh = synthesize(draw_coefficients(k, rng, 2), p, grid);
        const FieldSample truncated = synthesize(coeffs.truncated(k), plan);
        REQUIRE(direct.values == partial.values);
        REQUIRE(fresh.values == partial.values);
        REQUIRE(truncated.values == partial.values);
    }
    CHECK_THROWS_AS((void)synthesize_to(coeffs, plan, 41), ConfigError);
}

TEST_CASE("determinism across thread counts") {
    const auto grid = SphereGrid::equiangular(33, 64);
    const auto p = AngularPowerSpectrum::power_law(1.0, 3.0);
    const auto d = draw_coefficients(50, RngStream(99), 4);
    const FieldSample one = synthesize(d, p, grid, 1);
    for (int t : {2, 3, 8}) REQUIRE(synthesize(d, p, grid, t).values == one.values);
}

TEST_CASE("expected squared norm equals the retained trace") {
    const auto p = AngularPowerSpectrum::power_law(1.0, 3.0);
    constexpr int kappa = 12;
    const auto grid = SphereGrid::gauss_latitudes(kappa + 1, 2 * kappa + 1);
    const SynthesisPlan plan(grid, kappa);
    const FieldSample zero(grid);
    const RngStream rng(12);
    testutil::Moments m;
    for (int s = 0; s < 1000; ++s) {
        const auto c = draw_coefficients(kappa, rng, static_cast<std::uint64_t>(s)).scaled(p);
        const double n2 = std::pow(grid_norms(synthesize(c, plan), zero).l2, 2);
        REQUIRE(std::abs(n2 - c.l2_norm_squared()) < 1e-10 * std::max(1.0, n2));
        m.add(n2);
    }
    double expect = 0.0;
    for (int l = 0; l <= kappa; ++l) expect += (2.0 * l + 1.0) * p(l);
    CHECK(std::abs(m.mean - expect) < 3.0 * m.stderr_mean());
}

TEST_CASE("empirical covariance matches the kernel") {
    const auto p = AngularPowerSpectrum::power_law(1.0, 3.0);
    constexpr int kappa = 16;
    const double tx = 0.7, px = 1.1, ty = 1.3, py = 2.0;
    const Vec3 x{std::sin(tx) * std::cos(px), std::sin(tx) * std::sin(px), std::cos(tx)};
    const Vec3 y{std::sin(ty) * std::cos(py), std::sin(ty) * std::sin(py), std::cos(ty)};
    const double kxy = kernel_kT(p, x, y, BandLimit(kappa)).value;
    const double kxx = kernel_k(p, 0.0, BandLimit(kappa)).value;
    const RngStream rng(13);
    testutil::Moments prod, sq;
    for (int s = 0; s < 10000; ++s) {
        const auto c = draw_coefficients(kappa, rng, static_cast<std::uint64_t>(s)).scaled(p);
        const double a = evaluate_point(c, tx, px);
        const double b = evaluate_point(c, ty, py);
        prod.add(a * b);
        sq.add(a * a);
    }
    CHECK(std::abs(prod.mean - kxy) < 4.0 * prod.stderr_mean());
    CHECK(std::abs(sq.mean - kxx) < 4.0 * sq.stderr_mean());
}

TEST_CASE("lognormal transform") {
    const auto grid = SphereGrid::equiangular(4, 5);
    const FieldSample zero(grid);
    for (double v : lognormal_transform(zero).values) CHECK(v == 1.0);
    FieldSample a(grid), b(grid);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        a.values[k] = std::sin(1.0 + k);
        b.values[k] = std::cos(2.0 * k);
    }
    const auto ea = lognormal_transform(a), eb = lognormal_transform(b);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        REQUIRE((a.values[k] < b.values[k]) == (ea.values[k] < eb.values[k]));
        REQUIRE(ea.values[k] == std::exp(a.values[k]));
    }
    a.values[3] = 701.0;
    CHECK_THROWS_AS((void)lognormal_transform(a), RangeError);
}

TEST_CASE("lognormal mean matches the Gaussian moment generating function") {
    constexpr int kappa = 48;
    for (double alpha : {3.0, 5.0}) {
        const auto p = AngularPowerSpectrum::power_law(1.0, alpha);
        const double k0 = kernel_k(p, 0.0, BandLimit(kappa)).value;
        const RngStream rng(14);
        testutil::Moments m;
        for (int s = 0; s < 10000; ++s) {
            const auto c = draw_coefficients(kappa, rng, static_cast<std::uint64_t>(s)).scaled(p);
            m.add(std::exp(evaluate_point(c, 1.0, 0.5)));
        }
        CHECK(std::abs(m.mean - std::exp(k0 / 2.0)) < 3.0 * m.stderr_mean());
    }
}

TEST_CASE("deformed mesh export") {
    const auto dir = testutil::scratch("mesh");
    for (const auto& grid : {SphereGrid::equiangular(6, 8), SphereGrid::gauss_latitudes(5, 11)}) {
        FieldSample ones(grid);
        std::fill(ones.values.begin(), ones.values.end(), 1.0);
        export_deformed_mesh(ones, dir / "unit.obj");
        const Obj obj = read_obj(dir / "unit.obj");
        const int nt = grid.n_theta(), np = grid.n_phi();
        REQUIRE(obj.vertices.size() == static_cast<std::size_t>(nt * np + 2));
        CHECK(obj.faces.size() == static_cast<std::size_t>(np * (nt + 1)));
        for (const auto& v : obj.vertices) REQUIRE(std::abs(std::sqrt(dot(v, v)) - 1.0) < 1e-12);
        for (const auto& f : obj.faces) {
            // Newell normal of the polygon against its centroid direction.
            V3 n{0, 0, 0}, c{0, 0, 0};
            for (std::size_t k = 0; k < f.size(); ++k) {
                const V3& a = obj.vertices[static_cast<std::size_t>(f[k])];
                const V3& b = obj.vertices[static_cast<std::size_t>(f[(k + 1) % f.size()])];
                const V3 cr = cross(a, b);
                for (int d = 0; d < 3; ++d) {
                    n[d] += cr[d];
                    c[d] += a[d];
                }
            }
            REQUIRE(dot(n, c) > 0.0);
            for (int idx : f) REQUIRE((idx >= 0 && idx < static_cast<int>(obj.vertices.size())));
        }
        // Every edge is shared by exactly two faces, in opposite directions.
        std::map<std::pair<int, int>, int> edges;
        for (const auto& f : obj.faces) {
            for (std::size_t k = 0; k < f.size(); ++k) ++edges[{f[k], f[(k + 1) % f.size()]}];
        }
        for (const auto& [e, count] : edges) {
            REQUIRE(count == 1);
            REQUIRE(edges.count({e.second, e.first}) == 1);
        }
    }

    const auto p = AngularPowerSpectrum::power_law(1.0, 5.0);
    const auto grid = SphereGrid::equiangular(10, 20);
    const FieldSample radius = lognormal_transform(synthesize(draw_coefficients(20, RngStream(1), 0), p, grid));
    export_deformed_mesh(radius, dir / "deformed.obj");
    const Obj obj = read_obj(dir / "deformed.obj");
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 20; ++j) {
            const V3& v = obj.vertices[static_cast<std::size_t>(1 + i * 20 + j)];
            REQUIRE(std::sqrt(dot(v, v)) == doctest::Approx(radius.at(i, j)).epsilon(1e-14));
        }
    }

    FieldSample bad(grid);
    CHECK_THROWS_AS(export_deformed_mesh(bad, dir / "bad.obj"), RangeError);
    CHECK_THROWS_AS(export_deformed_mesh(radius, dir / "no" / "dir" / "x.obj"), IoError);
}

TEST_CASE("band-limited L2 norm on an exact grid") {
    const auto p = AngularPowerSpectrum::power_law(1.0, 2.0);
    constexpr int kappa = 20;
    const auto grid = SphereGrid::gauss_latitudes(kappa + 1, 2 * kappa + 1);
    const SynthesisPlan plan(grid, kappa);
    const auto a = draw_coefficients(kappa, RngStream(1), 0).scaled(p);
    const auto b = draw_coefficients(kappa, RngStream(2), 0).scaled(p);
    HarmonicCoefficients diff(kappa);
    for (std::size_t k = 0; k < diff.c1.size(); ++k) {
        diff.c1[k] = a.c1[k] - b.c1[k];
        diff.c2[k] = a.c2[k] - b.c2[k];
    }
    const double l2 = grid_norms(synthesize(a, plan), synthesize(b, plan)).l2;
    CHECK(std::abs(l2 - std::sqrt(diff.l2_norm_squared())) < 1e-10);
}
