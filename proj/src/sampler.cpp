#include "sphgrf/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "sphgrf/errors.hpp"
#include "sphgrf/parallel.hpp"

namespace sphgrf {

namespace {

void check_band(int kappa) {
    if (kappa < 0 || kappa > kMaxBandLimit) {
        throw ConfigError("band limit must lie in [0, " + std::to_string(kMaxBandLimit) +
                          "], got " + std::to_string(kappa));
    }
}

std::size_t tri_size(int kappa) { return BandLimit(kappa).triangle_size(); }

}  // namespace

HarmonicCoefficients::HarmonicCoefficients(int band)
    : kappa(band), c1(tri_size(band), 0.0), c2(tri_size(band), 0.0) {
    check_band(band);
}

HarmonicCoefficients HarmonicCoefficients::truncated(int band) const {
    HarmonicCoefficients out(band);
    const std::size_t n = std::min(out.c1.size(), c1.size());
    std::copy_n(c1.begin(), n, out.c1.begin());
    std::copy_n(c2.begin(), n, out.c2.begin());
    return out;
}

double HarmonicCoefficients::l2_norm_squared() const {
    double sum = 0.0;
    for (int l = 0; l <= kappa; ++l) {
        sum += c1[tri_index(l, 0)] * c1[tri_index(l, 0)];
        for (int m = 1; m <= l; ++m) {
            const double a = c1[tri_index(l, m)];
            const double b = c2[tri_index(l, m)];
            sum += 0.5 * (a * a + b * b);
        }
    }
    return sum;
}

CoefficientDraw::CoefficientDraw(int band, std::vector<double> x1, std::vector<double> x2)
    : kappa_(band), x1_(std::move(x1)), x2_(std::move(x2)) {
    check_band(band);
    const auto k = static_cast<std::size_t>(band);
    if (x1_.size() != (k + 1) * (k + 2) / 2 || x2_.size() != k * (k + 1) / 2) {
        throw ConfigError("coefficient table sizes do not match band limit");
    }
}

CoefficientDraw CoefficientDraw::prefix(int band) const {
    if (band < 0 || band > kappa_) throw ConfigError("prefix band must lie in [0, kappa]");
    const auto k = static_cast<std::size_t>(band);
    std::vector<double> x1(x1_.begin(), x1_.begin() + static_cast<std::ptrdiff_t>((k + 1) * (k + 2) / 2));
    std::vector<double> x2(x2_.begin(), x2_.begin() + static_cast<std::ptrdiff_t>(k * (k + 1) / 2));
    return CoefficientDraw(band, std::move(x1), std::move(x2));
}

HarmonicCoefficients CoefficientDraw::scaled(const AngularPowerSpectrum& spectrum) const {
    HarmonicCoefficients c(kappa_);
    for (int l = 0; l <= kappa_; ++l) {
        const double a = spectrum.value(l);
        const double g0 = std::sqrt(a);
        const double g = std::sqrt(2.0 * a);
        c.cos_coeff(l, 0) = g0 * x1(l, 0);
        for (int m = 1; m <= l; ++m) {
            c.cos_coeff(l, m) = g * x1(l, m);
            c.sin_coeff(l, m) = g * x2(l, m);
        }
    }
    return c;
}

CoefficientDraw draw_coefficients(int kappa, const RngStream& rng, std::uint64_t sample_index,
                                  std::uint32_t step) {
    check_band(kappa);
    const auto k = static_cast<std::size_t>(kappa);
    std::vector<double> x1((k + 1) * (k + 2) / 2);
    std::vector<double> x2(k * (k + 1) / 2);
    std::size_t i2 = 0;
    for (int l = 0; l <= kappa; ++l) {
        for (int m = 0; m <= l; ++m) {
            const auto [z1, z2] = rng.normal_pair({sample_index, l, m, step});
            x1[tri_index(l, m)] = z1;
            if (m > 0) x2[i2++] = z2;
        }
    }
    return CoefficientDraw(kappa, std::move(x1), std::move(x2));
}

SynthesisPlan::SynthesisPlan(SphereGrid grid, int kappa)
    : grid_(std::move(grid)), kappa_(kappa), tri_(tri_size(kappa)) {
    check_band(kappa);
    const int nt = grid_.n_theta();
    const int np = grid_.n_phi();
    legendre_.resize(tri_ * static_cast<std::size_t>(nt));
    for (int i = 0; i < nt; ++i) {
        assoc_legendre_normalized_all(
            kappa, grid_.thetas()[static_cast<std::size_t>(i)],
            std::span<double>(legendre_.data() + static_cast<std::size_t>(i) * tri_, tri_));
    }
    const auto rows = static_cast<std::size_t>(kappa + 1) * static_cast<std::size_t>(np);
    cos_.resize(rows);
    sin_.resize(rows);
    for (int m = 0; m <= kappa; ++m) {
        for (int j = 0; j < np; ++j) {
            const double angle = m * grid_.phis()[static_cast<std::size_t>(j)];
            const auto idx = static_cast<std::size_t>(m) * static_cast<std::size_t>(np) +
                             static_cast<std::size_t>(j);
            cos_[idx] = std::cos(angle);
            sin_[idx] = std::sin(angle);
        }
    }
}

FieldSample synthesize_to(const HarmonicCoefficients& coeffs, const SynthesisPlan& plan, int ell_max,
                       int threads) {
    if (ell_max < 0 || ell_max > plan.kappa()) {
        throw ConfigError("synthesis degree exceeds the plan's band limit");
    }
    const int lmax = std::min(ell_max, coeffs.kappa);
    FieldSample field(plan.grid());
    const int nt = plan.grid().n_theta();
    const int np = plan.grid().n_phi();
    parallel_for(static_cast<std::size_t>(nt), threads, [&](std::size_t row) {
        const int i = static_cast<int>(row);
        const double* leg = plan.legendre_row(i);
        std::vector<double> a(static_cast<std::size_t>(lmax) + 1, 0.0);
        std::vector<double> b(static_cast<std::size_t>(lmax) + 1, 0.0);
        for (int m = 0; m <= lmax; ++m) {
            double sa = 0.0;
            double sb = 0.0;
            for (int l = m; l <= lmax; ++l) {
                const std::size_t t = tri_index(l, m);
                sa += coeffs.c1[t] * leg[t];
                sb += coeffs.c2[t] * leg[t];
            }
            a[static_cast<std::size_t>(m)] = sa;
            b[static_cast<std::size_t>(m)] = sb;
        }
        double* out = field.values.data() + row * static_cast<std::size_t>(np);
        std::fill_n(out, np, a[0]);
        for (int m = 1; m <= lmax; ++m) {
            const double am = a[static_cast<std::size_t>(m)];
            const double bm = b[static_cast<std::size_t>(m)];
            const double* cs = plan.cos_row(m);
            const double* sn = plan.sin_row(m);
            for (int j = 0; j < np; ++j) out[j] += am * cs[j] + bm * sn[j];
        }
    });
    return field;
}

FieldSample synthesize(const HarmonicCoefficients& coeffs, const SynthesisPlan& plan, int threads) {
    return synthesize_to(coeffs, plan, std::min(coeffs.kappa, plan.kappa()), threads);
}

FieldSample synthesize(const CoefficientDraw& draw, const AngularPowerSpectrum& spectrum,
                       const SphereGrid& grid, int threads) {
    const SynthesisPlan plan(grid, draw.kappa());
    return synthesize_to(draw.scaled(spectrum), plan, draw.kappa(), threads);
}

double evaluate_point(const HarmonicCoefficients& coeffs, double theta, double phi) {
    std::vector<double> leg(coeffs.c1.size());
    assoc_legendre_normalized_all(coeffs.kappa, theta, leg);
    double value = 0.0;
    for (int m = 0; m <= coeffs.kappa; ++m) {
        double sa = 0.0;
        double sb = 0.0;
        for (int l = m; l <= coeffs.kappa; ++l) {
            const std::size_t t = tri_index(l, m);
            sa += coeffs.c1[t] * leg[t];
            sb += coeffs.c2[t] * leg[t];
        }
        value += m == 0 ? sa : sa * std::cos(m * phi) + sb * std::sin(m * phi);
    }
    return value;
}

FieldSample lognormal_transform(const FieldSample& field) {
    FieldSample out(field.grid);
    std::size_t overflow = 0;
    for (std::size_t k = 0; k < field.values.size(); ++k) {
        const double v = field.values[k];
        if (v > 700.0) ++overflow;
        out.values[k] = std::exp(v);
    }
    if (overflow > 0) {
        throw RangeError("lognormal transform: " + std::to_string(overflow) +
                         " value(s) exceed 700 and would overflow");
    }
    return out;
}

void export_deformed_mesh(const FieldSample& field, const std::filesystem::path& path) {
    const int nt = field.grid.n_theta();
    const int np = field.grid.n_phi();
    for (double v : field.values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw RangeError("deformed mesh needs positive finite radii");
        }
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open mesh file " + path.string());

    const auto ring_mean = [&](int i) {
        double s = 0.0;
        for (int j = 0; j < np; ++j) s += field.at(i, j);
        return s / np;
    };
    char buf[128];
    const auto vertex = [&](double r, double x, double y, double z) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", r * x, r * y, r * z);
        out << buf;
    };
    out << "# deformed sphere: " << nt << "x" << np << " grid + 2 poles\n";
    vertex(ring_mean(0), 0.0, 0.0, 1.0);
    for (int i = 0; i < nt; ++i) {
        const double th = field.grid.thetas()[static_cast<std::size_t>(i)];
        for (int j = 0; j < np; ++j) {
            const double ph = field.grid.phis()[static_cast<std::size_t>(j)];
            vertex(field.at(i, j), std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                   std::cos(th));
        }
    }
    vertex(ring_mean(nt - 1), 0.0, 0.0, -1.0);

    // OBJ indices are 1-based; north pole is 1, south pole is nt*np + 2.
    const auto idx = [&](int i, int j) { return 2 + i * np + ((j % np + np) % np); };
    const int north = 1;
    const int south = nt * np + 2;
    for (int j = 0; j < np; ++j) {
        out << "f " << north << ' ' << idx(0, j) << ' ' << idx(0, j + 1) << '\n';
    }
    for (int i = 0; i + 1 < nt; ++i) {
        for (int j = 0; j < np; ++j) {
            out << "f " << idx(i, j) << ' ' << idx(i + 1, j) << ' ' << idx(i + 1, j + 1) << ' '
                << idx(i, j + 1) << '\n';
        }
    }
    for (int j = 0; j < np; ++j) {
        out << "f " << south << ' ' << idx(nt - 1, j + 1) << ' ' << idx(nt - 1, j) << '\n';
    }
    if (!out) throw IoError("failed writing mesh file " + path.string());
}

}  // namespace sphgrf
