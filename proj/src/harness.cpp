#include "sphgrf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "sphgrf/errors.hpp"
#include "sphgrf/field_io.hpp"
#include "sphgrf/heat.hpp"
#include "sphgrf/parallel.hpp"
#include "sphgrf/sampler.hpp"

namespace sphgrf {

namespace {

bool is_heat(ExperimentKind k) { return k == ExperimentKind::heat_ms || k == ExperimentKind::heat_path; }
bool is_path(ExperimentKind k) { return k == ExperimentKind::grf_path || k == ExperimentKind::heat_path; }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SampleErrors {
    std::vector<double> l2;
    std::vector<double> sup;
};

// Coefficients of the reference expansion (band kappa_ref) for one sample.
using CoefficientSource = std::function<HarmonicCoefficients(std::uint64_t sample)>;

void fit_into(ErrorTable& table) {
    std::vector<double> k, k1, l2, sup;
    for (const auto& r : table.rows) {
        k.push_back(r.kappa);
        k1.push_back(r.kappa + 1.0);
        l2.push_back(r.err_l2);
        sup.push_back(r.err_sup);
    }
    const auto slope_or_nan = [](std::span<const double> x, std::span<const double> e,
                                 double* intercept = nullptr) {
        try {
            const RateFit f = fit_rate(x, e);
            if (intercept) *intercept = f.intercept;
            return f.slope;
        } catch (const ConfigError&) {
            if (intercept) *intercept = kNaN;
            return kNaN;
        }
    };
    table.fitted_slope_l2 = slope_or_nan(k1, l2, &table.fitted_intercept_l2);
    table.fitted_slope_sup = slope_or_nan(k1, sup);
    table.fitted_slope_l2_vs_kappa = slope_or_nan(k, l2);
    table.fitted_slope_sup_vs_kappa = slope_or_nan(k, sup);
}

ErrorTable run_coupled(const ExperimentConfig& config, const CoefficientSource& source) {
    const SynthesisPlan plan(config.make_grid(), config.kappa_ref);
    const auto n = static_cast<std::size_t>(config.n_samples);
    const std::size_t nk = config.kappas.size();
    std::vector<SampleErrors> per_sample(n);

    parallel_for(n, config.threads, [&](std::size_t s) {
        const HarmonicCoefficients coeffs = source(static_cast<std::uint64_t>(s));
        const FieldSample reference = synthesize_to(coeffs, plan, config.kappa_ref);
        SampleErrors& e = per_sample[s];
        e.l2.resize(nk);
        e.sup.resize(nk);
        for (std::size_t k = 0; k < nk; ++k) {
            const FieldSample approx = synthesize_to(coeffs, plan, config.kappas[k]);
            const GridNorms norms = grid_norms(reference, approx);
            e.l2[k] = norms.l2;
            e.sup[k] = norms.sup;
        }
    });

    ErrorTable table;
    table.kind = config.kind;
    table.theoretical_slope = config.theoretical_slope();
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < nk; ++k) {
        double ms_l2 = 0.0;
        double ms_sup = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            ms_l2 += per_sample[s].l2[k] * per_sample[s].l2[k];
            ms_sup += per_sample[s].sup[k] * per_sample[s].sup[k];
        }
        ms_l2 /= nd;
        ms_sup /= nd;
        double var = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double d = per_sample[s].l2[k] * per_sample[s].l2[k] - ms_l2;
            var += d * d;
        }
        var = n > 1 ? var / (nd - 1.0) : 0.0;

        ErrorRow row;
        row.kappa = config.kappas[k];
        row.err_l2 = std::sqrt(ms_l2);
        row.err_sup = std::sqrt(ms_sup);
        row.mean_sq_l2 = ms_l2;
        row.stderr_mean_sq_l2 = std::sqrt(var / nd);
        row.stderr_l2 = row.err_l2 > 0.0 ? row.stderr_mean_sq_l2 / (2.0 * row.err_l2) : 0.0;
        table.rows.push_back(row);
    }
    fit_into(table);
    return table;
}

CoefficientSource grf_source(const ExperimentConfig& config) {
    return [spectrum = config.resolved_spectrum(), rng = RngStream(config.seed),
            kref = config.kappa_ref](std::uint64_t s) {
        return draw_coefficients(kref, rng, s).scaled(spectrum);
    };
}

CoefficientSource heat_source(const ExperimentConfig& config) {
    return [qspec = QWienerSpec(config.resolved_spectrum()), rng = RngStream(config.seed),
            grid = TimeGrid::uniform(config.t_end, config.steps),
            kref = config.kappa_ref](std::uint64_t s) {
        return evolve(ModeState(kref), grid, qspec, rng, s).coeffs;
    };
}

void require_kind(const ExperimentConfig& config, ExperimentKind kind) {
    config.validate();
    if (config.kind != kind) {
        throw ConfigError("experiment kind " + to_string(config.kind) + " passed to runner for " +
                          to_string(kind));
    }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::grf_ms: return "grf_ms";
        case ExperimentKind::grf_path: return "grf_path";
        case ExperimentKind::heat_ms: return "heat_ms";
        case ExperimentKind::heat_path: return "heat_path";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
    std::string t = text;
    std::replace(t.begin(), t.end(), '-', '_');
    for (auto k : {ExperimentKind::grf_ms, ExperimentKind::grf_path, ExperimentKind::heat_ms,
                   ExperimentKind::heat_path}) {
        if (to_string(k) == t) return k;
    }
    throw ConfigError("unknown experiment kind '" + text + "'");
}

void ExperimentConfig::validate() const {
    if (kappas.empty()) throw ConfigError("kappas must not be empty");
    for (std::size_t k = 0; k < kappas.size(); ++k) {
        if (kappas[k] < 0) throw ConfigError("kappas must be nonnegative");
        if (k > 0 && kappas[k] <= kappas[k - 1]) throw ConfigError("kappas must be increasing");
    }
    if (kappa_ref < 0 || kappa_ref > kMaxBandLimit) throw ConfigError("kappa_ref out of range");
    if (kappas.back() >= kappa_ref) {
        throw ConfigError("every kappa must be below kappa_ref (" + std::to_string(kappa_ref) + ")");
    }
    if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
    if (is_path(kind) && n_samples != 1) throw ConfigError("path experiments use exactly one sample");
    if (grid_theta < 1 || grid_phi < 1) throw ConfigError("grid dimensions must be positive");
    if (!spectrum) {
        if (!(c > 0.0)) throw ConfigError("C must be > 0");
        if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
        if (!is_heat(kind) && !(alpha > 2.0)) {
            throw ConfigError("field experiments need alpha > 2 (finite variance)");
        }
    }
    if (is_heat(kind)) {
        if (!(t_end > 0.0)) throw ConfigError("time horizon must be > 0");
        if (steps < 1) throw ConfigError("steps must be >= 1");
    }
}

AngularPowerSpectrum ExperimentConfig::resolved_spectrum() const {
    return spectrum ? *spectrum : AngularPowerSpectrum::power_law(c, alpha);
}

SphereGrid ExperimentConfig::make_grid() const {
    return grid_kind == GridKind::gauss_latitudes ? SphereGrid::gauss_latitudes(grid_theta, grid_phi)
                                                  : SphereGrid::equiangular(grid_theta, grid_phi);
}

double ExperimentConfig::theoretical_slope() const {
    if (spectrum && spectrum->band_limited()) return kNaN;
    return is_heat(kind) ? -alpha / 2.0 : -(alpha - 2.0) / 2.0;
}

std::string ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = to_string(kind);
    if (spectrum) {
        j["spectrum"] = spectrum->table();
    } else {
        j["alpha"] = alpha;
        j["C"] = c;
    }
    j["kappas"] = kappas;
    j["kappa_ref"] = kappa_ref;
    j["samples"] = n_samples;
    j["grid"] = std::to_string(grid_theta) + "x" + std::to_string(grid_phi);
    j["grid_kind"] = grid_kind == GridKind::gauss_latitudes ? "gauss" : "equiangular";
    if (is_heat(kind)) {
        j["t"] = t_end;
        j["steps"] = steps;
    }
    j["seed"] = seed;
    j["aggregation"] = "rms";
    j["slope_abscissa"] = "kappa+1";
    return j.dump(2);
}

RateFit fit_rate(std::span<const double> x, std::span<const double> err) {
    if (x.size() != err.size()) throw ConfigError("fit_rate: size mismatch");
    if (x.size() < 2) throw ConfigError("fit_rate: need at least two rows");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(err[i] > 0.0) || !std::isfinite(err[i])) {
            throw ConfigError("fit_rate: abscissae and errors must be positive");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(err[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("fit_rate: abscissae are all equal");
    RateFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (f.intercept + f.slope * lx[i]);
        rss += r * r;
    }
    f.residual = std::sqrt(rss / static_cast<double>(n));
    return f;
}

std::string ErrorTable::to_csv() const {
    std::ostringstream out;
    out << "kappa,err_sup,err_l2,stderr_l2\n";
    for (const auto& r : rows) {
        out << r.kappa << ',' << format_double(r.err_sup) << ',' << format_double(r.err_l2) << ','
            << format_double(r.stderr_l2) << '\n';
    }
    return out.str();
}

ErrorTable run_grf_ms(const ExperimentConfig& config) {
    require_kind(config, ExperimentKind::grf_ms);
    return run_coupled(config, grf_source(config));
}

ErrorTable run_grf_path(const ExperimentConfig& config) {
    require_kind(config, ExperimentKind::grf_path);
    return run_coupled(config, grf_source(config));
}

ErrorTable run_heat_ms(const ExperimentConfig& config) {
    require_kind(config, ExperimentKind::heat_ms);
    return run_coupled(config, heat_source(config));
}

ErrorTable run_heat_path(const ExperimentConfig& config) {
    require_kind(config, ExperimentKind::heat_path);
    return run_coupled(config, heat_source(config));
}

ErrorTable run_experiment(const ExperimentConfig& config) {
    switch (config.kind) {
        case ExperimentKind::grf_ms: return run_grf_ms(config);
        case ExperimentKind::grf_path: return run_grf_path(config);
        case ExperimentKind::heat_ms: return run_heat_ms(config);
        case ExperimentKind::heat_path: return run_heat_path(config);
    }
    throw ConfigError("unknown experiment kind");
}

double analytic_mean_square_error(const ExperimentConfig& config, int kappa) {
    const AngularPowerSpectrum spectrum = config.resolved_spectrum();
    double sum = 0.0;
    for (int l = kappa + 1; l <= config.kappa_ref; ++l) {
        double a = spectrum.value(l);
        if (is_heat(config.kind)) a *= sigma2(l, config.t_end);
        sum += (2.0 * l + 1.0) * a;
    }
    return sum;
}

std::string render_svg(const ErrorTable& table, const std::string& title) {
    constexpr double kW = 800.0, kH = 600.0;
    constexpr double kLeft = 90.0, kRight = 30.0, kTop = 50.0, kBottom = 70.0;
    const double pw = kW - kLeft - kRight;
    const double ph = kH - kTop - kBottom;

    std::vector<double> xs, ys;
    for (const auto& r : table.rows) {
        if (r.err_l2 > 0.0) {
            xs.push_back(std::log10(r.kappa + 1.0));
            ys.push_back(std::log10(r.err_l2));
        }
    }
    char buf[256];
    std::ostringstream svg;
    const auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    svg << "<title>" << title << "</title>\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    // Frame as a path so that <line> elements are reserved for the two fits.
    svg << "<path d=\"M" << fmt(kLeft) << ' ' << fmt(kTop) << " V" << fmt(kTop + ph) << " H"
        << fmt(kLeft + pw) << "\" stroke=\"black\" fill=\"none\"/>\n";
    svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kH - 20)
        << "\" text-anchor=\"middle\" font-size=\"16\">kappa + 1 (retained degrees, log scale)</text>\n";
    svg << "<text x=\"25\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"16\" "
        << "transform=\"rotate(-90 25 " << fmt(kTop + ph / 2) << ")\">RMS L2 error (log scale)</text>\n";
    svg << "<text x=\"" << fmt(kW / 2) << "\" y=\"30\" text-anchor=\"middle\" font-size=\"18\">"
        << title << "</text>\n";

    if (xs.empty()) {
        svg << "<text x=\"400\" y=\"300\" text-anchor=\"middle\">no positive errors</text>\n</svg>\n";
        return svg.str();
    }

    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    double x0 = std::floor(*xmin_it * 10.0) / 10.0, x1 = std::ceil(*xmax_it * 10.0) / 10.0;
    if (x1 <= x0) x1 = x0 + 1.0;
    double y0 = std::floor(*std::min_element(ys.begin(), ys.end()));
    double y1 = std::ceil(*std::max_element(ys.begin(), ys.end()));
    if (y1 <= y0) y1 = y0 + 1.0;
    const auto px = [&](double lx) { return kLeft + (lx - x0) / (x1 - x0) * pw; };
    const auto py = [&](double ly) { return kTop + ph - (ly - y0) / (y1 - y0) * ph; };

    for (int d = static_cast<int>(y0); d <= static_cast<int>(y1); ++d) {
        svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(d) + 5)
            << "\" text-anchor=\"end\" font-size=\"12\">1e" << d << "</text>\n";
    }
    for (const auto& r : table.rows) {
        const double lx = std::log10(r.kappa + 1.0);
        svg << "<text x=\"" << fmt(px(lx)) << "\" y=\"" << fmt(kTop + ph + 18)
            << "\" text-anchor=\"middle\" font-size=\"12\">" << r.kappa + 1 << "</text>\n";
    }

    const bool have_fit = std::isfinite(table.fitted_slope_l2);
    if (have_fit) {
        // log10 line: y = (b + s ln x) / ln 10 with x = 10^lx
        const double s = table.fitted_slope_l2;
        const double b = table.fitted_intercept_l2 / std::log(10.0);
        svg << "<line class=\"fit\" x1=\"" << fmt(px(x0)) << "\" y1=\"" << fmt(py(b + s * x0))
            << "\" x2=\"" << fmt(px(x1)) << "\" y2=\"" << fmt(py(b + s * x1))
            << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    }
    if (have_fit && std::isfinite(table.theoretical_slope)) {
        // Reference line through the centroid of the data.
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        const double s = table.theoretical_slope;
        svg << "<line class=\"reference\" x1=\"" << fmt(px(x0)) << "\" y1=\""
            << fmt(py(my + s * (x0 - mx))) << "\" x2=\"" << fmt(px(x1)) << "\" y2=\""
            << fmt(py(my + s * (x1 - mx)))
            << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"8 4\"/>\n";
    }
    svg << "<g class=\"points\" fill=\"black\">\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        svg << "<circle cx=\"" << fmt(px(xs[i])) << "\" cy=\"" << fmt(py(ys[i])) << "\" r=\"4\"/>\n";
    }
    svg << "</g>\n";
    std::snprintf(buf, sizeof buf, "fitted slope %.3f, theoretical %.3f", table.fitted_slope_l2,
                  table.theoretical_slope);
    svg << "<text x=\"" << fmt(kLeft + pw - 10) << "\" y=\"" << fmt(kTop + 20)
        << "\" text-anchor=\"end\" font-size=\"14\">" << buf << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_report(const ErrorTable& table, const std::filesystem::path& prefix,
                 const std::string& title) {
    if (table.rows.empty()) throw ConfigError("emit_report: table has no rows");
    const std::string csv = table.to_csv();
    const std::string svg = render_svg(table, title);
    const auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot open " + p.string());
        out << text;
        if (!out) throw IoError("failed writing " + p.string());
    };
    auto csv_path = prefix;
    csv_path += ".csv";
    auto svg_path = prefix;
    svg_path += ".svg";
    write(csv_path, csv);
    write(svg_path, svg);
}

}  // namespace sphgrf
