#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphgrf/errors.hpp"
#include "sphgrf/field_io.hpp"
#include "sphgrf/harness.hpp"
#include "sphgrf/heat.hpp"
#include "sphgrf/sampler.hpp"
#include "sphgrf/spectrum.hpp"

namespace sphgrf::cli {

namespace fs = std::filesystem;

namespace {

struct Global {
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int threads = 1;
};

struct SpectrumOpts {
    double alpha = 3.0;
    double c = 1.0;
    std::string spectrum_csv;

    [[nodiscard]] AngularPowerSpectrum resolve() const {
        if (!spectrum_csv.empty()) return AngularPowerSpectrum::load_csv(spectrum_csv);
        return AngularPowerSpectrum::power_law(c, alpha);
    }
};

struct GridOpts {
    std::string grid = "64x128";
    std::string kind = "equiangular";

    [[nodiscard]] std::pair<int, int> dims() const {
        const auto x = grid.find('x');
        if (x == std::string::npos) throw ConfigError("--grid expects NTHETAxNPHI, got " + grid);
        try {
            std::size_t used = 0;
            const int nt = std::stoi(grid.substr(0, x), &used);
            if (used != x) throw std::invalid_argument(grid);
            const std::string rest = grid.substr(x + 1);
            const int np = std::stoi(rest, &used);
            if (used != rest.size()) throw std::invalid_argument(grid);
            if (nt < 1 || np < 1) throw std::invalid_argument(grid);
            return {nt, np};
        } catch (const std::logic_error&) {
            throw ConfigError("--grid expects positive NTHETAxNPHI, got " + grid);
        }
    }
    [[nodiscard]] GridKind grid_kind() const {
        return kind == "gauss" ? GridKind::gauss_latitudes : GridKind::equiangular;
    }
    [[nodiscard]] SphereGrid make() const {
        const auto [nt, np] = dims();
        return grid_kind() == GridKind::gauss_latitudes ? SphereGrid::gauss_latitudes(nt, np)
                                                        : SphereGrid::equiangular(nt, np);
    }
};

void add_spectrum(CLI::App* sub, SpectrumOpts& s) {
    sub->add_option("--alpha", s.alpha, "power-law decay: A_l = C (l+1)^-alpha")
        ->capture_default_str();
    sub->add_option("--c", s.c, "power-law constant C")->capture_default_str();
    sub->add_option("--spectrum-csv", s.spectrum_csv, "tabulated spectrum, two columns l,A_l");
}

void add_grid(CLI::App* sub, GridOpts& g) {
    sub->add_option("--grid", g.grid, "NTHETAxNPHI")->capture_default_str();
    sub->add_option("--grid-kind", g.kind, "equiangular | gauss")
        ->check(CLI::IsMember({"equiangular", "gauss"}))
        ->capture_default_str();
}

fs::path in_out_dir(const Global& g, const std::string& name) {
    const fs::path p(name);
    return p.is_absolute() ? p : fs::path(g.out_dir) / p;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string());
    out << text;
    if (!out) throw IoError("failed writing " + p.string());
}

// Resolved configuration of the parsed subcommand: every option that was
// given or has a default, as the string that reproduces it.
nlohmann::ordered_json resolved_config(const CLI::App& root, const CLI::App& sub,
                                       const Global& g) {
    nlohmann::ordered_json j;
    j["subcommand"] = sub.get_name();
    j["seed"] = std::to_string(g.seed);
    nlohmann::ordered_json opts = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help") continue;
        if (opt->get_expected_min() == 0) {
            opts[name] = opt->count() > 0;
        } else if (opt->count() > 0) {
            const auto& res = opt->results();
            opts[name] = res.size() == 1 ? res.front() : [&] {
                std::string joined;
                for (std::size_t k = 0; k < res.size(); ++k) joined += (k ? "," : "") + res[k];
                return joined;
            }();
        } else if (!opt->get_default_str().empty()) {
            opts[name] = opt->get_default_str();
        }
    }
    j["options"] = opts;
    (void)root;
    return j;
}

void write_field(const FieldSample& f, const std::string& format, const fs::path& stem) {
    if (format == "bin") {
        auto p = stem;
        p += ".bin";
        write_field_binary(f, p);
    } else {
        auto p = stem;
        p += ".csv";
        write_field_csv(f, p);
    }
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw ConfigError("expected a comma-separated integer list, got '" + text + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty integer list");
    return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             int depth);

int replay(const std::string& path, const Global& g, bool seed_given, std::ostream& out,
           std::ostream& err, int depth) {
    if (depth > 0) throw ConfigError("replay cannot be nested");
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed run.json: ") + e.what());
    }
    std::vector<std::string> argv;
    argv.push_back("--seed");
    argv.push_back(seed_given ? std::to_string(g.seed) : j.at("seed").get<std::string>());
    argv.push_back("--out-dir");
    argv.push_back(g.out_dir);
    argv.push_back("--threads");
    argv.push_back(std::to_string(g.threads));
    argv.push_back(j.at("subcommand").get<std::string>());
    for (const auto& [name, value] : j.at("options").items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) argv.push_back("--" + name);
        } else {
            argv.push_back("--" + name);
            argv.push_back(value.get<std::string>());
        }
    }
    return dispatch(argv, out, err, depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             int depth) {
    CLI::App app{"sphgrf: random fields and heat equation on the sphere",
                 "sphgrf"};
    app.require_subcommand(1);
    Global g;
    auto* seed_opt = app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    // sample / lognormal
    SpectrumOpts s_spec;
    GridOpts s_grid;
    int s_kappa = 100;
    std::string s_format = "csv";
    bool s_lognormal = false;
    std::string s_mesh;
    std::uint64_t s_index = 0;
    auto setup_sample = [&](CLI::App* sub, bool with_flag) {
        add_spectrum(sub, s_spec);
        sub->add_option("--kappa", s_kappa, "band limit")->capture_default_str();
        add_grid(sub, s_grid);
        sub->add_option("--format", s_format, "csv | bin")
            ->check(CLI::IsMember({"csv", "bin"}))
            ->capture_default_str();
        if (with_flag) sub->add_flag("--lognormal", s_lognormal, "apply exp() to the field");
        sub->add_option("--mesh", s_mesh, "write deformed-sphere OBJ (lognormal radius)");
        sub->add_option("--sample-index", s_index, "Monte Carlo sample index")
            ->capture_default_str();
    };
    auto* sample = app.add_subcommand("sample", "draw one field sample");
    setup_sample(sample, true);
    auto* lognormal = app.add_subcommand("lognormal", "draw one lognormal field sample");
    setup_sample(lognormal, false);

    // kernel
    SpectrumOpts k_spec;
    int k_band = 64;
    int k_n = 1;
    double k_eta = -1.0;
    int k_points = 181;
    auto* kernel = app.add_subcommand("kernel", "covariance kernel and norm identities");
    add_spectrum(kernel, k_spec);
    kernel->add_option("--band", k_band, "band limit for partial sums")->capture_default_str();
    kernel->add_option("--n", k_n, "derivative order for the norm identity")
        ->check(CLI::IsMember({0, 1, 2}))
        ->capture_default_str();
    auto* eta_opt = kernel->add_option("--sobolev-eta", k_eta, "equivalent-norm exponent");
    kernel->add_option("--points", k_points, "number of distances in [0, pi]")
        ->check(CLI::Range(2, 1000000))
        ->capture_default_str();

    // regularity
    SpectrumOpts r_spec;
    auto* regularity = app.add_subcommand("regularity", "sample regularity report (JSON)");
    add_spectrum(regularity, r_spec);

    // heat
    SpectrumOpts h_spec;
    GridOpts h_grid;
    int h_kappa = 64;
    double h_t = 1.0;
    int h_steps = 1;
    std::string h_format = "csv";
    std::uint64_t h_index = 0;
    auto* heat = app.add_subcommand("heat", "stochastic heat equation, zero initial data");
    add_spectrum(heat, h_spec);
    heat->add_option("--kappa", h_kappa, "band limit")->capture_default_str();
    heat->add_option("--t", h_t, "time horizon")->capture_default_str();
    heat->add_option("--steps", h_steps, "uniform time steps")->capture_default_str();
    add_grid(heat, h_grid);
    heat->add_option("--format", h_format, "csv | bin")
        ->check(CLI::IsMember({"csv", "bin"}))
        ->capture_default_str();
    heat->add_option("--sample-index", h_index, "trajectory index")->capture_default_str();

    // converge
    SpectrumOpts c_spec;
    GridOpts c_grid;
    std::string c_kind = "grf-ms";
    std::string c_kappas = "2,4,8,16,32,64";
    int c_kref = 128;
    int c_samples = 1000;
    double c_t = 1.0;
    int c_steps = 1;
    std::string c_prefix = "converge";
    auto* converge = app.add_subcommand("converge", "truncation-error convergence experiment");
    converge->add_option("--kind", c_kind, "grf-ms | grf-path | heat-ms | heat-path")
        ->check(CLI::IsMember({"grf-ms", "grf-path", "heat-ms", "heat-path", "grf_ms", "grf_path",
                               "heat_ms", "heat_path"}))
        ->capture_default_str();
    add_spectrum(converge, c_spec);
    converge->add_option("--kappas", c_kappas, "comma-separated truncation degrees")
        ->capture_default_str();
    converge->add_option("--kappa-ref", c_kref, "reference band limit")->capture_default_str();
    converge->add_option("--samples", c_samples, "Monte Carlo samples")->capture_default_str();
    converge->add_option("--t", c_t, "heat: time horizon")->capture_default_str();
    converge->add_option("--steps", c_steps, "heat: uniform time steps")->capture_default_str();
    add_grid(converge, c_grid);
    converge->add_option("--prefix", c_prefix, "output file prefix")->capture_default_str();

    // replay
    std::string replay_path;
    auto* replay_cmd = app.add_subcommand("replay", "re-run a recorded run.json");
    replay_cmd->add_option("run_json", replay_path, "path to run.json")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    if (replay_cmd->parsed()) {
        return replay(replay_path, g, seed_opt->count() > 0, out, err, depth);
    }

    std::error_code ec;
    fs::create_directories(g.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + g.out_dir);

    const CLI::App* active = app.get_subcommands().front();
    const RngStream rng(g.seed);

    if (sample->parsed() || lognormal->parsed()) {
        const bool to_lognormal = lognormal->parsed() || s_lognormal;
        if (s_kappa < 0) throw ConfigError("--kappa must be >= 0");
        const AngularPowerSpectrum spectrum = s_spec.resolve();
        const SphereGrid grid = s_grid.make();
        const CoefficientDraw draw = draw_coefficients(s_kappa, rng, s_index);
        FieldSample field = synthesize(draw, spectrum, grid, g.threads);
        if (to_lognormal) field = lognormal_transform(field);
        write_field(field, s_format, in_out_dir(g, "field"));
        if (!s_mesh.empty()) {
            const FieldSample radius = to_lognormal ? field : lognormal_transform(field);
            export_deformed_mesh(radius, in_out_dir(g, s_mesh));
        }
        out << "wrote field (" << grid.n_theta() << "x" << grid.n_phi() << ", kappa " << s_kappa
            << ")\n";
    } else if (kernel->parsed()) {
        if (k_band < 0) throw ConfigError("--band must be >= 0");
        const AngularPowerSpectrum spectrum = k_spec.resolve();
        const BandLimit band(k_band);
        std::ostringstream csv;
        csv << "r,k,tail_bound\n";
        for (int i = 0; i < k_points; ++i) {
            const double r = i == k_points - 1 ? std::numbers::pi
                                               : std::numbers::pi * i / (k_points - 1);
            const KernelValue kv = kernel_k(spectrum, r, band);
            csv << format_double(r) << ',' << format_double(kv.value) << ','
                << format_double(kv.tail_bound) << '\n';
        }
        write_text(in_out_dir(g, "kernel.csv"), csv.str());
        const QuadratureRule rule = gauss_legendre(k_band + k_n + 1);
        const double quad = weighted_deriv_norm_quadrature(spectrum, k_n, band, rule);
        const double spec = weighted_deriv_norm_spectral(spectrum, k_n, band);
        const double residual = spec != 0.0 ? std::abs(quad - spec) / std::abs(spec)
                                            : std::abs(quad - spec);
        nlohmann::ordered_json j;
        j["band"] = k_band;
        j["n"] = k_n;
        j["quadrature"] = quad;
        j["spectral"] = spec;
        j["relative_residual"] = residual;
        if (eta_opt->count() > 0) {
            const FlaggedValue v = sobolev_equiv_norm(spectrum, k_eta);
            j["sobolev_eta"] = k_eta;
            if (v.divergent) {
                j["sobolev_norm"] = nullptr;
                j["sobolev_divergent"] = true;
            } else {
                j["sobolev_norm"] = v.value;
                j["sobolev_divergent"] = false;
            }
        }
        write_text(in_out_dir(g, "norm_identity.json"), j.dump(2) + "\n");
        out << j.dump(2) << '\n';
    } else if (regularity->parsed()) {
        const AngularPowerSpectrum spectrum = r_spec.resolve();
        const std::string text = to_json(regularity_report(spectrum), spectrum) + "\n";
        write_text(in_out_dir(g, "regularity.json"), text);
        out << text;
    } else if (heat->parsed()) {
        if (h_kappa < 0) throw ConfigError("--kappa must be >= 0");
        const QWienerSpec qspec(h_spec.resolve());
        const TimeGrid tgrid = TimeGrid::uniform(h_t, h_steps);
        const SphereGrid grid = h_grid.make();
        std::ostringstream dump;
        dump << "t,ell,m,c1,c2\n";
        const ModeState final_state =
            evolve_with_dump(ModeState(h_kappa), tgrid, qspec, rng, h_index, dump);
        write_text(in_out_dir(g, "trajectory.csv"), dump.str());
        const SynthesisPlan plan(grid, h_kappa);
        write_field(synthesize(final_state.coeffs, plan, g.threads), h_format,
                    in_out_dir(g, "field"));
        out << "wrote trajectory (" << tgrid.steps() << " steps) and field at t=" << h_t << '\n';
    } else if (converge->parsed()) {
        ExperimentConfig cfg;
        cfg.kind = parse_experiment_kind(c_kind);
        cfg.alpha = c_spec.alpha;
        cfg.c = c_spec.c;
        if (!c_spec.spectrum_csv.empty()) cfg.spectrum = c_spec.resolve();
        cfg.kappas = parse_int_list(c_kappas);
        cfg.kappa_ref = c_kref;
        cfg.n_samples = c_samples;
        const auto [nt, np] = c_grid.dims();
        cfg.grid_theta = nt;
        cfg.grid_phi = np;
        cfg.grid_kind = c_grid.grid_kind();
        cfg.t_end = c_t;
        cfg.steps = c_steps;
        cfg.seed = g.seed;
        cfg.threads = g.threads;
        cfg.validate();
        const ErrorTable table = run_experiment(cfg);
        emit_report(table, in_out_dir(g, c_prefix), to_string(cfg.kind));
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "fitted slope L2 %.4f, sup %.4f (vs kappa+1); L2 %.4f, sup %.4f (vs kappa); "
                      "theoretical %.4f\n",
                      table.fitted_slope_l2, table.fitted_slope_sup, table.fitted_slope_l2_vs_kappa,
                      table.fitted_slope_sup_vs_kappa, table.theoretical_slope);
        out << buf;
    }

    write_text(in_out_dir(g, "run.json"), resolved_config(app, *active, g).dump(2) + "\n");
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err, 0);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace sphgrf::cli
