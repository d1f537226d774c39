#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphgrf/grid.hpp"
#include "sphgrf/spectrum.hpp"

namespace sphgrf {

enum class ExperimentKind { grf_ms, grf_path, heat_ms, heat_path };

[[nodiscard]] std::string to_string(ExperimentKind kind);
/// Accepts "grf_ms" and "grf-ms" spellings.
[[nodiscard]] ExperimentKind parse_experiment_kind(const std::string& text);

/// Convergence experiment: coupled truncations T^kappa of one reference
/// expansion at kappa_ref, compared on a grid.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::grf_ms;
    double alpha = 3.0;
    double c = 1.0;
    /// Replaces the power law C (l+1)^{-alpha} when set.
    std::optional<AngularPowerSpectrum> spectrum;
    std::vector<int> kappas = {2, 4, 8, 16, 32, 64};
    int kappa_ref = 128;
    int n_samples = 1000;
    int grid_theta = 64;
    int grid_phi = 128;
    GridKind grid_kind = GridKind::equiangular;
    /// Heat equation horizon and number of uniform steps.
    double t_end = 1.0;
    int steps = 1;
    std::uint64_t seed = 0;
    /// Worker count; never affects results.
    int threads = 1;

    /// Throws ConfigError on invalid combinations.
    void validate() const;
    [[nodiscard]] AngularPowerSpectrum resolved_spectrum() const;
    [[nodiscard]] SphereGrid make_grid() const;
    [[nodiscard]] double theoretical_slope() const;
    /// JSON object text (threads excluded: it does not change results).
    [[nodiscard]] std::string to_json() const;
};

struct ErrorRow {
    int kappa = 0;
    /// RMS over samples of the grid sup-norm error.
    double err_sup = 0.0;
    /// RMS over samples of the L2(S^2) error.
    double err_l2 = 0.0;
    /// Standard error of err_l2 (delta method from the mean-square estimate).
    double stderr_l2 = 0.0;
    /// Monte Carlo mean of ||T^ref - T^kappa||^2 and its standard error.
    double mean_sq_l2 = 0.0;
    double stderr_mean_sq_l2 = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Root-mean-square residual of log(err).
    double residual = 0.0;
};

/// Ordinary least squares of log(err) on log(x). Throws ConfigError for fewer
/// than two rows, nonpositive values, or constant x.
[[nodiscard]] RateFit fit_rate(std::span<const double> x, std::span<const double> err);

struct ErrorTable {
    ExperimentKind kind = ExperimentKind::grf_ms;
    std::vector<ErrorRow> rows;
    /// Slopes fitted against log(kappa + 1), the number of retained degrees;
    /// NaN when the errors cannot be fitted (e.g. all zero).
    double fitted_slope_sup = 0.0;
    double fitted_slope_l2 = 0.0;
    double fitted_intercept_l2 = 0.0;
    /// The same fits against log(kappa).
    double fitted_slope_sup_vs_kappa = 0.0;
    double fitted_slope_l2_vs_kappa = 0.0;
    double theoretical_slope = 0.0;

    [[nodiscard]] std::string to_csv() const;
};

[[nodiscard]] ErrorTable run_grf_ms(const ExperimentConfig& config);
[[nodiscard]] ErrorTable run_grf_path(const ExperimentConfig& config);
[[nodiscard]] ErrorTable run_heat_ms(const ExperimentConfig& config);
[[nodiscard]] ErrorTable run_heat_path(const ExperimentConfig& config);
/// Dispatches on config.kind.
[[nodiscard]] ErrorTable run_experiment(const ExperimentConfig& config);

/// Exact E||T^ref - T^kappa||^2: sum_{kappa < l <= kappa_ref} (2l+1) A_l for
/// the field kinds, with A_l sigma2(l, T) for the heat kinds (zero initial data).
[[nodiscard]] double analytic_mean_square_error(const ExperimentConfig& config, int kappa);

/// SVG log-log plot (800x600): L2 error points, fitted line, and reference
/// line with the theoretical slope.
[[nodiscard]] std::string render_svg(const ErrorTable& table, const std::string& title);

/// Writes <prefix>.csv ("kappa,err_sup,err_l2,stderr_l2") and <prefix>.svg.
/// Throws before writing anything if the table has no rows.
void emit_report(const ErrorTable& table, const std::filesystem::path& prefix,
                 const std::string& title = "truncation error");

}  // namespace sphgrf
