#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fiegarch/mcmc.hpp"
#include "fiegarch/model.hpp"
#include "fiegarch/priors.hpp"
#include "fiegarch/summary.hpp"

namespace fiegarch {

enum class Mode { Simulate, Estimate, Study, Example };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct KernelOverride {
    std::optional<double> sd;
    std::optional<double> lower;
    std::optional<double> upper;
};

/// Everything a run depends on. `config_echo` writes it as flat key=value
/// text that `parse_config` reads back to an identical configuration.
struct RunConfig {
    Mode mode = Mode::Study;

    // Data-generating process.
    std::vector<double> d0_grid{0.10, 0.25, 0.35, 0.45};
    std::vector<double> nu0_grid{1.1, 1.5, 1.9, 2.5, 5.0};
    double theta0 = -0.15;
    double gamma0 = 0.24;
    double omega0 = -5.4;
    std::vector<double> alpha0;
    std::vector<double> beta0;
    std::size_t n = 2000;
    std::size_t m_star = 50000;
    SimulationPresample sim_presample = SimulationPresample::Innovations;

    // Priors.
    CaseLabel prior_case = CaseLabel::C1;
    double sigma_phi = 0.15;
    std::optional<double> mu_phi;
    double a1 = 110.0;
    double a2 = 50.0;
    double a3 = 25.0;
    double c32_a1 = 10.0;  // Beta(a, b) for -theta when theta0 is not used
    double c32_b1 = 50.0;
    double c42_a2 = 100.0;  // Beta(a, b) for gamma when gamma0 is not used
    double c42_b2 = 350.0;
    std::optional<double> d_bar;      // skips the first stage when set
    std::optional<double> theta_bar;  // skips the first stage when set

    // Sampler.
    std::map<std::string, KernelOverride> kernel;  // keyed by parameter name
    std::size_t n_iter = 6000;
    std::size_t burn_in = 1000;
    std::size_t thinning = 1;
    std::size_t example_draws = 1000;
    HastingsCorrection hastings = HastingsCorrection::On;
    PresampleConvention convention = PresampleConvention::Conditional;

    // Run control.
    std::optional<std::uint64_t> seed;
    std::size_t replicates = 1;
    std::filesystem::path output_dir = ".";
    std::filesystem::path input;
    std::size_t workers = 1;
    bool write_chains = true;
    std::size_t kde_points = 256;
    std::size_t hist_bins = 50;

    std::size_t cells() const noexcept { return d0_grid.size() * nu0_grid.size() * replicates; }
};

/// Defaults for a mode. `example` runs 20,801 sweeps at stride 20 on the
/// single cell d0 = 0.25, nu0 = 1.9; `estimate` has no truth grid.
RunConfig default_config(Mode mode);

using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError.
KeyValues parse_key_values(const std::string& text, const std::string& origin = "config");
KeyValues read_config_file(const std::filesystem::path& path);

/// Applies keys on top of the mode defaults. Throws ConfigError for unknown
/// keys and malformed values.
RunConfig parse_config(Mode mode, const KeyValues& kv);

/// Canonical key=value text of every setting, sorted by key.
std::string config_echo(const RunConfig& cfg);

/// 64-bit FNV-1a of the echo without output_dir and workers, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Keys accepted by parse_config besides the per-parameter kernel keys
/// `kernel_<name>_{sd,lower,upper}`.
const std::vector<std::string>& config_keys();

/// Seeds of the series and the chain of cell k, where
/// k = (d_index * |nu0 grid| + nu_index) * replicates + replicate:
/// derive_seed(seed, 2k) and derive_seed(seed, 2k + 1).
struct CellSeeds {
    std::uint64_t series;
    std::uint64_t chain;
};
CellSeeds cell_seeds(std::uint64_t base, std::size_t cell_index);

struct Cell {
    std::size_t d_index = 0;
    std::size_t nu_index = 0;
    std::size_t replicate = 0;
    std::size_t index = 0;
    double d0 = 0.0;
    double nu0 = 0.0;
    CellSeeds seeds{};
};
std::vector<Cell> enumerate_cells(const RunConfig& cfg, std::uint64_t base_seed);

ModelSpec truth_for(const RunConfig& cfg, double d0, double nu0);

/// Catalog for `label`, with truth-pinned hyperparameters taken from
/// `truth` and two-step estimates from `d_bar` / `theta_bar`.
PriorCatalog catalog_for(const RunConfig& cfg, CaseLabel label, const std::optional<ModelSpec>& truth,
                         std::optional<double> d_bar = std::nullopt,
                         std::optional<double> theta_bar = std::nullopt);

/// Default kernel for the case with the configured overrides applied.
KernelSpec kernel_for(const RunConfig& cfg, CaseLabel label, std::size_t p, std::size_t q);

/// For C2.3, C3.3 and C5.2: the scenario whose posterior mean feeds the prior.
std::optional<CaseLabel> first_stage_of(CaseLabel label);

struct Estimation {
    CaseLabel label = CaseLabel::C1;
    ModelSpec init;
    Chain chain;
    std::vector<PosteriorSummary> summaries;
    std::optional<CaseLabel> first_stage;
    std::optional<double> first_stage_estimate;
    double seconds = 0.0;
};

/// Grid initialization, optional first stage, then the chain.
Estimation estimate_series(const RunConfig& cfg, std::span<const double> x, const std::optional<ModelSpec>& truth,
                           std::uint64_t chain_seed, std::size_t init_workers = 1);

struct CellResult {
    Cell cell;
    bool ok = false;
    std::string error;
    std::optional<Estimation> estimation;
};

/// Simulates the cell's series and estimates it. Failures are captured in
/// the result rather than thrown.
CellResult run_cell(const RunConfig& cfg, const Cell& cell);

struct SimulateOutput {
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest;
};
SimulateOutput run_simulate(const RunConfig& cfg);

struct EstimateOutput {
    Estimation estimation;
    std::filesystem::path chain_csv;
    std::filesystem::path summary_json;
    std::filesystem::path report_json;
};
EstimateOutput run_estimate(const RunConfig& cfg);

struct StudyOutput {
    std::vector<CellResult> cells;
    std::filesystem::path table_csv;
    std::filesystem::path report_json;
};
/// Throws ConfigError before writing anything when the seed is missing or
/// the grid is empty.
StudyOutput run_study(const RunConfig& cfg);

struct ExampleView {
    std::string name;  // entire, thinned, unthinned
    Chain chain;
    std::vector<PosteriorSummary> summaries;
};
struct ExampleCell {
    Cell cell;
    std::vector<ExampleView> views;
};
struct ExampleOutput {
    std::vector<ExampleCell> cells;
    std::filesystem::path table_csv;
};

/// The three views of one stored chain: every sweep, the post-burn-in chain
/// at stride `thinning` (at most N draws), and the first N post-burn-in draws.
std::vector<ExampleView> example_views(const Chain& full, std::size_t burn_in, std::size_t thinning,
                                       std::size_t n_draws, const std::optional<ModelSpec>& truth);

/// Uniform priors with theta on [-0.5, 0] and gamma on [0, 0.5], otherwise
/// as in Case 1.
PriorCatalog example_catalog();

ExampleOutput run_example(const RunConfig& cfg);

/// `fiegarch <simulate|estimate|study|example> [--config FILE] [--key value ...]`.
/// Returns 0 on success, 2 on usage errors, 1 otherwise; failures print one
/// JSON line to `err`.
int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fiegarch
