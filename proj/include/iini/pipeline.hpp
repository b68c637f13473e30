#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iini/annealer.hpp"
#include "iini/grid.hpp"
#include "iini/metric.hpp"
#include "iini/oracle.hpp"
#include "iini/relax.hpp"
#include "iini/scatter.hpp"

namespace iini {

struct EmitFlags {
    bool ascii_grid = true;
    bool csv = true;
    bool heatmap_png = true;
    bool histogram_csv = true;
    bool checkpoint_log = true;
};

/// Full pipeline configuration. Loadable from a flat `key = value` file
/// (UTF-8, `#` comments); CLI flags override file keys via apply_key.
struct RunConfig {
    std::string input;       // scatter CSV; may be empty when a ScatterSet
                             // is handed to run() directly
    double cell_size = 0.0;  // <= 0 selects the recommended size
    Regularity regularity = Regularity::Irregular;
    std::optional<double> area_hint;
    std::optional<Extent> extent;  // explicit grid footprint override

    MetricSpec metric;
    AnnealSchedule schedule;
    std::uint64_t seed = 1;
    std::uint64_t max_checkpoints = 500;
    bool parallel_segments = false;
    /// When positive, annealing is cut short at this checkpoint index and
    /// relaxation takes over early.
    std::uint64_t early_relax_after = 0;

    bool relax_enabled = true;
    RelaxConfig relax;

    std::string holdout;  // optional validation CSV
    double idw_power = 2.0;

    std::string output_dir;  // empty: compute only, write nothing
    EmitFlags emit;
    std::size_t cell_cap = kDefaultCellCap;

    /// Throws ConfigError on any out-of-range numeric field.
    void validate() const;
};

/// Applies one `key = value` pair. Unknown key or unparsable value throws
/// ConfigError naming the key.
void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value);

/// Parses a flat key-value config file. Throws IoFailure when the file
/// cannot be read and ParseError on malformed lines.
RunConfig load_config(const std::string& path);

/// The config as ordered key-value pairs, for the report echo.
std::vector<std::pair<std::string, std::string>> config_entries(
    const RunConfig& cfg);

struct ValueStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
    std::array<std::uint64_t, 64> histogram{};  // equal bins over [min,max]
};

/// Statistics over the finite entries of values; count == 0 when none.
ValueStats compute_stats(const std::vector<double>& values);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunReport {
    RunConfig config;
    std::size_t rows = 0;
    std::size_t cols = 0;
    double cell_size = 0.0;  // size actually used
    std::size_t n_infer = 0;
    double coverage_fraction = 0.0;  // training cells / total cells
    std::size_t segment_count = 0;

    std::vector<CheckpointLog> segment_logs;  // one log in sequential mode
    std::vector<bool> stopped_by_rmse;
    std::uint64_t total_iterations = 0;
    std::uint64_t relax_sweeps = 0;
    bool relax_converged = false;

    ValueStats stats_all;        // denormalized, every pixel
    ValueStats stats_inference;  // denormalized, inference pixels only
    std::optional<HoldoutStats> validation;
    std::vector<StageTiming> timings;  // fixed stage order

    PixelGrid surface;              // final output, original units
    PixelGrid annealed_normalized;  // pre-relaxation state, for diagnostics
};

/// Runs ingest, grid, normalize, initialize, anneal, relax, denormalize,
/// export, validate in that fixed order (cosine mode works on raw angles
/// and skips the normalize and denormalize stages; disabled stages are
/// skipped with downstream inputs still well-defined). Artifacts are
/// written into cfg.output_dir per the emit flags after all compute
/// finishes. The overload taking a ScatterSet skips file ingest.
RunReport run(const RunConfig& cfg);
RunReport run(const RunConfig& cfg, const ScatterSet& scatter);

/// Renders the report as structured `key = value` text.
void write_report_text(const RunReport& report, std::ostream& out);

struct ResolutionRow {
    double cell_size = 0.0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t n_infer = 0;
    double stddev_all = 0.0;
    double stddev_inference = 0.0;
};

struct ResolutionExperiment {
    std::vector<RunReport> reports;
    std::vector<ResolutionRow> comparison;
};

/// One shared-seed pipeline run per cell size plus a comparison table of
/// output standard deviations. Throws ConfigError on an empty size list.
ResolutionExperiment experiment_resolution(const RunConfig& cfg,
                                           const std::vector<double>& sizes);

struct AnnealingExperiment {
    std::vector<RunReport> reports;
    struct Difference {
        std::size_t first = 0;   // indices into reports
        std::size_t second = 0;
        PixelGrid grid;          // reports[second] minus reports[first]
    };
    std::vector<Difference> differences;
};

/// Shared-seed runs across decay values plus pairwise difference grids.
/// Throws ConfigError when fewer than two values are given or any is <= 1.
AnnealingExperiment experiment_annealing(const RunConfig& cfg,
                                         const std::vector<double>& decays);

struct BiasExperiment {
    RunReport unbiased;
    RunReport biased;
};

/// Two shared-seed runs differing only in bias policy.
BiasExperiment experiment_bias(const RunConfig& cfg);

struct MethodMetrics {
    std::string method;
    HoldoutStats stats;
};

/// Runs the pipeline plus the IDW baseline and scores both against the
/// holdout file over the same comparable points. Throws ConfigError when
/// cfg.holdout is empty.
std::vector<MethodMetrics> validate_methods(const RunConfig& cfg);

/// Writes the `method,rmse,n_points,skipped` metrics CSV.
void write_metrics_csv(const std::vector<MethodMetrics>& rows,
                       const std::string& path);

}  // namespace iini
