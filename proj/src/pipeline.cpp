#include "iini/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <string>

#include "iini/error.hpp"
#include "iini/grid_io.hpp"
#include "iini/heatmap.hpp"
#include "text_util.hpp"

namespace iini {

namespace {

namespace fs = std::filesystem;

double to_double(const std::string& key, std::string_view value) {
    double v;
    if (!detail::parse_double(value, v))
        throw Error("ConfigError",
                    "key '" + key + "': cannot parse number '" +
                        std::string(value) + "'");
    return v;
}

std::uint64_t to_u64(const std::string& key, std::string_view value) {
    unsigned long long v;
    if (!detail::parse_u64(value, v))
        throw Error("ConfigError",
                    "key '" + key + "': cannot parse count '" +
                        std::string(value) + "'");
    return v;
}

bool to_bool(const std::string& key, std::string_view value) {
    const std::string v = detail::to_lower(detail::trim(value));
    if (v == "true") return true;
    if (v == "false") return false;
    throw Error("ConfigError",
                "key '" + key + "': expected true or false, got '" +
                    std::string(value) + "'");
}

std::string bool_str(bool v) { return v ? "true" : "false"; }

std::array<std::uint64_t, 64> histogram_counts(
    const std::vector<double>& values, double lo, double hi) {
    std::array<std::uint64_t, 64> bins{};
    const double span = hi - lo;
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        int b = span > 0.0
                    ? static_cast<int>((v - lo) / span * 64.0)
                    : 0;
        b = std::clamp(b, 0, 63);
        ++bins[static_cast<std::size_t>(b)];
    }
    return bins;
}

std::vector<double> inference_values(const PixelGrid& g) {
    std::vector<double> out;
    out.reserve(g.cell_count());
    for (std::size_t i = 0; i < g.cell_count(); ++i)
        if (g.roles[i] == PixelRole::Inference) out.push_back(g.values[i]);
    return out;
}

void write_grid_csv(const PixelGrid& g, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("IoFailure", "cannot open '" + path + "' for writing");
    out << "x,y,value\n";
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c) {
            const double v = g.value(r, c);
            if (!std::isfinite(v)) continue;
            out << detail::format_double(g.centroid_x(c)) << ','
                << detail::format_double(g.centroid_y(r)) << ','
                << detail::format_double(v) << '\n';
        }
    if (!out) throw Error("IoFailure", "write failed for '" + path + "'");
}

void write_checkpoint_csv(const CheckpointLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("IoFailure", "cannot open '" + path + "' for writing");
    out << "checkpoint,iterations,temperature,rmse,acceptance_rate\n";
    for (const CheckpointEntry& e : log)
        out << e.checkpoint << ',' << e.iterations << ','
            << detail::format_double(e.temperature) << ','
            << detail::format_double(e.rmse_vs_previous) << ','
            << detail::format_double(e.acceptance_rate) << '\n';
    if (!out) throw Error("IoFailure", "write failed for '" + path + "'");
}

void write_histogram_csv(const RunReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("IoFailure", "cannot open '" + path + "' for writing");
    const double lo = rep.stats_all.min;
    const double hi = rep.stats_all.max;
    const auto infer_bins =
        histogram_counts(inference_values(rep.surface), lo, hi);
    out << "bin,lower,upper,count_all,count_inference\n";
    for (std::size_t b = 0; b < 64; ++b) {
        const double width = (hi - lo) / 64.0;
        out << b << ',' << detail::format_double(lo + width * b) << ','
            << detail::format_double(b + 1 == 64 ? hi : lo + width * (b + 1))
            << ',' << rep.stats_all.histogram[b] << ',' << infer_bins[b]
            << '\n';
    }
    if (!out) throw Error("IoFailure", "write failed for '" + path + "'");
}

RunConfig with_output_subdir(const RunConfig& cfg, const std::string& name) {
    RunConfig out = cfg;
    if (!cfg.output_dir.empty())
        out.output_dir = (fs::path(cfg.output_dir) / name).string();
    return out;
}

}  // namespace

void RunConfig::validate() const {
    metric.validate();
    schedule.validate();
    relax.validate();
    if (!(idw_power > 0.0))
        throw Error("ConfigError", "idw_power must be positive");
    if (cell_cap == 0)
        throw Error("ConfigError", "cell_cap must be at least 1");
    if (area_hint && !(*area_hint > 0.0))
        throw Error("ConfigError", "area_hint must be positive");
}

void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value) {
    const std::string k = detail::to_lower(detail::trim(key));
    const std::string v(detail::trim(value));

    if (k == "input") {
        cfg.input = v;
    } else if (k == "holdout") {
        cfg.holdout = v;
    } else if (k == "output_dir") {
        cfg.output_dir = v;
    } else if (k == "cell_size") {
        cfg.cell_size = detail::to_lower(v) == "auto" ? 0.0 : to_double(k, v);
    } else if (k == "regularity") {
        const std::string lv = detail::to_lower(v);
        if (lv == "regular")
            cfg.regularity = Regularity::Regular;
        else if (lv == "irregular")
            cfg.regularity = Regularity::Irregular;
        else
            throw Error("ConfigError",
                        "key 'regularity': expected regular or irregular");
    } else if (k == "area_hint") {
        if (detail::to_lower(v) == "auto")
            cfg.area_hint.reset();
        else
            cfg.area_hint = to_double(k, v);
    } else if (k == "extent") {
        if (detail::to_lower(v) == "auto") {
            cfg.extent.reset();
        } else {
            const auto parts = detail::split(v, ',');
            if (parts.size() != 4)
                throw Error("ConfigError",
                            "key 'extent': expected "
                            "min_x,min_y,max_x,max_y or auto");
            Extent e;
            e.min_x = to_double(k, parts[0]);
            e.min_y = to_double(k, parts[1]);
            e.max_x = to_double(k, parts[2]);
            e.max_y = to_double(k, parts[3]);
            cfg.extent = e;
        }
    } else if (k == "metric") {
        const std::string lv = detail::to_lower(v);
        if (lv == "square_difference")
            cfg.metric.kind = MetricKind::SquareDifference;
        else if (lv == "cosine")
            cfg.metric.kind = MetricKind::Cosine;
        else
            throw Error("ConfigError",
                        "key 'metric': expected square_difference or cosine");
    } else if (k == "bias") {
        const std::string lv = detail::to_lower(v);
        if (lv == "unbiased")
            cfg.metric.bias_policy = BiasPolicy::Unbiased;
        else if (lv == "training_boost")
            cfg.metric.bias_policy = BiasPolicy::TrainingBoost;
        else
            throw Error("ConfigError",
                        "key 'bias': expected unbiased or training_boost");
    } else if (k == "beta") {
        cfg.metric.beta = to_double(k, v);
    } else if (k == "t_start") {
        cfg.schedule.t_start = to_double(k, v);
    } else if (k == "decay_a") {
        cfg.schedule.decay_a = to_double(k, v);
    } else if (k == "epsilon_p") {
        cfg.schedule.epsilon_p = to_double(k, v);
    } else if (k == "seed") {
        cfg.seed = to_u64(k, v);
    } else if (k == "max_checkpoints") {
        cfg.max_checkpoints = to_u64(k, v);
    } else if (k == "parallel_segments") {
        cfg.parallel_segments = to_bool(k, v);
    } else if (k == "early_relax_after") {
        cfg.early_relax_after = to_u64(k, v);
    } else if (k == "relax") {
        cfg.relax_enabled = to_bool(k, v);
    } else if (k == "relax_mode") {
        const std::string lv = detail::to_lower(v);
        if (lv == "conditional")
            cfg.relax.mode = RelaxMode::Conditional;
        else if (lv == "unconditional")
            cfg.relax.mode = RelaxMode::Unconditional;
        else
            throw Error("ConfigError", "key 'relax_mode': expected "
                                       "conditional or unconditional");
    } else if (k == "relax_tolerance") {
        cfg.relax.tolerance = to_double(k, v);
    } else if (k == "max_sweeps") {
        cfg.relax.max_sweeps = to_u64(k, v);
    } else if (k == "unconditional_passes") {
        cfg.relax.unconditional_passes =
            detail::to_lower(v) == "converge" ? 0 : to_u64(k, v);
    } else if (k == "idw_power") {
        cfg.idw_power = to_double(k, v);
    } else if (k == "emit_ascii_grid") {
        cfg.emit.ascii_grid = to_bool(k, v);
    } else if (k == "emit_csv") {
        cfg.emit.csv = to_bool(k, v);
    } else if (k == "emit_heatmap_png") {
        cfg.emit.heatmap_png = to_bool(k, v);
    } else if (k == "emit_histogram_csv") {
        cfg.emit.histogram_csv = to_bool(k, v);
    } else if (k == "emit_checkpoint_log") {
        cfg.emit.checkpoint_log = to_bool(k, v);
    } else if (k == "cell_cap") {
        cfg.cell_cap = static_cast<std::size_t>(to_u64(k, v));
    } else {
        throw Error("ConfigError", "unknown config key '" + key + "'");
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("IoFailure", "cannot open config file '" + path + "'");
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw Error("ParseError", path + ":" + std::to_string(line_no) +
                                          ": expected 'key = value'");
        apply_key(cfg, std::string(t.substr(0, eq)),
                  std::string(t.substr(eq + 1)));
    }
    return cfg;
}

std::vector<std::pair<std::string, std::string>> config_entries(
    const RunConfig& cfg) {
    using detail::format_double;
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("input", cfg.input);
    out.emplace_back("holdout", cfg.holdout);
    out.emplace_back("output_dir", cfg.output_dir);
    out.emplace_back("cell_size", cfg.cell_size > 0.0
                                      ? format_double(cfg.cell_size)
                                      : "auto");
    out.emplace_back("regularity", cfg.regularity == Regularity::Regular
                                       ? "regular"
                                       : "irregular");
    out.emplace_back("area_hint",
                     cfg.area_hint ? format_double(*cfg.area_hint) : "auto");
    out.emplace_back(
        "extent",
        cfg.extent ? format_double(cfg.extent->min_x) + "," +
                         format_double(cfg.extent->min_y) + "," +
                         format_double(cfg.extent->max_x) + "," +
                         format_double(cfg.extent->max_y)
                   : "auto");
    out.emplace_back("metric", cfg.metric.kind == MetricKind::SquareDifference
                                   ? "square_difference"
                                   : "cosine");
    out.emplace_back("bias", cfg.metric.bias_policy == BiasPolicy::Unbiased
                                 ? "unbiased"
                                 : "training_boost");
    out.emplace_back("beta", format_double(cfg.metric.beta));
    out.emplace_back("t_start", format_double(cfg.schedule.t_start));
    out.emplace_back("decay_a", format_double(cfg.schedule.decay_a));
    out.emplace_back("epsilon_p", format_double(cfg.schedule.epsilon_p));
    out.emplace_back("seed", std::to_string(cfg.seed));
    out.emplace_back("max_checkpoints", std::to_string(cfg.max_checkpoints));
    out.emplace_back("parallel_segments", bool_str(cfg.parallel_segments));
    out.emplace_back("early_relax_after",
                     std::to_string(cfg.early_relax_after));
    out.emplace_back("relax", bool_str(cfg.relax_enabled));
    out.emplace_back("relax_mode", cfg.relax.mode == RelaxMode::Conditional
                                       ? "conditional"
                                       : "unconditional");
    out.emplace_back("relax_tolerance", format_double(cfg.relax.tolerance));
    out.emplace_back("max_sweeps", std::to_string(cfg.relax.max_sweeps));
    out.emplace_back("unconditional_passes",
                     cfg.relax.unconditional_passes == 0
                         ? "converge"
                         : std::to_string(cfg.relax.unconditional_passes));
    out.emplace_back("idw_power", format_double(cfg.idw_power));
    out.emplace_back("emit_ascii_grid", bool_str(cfg.emit.ascii_grid));
    out.emplace_back("emit_csv", bool_str(cfg.emit.csv));
    out.emplace_back("emit_heatmap_png", bool_str(cfg.emit.heatmap_png));
    out.emplace_back("emit_histogram_csv", bool_str(cfg.emit.histogram_csv));
    out.emplace_back("emit_checkpoint_log", bool_str(cfg.emit.checkpoint_log));
    out.emplace_back("cell_cap", std::to_string(cfg.cell_cap));
    return out;
}

ValueStats compute_stats(const std::vector<double>& values) {
    ValueStats s;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
        sum += v;
        ++s.count;
    }
    if (s.count == 0) {
        s.min = s.max = 0.0;
        return s;
    }
    s.mean = sum / static_cast<double>(s.count);
    double sq = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        const double d = v - s.mean;
        sq += d * d;
    }
    s.stddev = std::sqrt(sq / static_cast<double>(s.count));
    s.histogram = histogram_counts(values, s.min, s.max);
    return s;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

RunReport run_impl(const RunConfig& cfg, const ScatterSet* provided) {
    cfg.validate();
    const bool cosine = cfg.metric.kind == MetricKind::Cosine;

    RunReport rep;
    rep.config = cfg;

    using Clock = std::chrono::steady_clock;
    auto time_stage = [&rep](const std::string& name, auto&& fn) {
        const auto start = Clock::now();
        fn();
        const std::chrono::duration<double> dt = Clock::now() - start;
        rep.timings.push_back({name, dt.count()});
    };

    ScatterSet scatter;
    time_stage("ingest", [&] {
        if (provided) {
            scatter = *provided;
        } else {
            if (cfg.input.empty())
                throw Error("ConfigError", "config key 'input' is empty");
            scatter = read_scatter_csv(cfg.input);
            scatter.regularity = cfg.regularity;
            scatter.area_hint = cfg.area_hint;
        }
    });

    PixelGrid work;
    time_stage("grid", [&] {
        const double cell = cfg.cell_size > 0.0 ? cfg.cell_size
                                                : recommend_pixel_size(scatter);
        work = rasterize(scatter, cell, cfg.extent, cfg.cell_cap);
        rep.cell_size = cell;
        rep.rows = static_cast<std::size_t>(work.rows);
        rep.cols = static_cast<std::size_t>(work.cols);
        rep.n_infer = work.inference_count();
        rep.coverage_fraction =
            static_cast<double>(work.cell_count() - rep.n_infer) /
            static_cast<double>(work.cell_count());
    });

    time_stage("normalize", [&] {
        if (cosine) {
            // Angles stay in measurement space; fold into one period.
            for (double& v : work.values)
                if (std::isfinite(v)) v = canonical_angle(v);
        } else {
            work = normalize(work);
        }
    });

    time_stage("initialize", [&] {
        if (rep.n_infer == 0) return;
        ValueSet vs = ValueSet::make(cfg.schedule.epsilon_p);
        if (cosine) vs = vs.scaled(kTwoPi);
        work = initialize_inference(work, vs, cfg.seed);
    });

    time_stage("anneal", [&] {
        if (rep.n_infer == 0) return;
        const std::uint64_t max_cp =
            cfg.early_relax_after > 0
                ? std::min(cfg.early_relax_after, cfg.max_checkpoints)
                : cfg.max_checkpoints;
        const SegmentMap segs = segment(work);
        rep.segment_count = static_cast<std::size_t>(segs.segment_count);
        if (cfg.parallel_segments) {
            SegmentedAnnealResult r = run_annealing_segmented(
                work, segs, cfg.metric, cfg.schedule, cfg.seed, max_cp);
            work = std::move(r.grid);
            rep.segment_logs = std::move(r.segment_logs);
            rep.stopped_by_rmse.assign(r.stopped_by_rmse.begin(),
                                       r.stopped_by_rmse.end());
            rep.total_iterations = r.total_iterations;
        } else {
            AnnealResult r = run_annealing(work, cfg.metric, cfg.schedule,
                                           cfg.seed, max_cp);
            work = std::move(r.grid);
            rep.segment_logs.push_back(std::move(r.log));
            rep.stopped_by_rmse.push_back(r.stopped_by_rmse);
            rep.total_iterations = r.total_iterations;
        }
        rep.annealed_normalized = work;
    });

    time_stage("relax", [&] {
        if (!cfg.relax_enabled || rep.n_infer == 0) return;
        RelaxOutcome cond = relax(work, cfg.metric, cfg.relax);
        work = std::move(cond.grid);
        rep.relax_sweeps = cond.sweeps_used;
        rep.relax_converged = cond.converged;
        if (cfg.relax.mode == RelaxMode::Unconditional) {
            RelaxOutcome unc =
                relax_unconditional(work, cfg.metric, cfg.relax);
            work = std::move(unc.grid);
            rep.relax_sweeps += unc.sweeps_used;
            rep.relax_converged = rep.relax_converged && unc.converged;
        }
    });

    time_stage("denormalize", [&] {
        rep.surface = cosine ? std::move(work) : denormalize(work);
    });

    rep.stats_all = compute_stats(rep.surface.values);
    rep.stats_inference = compute_stats(inference_values(rep.surface));

    time_stage("export", [&] {
        if (cfg.output_dir.empty()) return;
        fs::create_directories(cfg.output_dir);
        const fs::path dir(cfg.output_dir);
        if (cfg.emit.ascii_grid)
            write_esri_grid(rep.surface, (dir / "surface.asc").string());
        if (cfg.emit.csv)
            write_grid_csv(rep.surface, (dir / "surface.csv").string());
        if (cfg.emit.heatmap_png)
            write_heatmap(rep.surface, (dir / "heatmap.png").string());
        if (cfg.emit.histogram_csv)
            write_histogram_csv(rep, (dir / "histogram.csv").string());
        if (cfg.emit.checkpoint_log) {
            if (rep.segment_logs.size() == 1 && !cfg.parallel_segments) {
                write_checkpoint_csv(rep.segment_logs[0],
                                     (dir / "checkpoint_log.csv").string());
            } else {
                for (std::size_t k = 0; k < rep.segment_logs.size(); ++k)
                    write_checkpoint_csv(
                        rep.segment_logs[k],
                        (dir / ("checkpoint_log_seg" + std::to_string(k) +
                                ".csv"))
                            .string());
            }
        }
        std::ofstream rpt(dir / "report.txt");
        if (!rpt)
            throw Error("IoFailure", "cannot open report.txt for writing");
        write_report_text(rep, rpt);
    });

    time_stage("validate", [&] {
        if (cfg.holdout.empty()) return;
        const ScatterSet withheld = read_scatter_csv(cfg.holdout);
        rep.validation = holdout_rmse(rep.surface, withheld.points);
    });

    return rep;
}

}  // namespace

RunReport run(const RunConfig& cfg) { return run_impl(cfg, nullptr); }

RunReport run(const RunConfig& cfg, const ScatterSet& scatter) {
    return run_impl(cfg, &scatter);
}

void write_report_text(const RunReport& rep, std::ostream& out) {
    using detail::format_double;
    for (const auto& [k, v] : config_entries(rep.config))
        out << "config." << k << " = " << v << '\n';
    out << "grid.rows = " << rep.rows << '\n';
    out << "grid.cols = " << rep.cols << '\n';
    out << "grid.cell_size = " << format_double(rep.cell_size) << '\n';
    out << "grid.n_infer = " << rep.n_infer << '\n';
    out << "grid.coverage_fraction = " << format_double(rep.coverage_fraction)
        << '\n';
    out << "grid.segment_count = " << rep.segment_count << '\n';

    std::size_t stopped = 0;
    std::size_t checkpoints = 0;
    for (bool b : rep.stopped_by_rmse) stopped += b ? 1 : 0;
    for (const auto& log : rep.segment_logs) checkpoints += log.size();
    out << "anneal.chains = " << rep.segment_logs.size() << '\n';
    out << "anneal.total_iterations = " << rep.total_iterations << '\n';
    out << "anneal.checkpoints = " << checkpoints << '\n';
    out << "anneal.chains_stopped_by_rmse = " << stopped << '\n';
    out << "relax.sweeps = " << rep.relax_sweeps << '\n';
    out << "relax.converged = " << bool_str(rep.relax_converged) << '\n';

    const auto stats_block = [&](const char* name, const ValueStats& s) {
        out << name << ".count = " << s.count << '\n';
        out << name << ".min = " << format_double(s.min) << '\n';
        out << name << ".max = " << format_double(s.max) << '\n';
        out << name << ".mean = " << format_double(s.mean) << '\n';
        out << name << ".stddev = " << format_double(s.stddev) << '\n';
    };
    stats_block("stats.all", rep.stats_all);
    stats_block("stats.inference", rep.stats_inference);

    if (rep.validation) {
        out << "validation.rmse = " << format_double(rep.validation->rmse)
            << '\n';
        out << "validation.n_points = " << rep.validation->n_points << '\n';
        out << "validation.skipped = " << rep.validation->skipped << '\n';
    }
    for (const StageTiming& t : rep.timings)
        out << "timing." << t.stage << " = " << format_double(t.seconds)
            << '\n';
}

ResolutionExperiment experiment_resolution(const RunConfig& cfg,
                                           const std::vector<double>& sizes) {
    if (sizes.empty())
        throw Error("ConfigError",
                    "resolution experiment needs at least one cell size");
    for (double s : sizes)
        if (!(s > 0.0))
            throw Error("ConfigError", "cell sizes must be positive");

    ResolutionExperiment exp;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        RunConfig sub = with_output_subdir(cfg, "res_" + std::to_string(i));
        sub.cell_size = sizes[i];
        exp.reports.push_back(run(sub));
        const RunReport& r = exp.reports.back();
        exp.comparison.push_back({sizes[i], r.rows, r.cols, r.n_infer,
                                  r.stats_all.stddev,
                                  r.stats_inference.stddev});
    }
    if (!cfg.output_dir.empty()) {
        fs::create_directories(cfg.output_dir);
        const std::string path =
            (fs::path(cfg.output_dir) / "resolution_comparison.csv").string();
        std::ofstream out(path);
        if (!out)
            throw Error("IoFailure",
                        "cannot open '" + path + "' for writing");
        out << "cell_size,rows,cols,n_infer,stddev_all,stddev_inference\n";
        for (const ResolutionRow& row : exp.comparison)
            out << detail::format_double(row.cell_size) << ',' << row.rows
                << ',' << row.cols << ',' << row.n_infer << ','
                << detail::format_double(row.stddev_all) << ','
                << detail::format_double(row.stddev_inference) << '\n';
    }
    return exp;
}

AnnealingExperiment experiment_annealing(const RunConfig& cfg,
                                         const std::vector<double>& decays) {
    if (decays.size() < 2)
        throw Error("ConfigError",
                    "annealing experiment needs at least two decay values");
    for (double a : decays)
        if (!(a > 1.0))
            throw Error("ConfigError",
                        "decay values must be greater than 1");

    AnnealingExperiment exp;
    for (std::size_t i = 0; i < decays.size(); ++i) {
        RunConfig sub = with_output_subdir(cfg, "decay_" + std::to_string(i));
        sub.schedule.decay_a = decays[i];
        exp.reports.push_back(run(sub));
    }
    for (std::size_t i = 0; i < exp.reports.size(); ++i) {
        for (std::size_t j = i + 1; j < exp.reports.size(); ++j) {
            AnnealingExperiment::Difference d;
            d.first = i;
            d.second = j;
            d.grid = exp.reports[j].surface;
            for (std::size_t k = 0; k < d.grid.cell_count(); ++k)
                d.grid.values[k] -= exp.reports[i].surface.values[k];
            d.grid.norm.reset();
            if (!cfg.output_dir.empty()) {
                const std::string stem = "difference_" + std::to_string(i) +
                                         "_" + std::to_string(j);
                const fs::path dir(cfg.output_dir);
                write_esri_grid(d.grid, (dir / (stem + ".asc")).string());
                if (cfg.emit.heatmap_png)
                    write_heatmap(d.grid, (dir / (stem + ".png")).string());
            }
            exp.differences.push_back(std::move(d));
        }
    }
    return exp;
}

BiasExperiment experiment_bias(const RunConfig& cfg) {
    RunConfig unbiased = with_output_subdir(cfg, "bias_unbiased");
    unbiased.metric.bias_policy = BiasPolicy::Unbiased;
    RunConfig biased = with_output_subdir(cfg, "bias_biased");
    biased.metric.bias_policy = BiasPolicy::TrainingBoost;
    return BiasExperiment{run(unbiased), run(biased)};
}

std::vector<MethodMetrics> validate_methods(const RunConfig& cfg) {
    if (cfg.holdout.empty())
        throw Error("ConfigError",
                    "validation needs a holdout file, config key 'holdout'");

    const RunReport rep = run(cfg);

    ScatterSet scatter = read_scatter_csv(cfg.input);
    scatter.regularity = cfg.regularity;
    scatter.area_hint = cfg.area_hint;
    const ScatterSet withheld = read_scatter_csv(cfg.holdout);

    const PixelGrid raster =
        rasterize(scatter, rep.cell_size, cfg.extent, cfg.cell_cap);
    const PixelGrid idw = idw_baseline(scatter, raster, cfg.idw_power);

    std::vector<MethodMetrics> rows;
    rows.push_back({"iini", *rep.validation});
    rows.push_back({"idw", holdout_rmse(idw, withheld.points)});
    if (!cfg.output_dir.empty()) {
        fs::create_directories(cfg.output_dir);
        write_metrics_csv(
            rows, (fs::path(cfg.output_dir) / "metrics.csv").string());
    }
    return rows;
}

void write_metrics_csv(const std::vector<MethodMetrics>& rows,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("IoFailure", "cannot open '" + path + "' for writing");
    out << "method,rmse,n_points,skipped\n";
    for (const MethodMetrics& r : rows)
        out << r.method << ',' << detail::format_double(r.stats.rmse) << ','
            << r.stats.n_points << ',' << r.stats.skipped << '\n';
    if (!out) throw Error("IoFailure", "write failed for '" + path + "'");
}

}  // namespace iini
