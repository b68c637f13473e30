#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iini/error.hpp"
#include "iini/pipeline.hpp"

namespace {

iini::RunConfig build_config(const std::string& config_path,
                             const std::vector<std::string>& overrides) {
    iini::RunConfig cfg;
    if (!config_path.empty()) cfg = iini::load_config(config_path);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw iini::Error("ConfigError",
                              "--set expects key=value, got '" + kv + "'");
        iini::apply_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

void print_grid_info(const iini::RunConfig& cfg) {
    if (cfg.input.empty())
        throw iini::Error("ConfigError", "grid-info needs config key 'input'");
    iini::ScatterSet scatter = iini::read_scatter_csv(cfg.input);
    scatter.regularity = cfg.regularity;
    scatter.area_hint = cfg.area_hint;
    scatter.validate();

    const iini::Extent bb = scatter.bounding_box();
    const double recommended = iini::recommend_pixel_size(scatter);
    const double cell = cfg.cell_size > 0.0 ? cfg.cell_size : recommended;
    const iini::PixelGrid g =
        iini::rasterize(scatter, cell, cfg.extent, cfg.cell_cap);

    std::cout << std::setprecision(12);
    std::cout << "points = " << scatter.points.size() << '\n';
    std::cout << "extent.min_x = " << bb.min_x << '\n';
    std::cout << "extent.min_y = " << bb.min_y << '\n';
    std::cout << "extent.max_x = " << bb.max_x << '\n';
    std::cout << "extent.max_y = " << bb.max_y << '\n';
    std::cout << "area = " << scatter.area() << '\n';
    std::cout << "recommended_cell_size = " << recommended << '\n';
    std::cout << "cell_size = " << cell << '\n';
    std::cout << "grid.rows = " << g.rows << '\n';
    std::cout << "grid.cols = " << g.cols << '\n';
    std::cout << "grid.cells = " << g.cell_count() << '\n';
    const std::size_t n_infer = g.inference_count();
    std::cout << "grid.n_infer = " << n_infer << '\n';
    std::cout << "grid.coverage_fraction = "
              << static_cast<double>(g.cell_count() - n_infer) /
                     static_cast<double>(g.cell_count())
              << '\n';
    std::cout << "grid.segments = " << iini::segment(g).segment_count << '\n';
}

void print_metrics(const std::vector<iini::MethodMetrics>& rows) {
    std::cout << "method,rmse,n_points,skipped\n";
    std::cout << std::setprecision(12);
    for (const iini::MethodMetrics& r : rows)
        std::cout << r.method << ',' << r.stats.rmse << ',' << r.stats.n_points
                  << ',' << r.stats.skipped << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IINI: interacting-immediate-neighbour spatial "
                 "interpolation"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "flat 'key = value' config file");
        sub->add_option("--set", overrides,
                        "override one config key as key=value (repeatable)");
    };

    auto* interpolate =
        app.add_subcommand("interpolate", "run the full pipeline");
    add_common(interpolate);

    auto* validate = app.add_subcommand(
        "validate", "score the pipeline and the IDW baseline on a holdout");
    add_common(validate);

    auto* experiment =
        app.add_subcommand("experiment", "parameter-study presets");
    experiment->require_subcommand(1);
    auto* exp_resolution = experiment->add_subcommand(
        "resolution", "one run per cell size, shared seed");
    std::vector<double> sizes;
    exp_resolution->add_option("--sizes", sizes, "cell sizes to compare")
        ->delimiter(',')
        ->required();
    add_common(exp_resolution);
    auto* exp_annealing = experiment->add_subcommand(
        "annealing", "one run per decay rate, plus difference grids");
    std::vector<double> decays;
    exp_annealing->add_option("--decays", decays, "decay rates to compare")
        ->delimiter(',')
        ->required();
    add_common(exp_annealing);
    auto* exp_bias = experiment->add_subcommand(
        "bias", "biased vs unbiased training neighbours, shared seed");
    add_common(exp_bias);

    auto* grid_info = app.add_subcommand(
        "grid-info", "inspect a scatter file and the grid it implies");
    add_common(grid_info);

    CLI11_PARSE(app, argc, argv);

    try {
        if (interpolate->parsed()) {
            const iini::RunReport rep =
                iini::run(build_config(config_path, overrides));
            iini::write_report_text(rep, std::cout);
        } else if (validate->parsed()) {
            print_metrics(
                iini::validate_methods(build_config(config_path, overrides)));
        } else if (exp_resolution->parsed()) {
            const iini::ResolutionExperiment exp = iini::experiment_resolution(
                build_config(config_path, overrides), sizes);
            std::cout << "cell_size,rows,cols,n_infer,stddev_all,"
                         "stddev_inference\n";
            std::cout << std::setprecision(12);
            for (const iini::ResolutionRow& row : exp.comparison)
                std::cout << row.cell_size << ',' << row.rows << ','
                          << row.cols << ',' << row.n_infer << ','
                          << row.stddev_all << ',' << row.stddev_inference
                          << '\n';
        } else if (exp_annealing->parsed()) {
            const iini::AnnealingExperiment exp = iini::experiment_annealing(
                build_config(config_path, overrides), decays);
            std::cout << std::setprecision(12);
            for (std::size_t i = 0; i < exp.reports.size(); ++i)
                std::cout << "run_" << i << ".decay_a = " << decays[i]
                          << "\nrun_" << i << ".stddev = "
                          << exp.reports[i].stats_all.stddev << '\n';
            for (const auto& d : exp.differences) {
                double max_abs = 0.0;
                for (double v : d.grid.values)
                    max_abs = std::max(max_abs, std::fabs(v));
                std::cout << "difference_" << d.first << '_' << d.second
                          << ".max_abs = " << max_abs << '\n';
            }
        } else if (exp_bias->parsed()) {
            const iini::BiasExperiment exp =
                iini::experiment_bias(build_config(config_path, overrides));
            std::cout << std::setprecision(12);
            std::cout << "unbiased.mean = " << exp.unbiased.stats_all.mean
                      << "\nunbiased.stddev = "
                      << exp.unbiased.stats_all.stddev
                      << "\nbiased.mean = " << exp.biased.stats_all.mean
                      << "\nbiased.stddev = " << exp.biased.stats_all.stddev
                      << '\n';
        } else if (grid_info->parsed()) {
            print_grid_info(build_config(config_path, overrides));
        }
    } catch (const iini::Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "Error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
