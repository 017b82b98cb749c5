#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sixport/estimator.hpp"
#include "sixport/info_measure.hpp"
#include "sixport/monte_carlo.hpp"
#include "sixport/network.hpp"
#include "sixport/report.hpp"

namespace fs = std::filesystem;
using namespace sixport;

namespace {

struct CliState {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    bool plots = true;
    int runs = 500;
    int target = 1;
    std::string model_name = "unconditioned";
    int exit_code = 0;
};

RunConfig load_config(const CliState& state) {
    RunConfig cfg;
    if (!state.config_path.empty())
        cfg = run_config_from_json(read_text_file(state.config_path));
    if (state.seed_override) cfg.seed = *state.seed_override;
    return cfg;
}

void flag_contract(CliState& state, const std::string& what) {
    std::cerr << "contract violation: " << what << "\n";
    state.exit_code = 1;
}

void check_clamp(CliState& state) {
    if (clamp_diagnostic_count() > 0)
        flag_contract(state, std::to_string(clamp_diagnostic_count()) +
                                 " probability clamp events (outside the expansion regime)");
}

/// Whether the target frequency actually enters the model's detection law.
bool target_in_model(const ModelKind& model, int target, const ExperimentParams& params) {
    switch (model.family) {
        case ModelKind::Family::Unconditioned:
            if (target == 1) return params.eta_present;
            return target >= 2 && target <= 4;
        case ModelKind::Family::LocalizedL1:
            if (target == 5) return params.third_order;
            return target == 1 || target == 3 || target == 4;
        case ModelKind::Family::LocalizedL4:
            return target == 1 || target == 4 || target == 5;
        default:
            return false;
    }
}

PlotSpec series_plot(const DetectionSeries& series) {
    const auto expected = expected_counts(series.params, series.model);
    PlotSpec spec;
    spec.title = "Postselected counts per window (" + series.model.name() + ")";
    spec.x_label = "window k";
    spec.y_label = "N_k";
    PlotSeries data{"counts", "#1f77b4", false, {}, {}};
    PlotSeries curve{"expected", "#d62728", true, {}, {}};
    for (std::size_t i = 0; i < series.counts.size(); ++i) {
        data.x.push_back(static_cast<double>(i + 1));
        data.y.push_back(static_cast<double>(series.counts[i]));
        curve.x.push_back(static_cast<double>(i + 1));
        curve.y.push_back(expected[i]);
    }
    spec.series = {data, curve};
    return spec;
}

PlotSpec trace_plot(const std::vector<std::pair<std::string, const EstimationTrace*>>& traces,
                    const ExperimentParams& params, const std::string& title) {
    PlotSpec spec;
    spec.title = title;
    spec.x_label = "prefix length m";
    spec.y_label = "estimated frequency (1/s)";
    const char* colors[] = {"#d62728", "#2ca02c", "#1f77b4", "#9467bd"};
    int idx = 0;
    for (const auto& [label, trace] : traces) {
        PlotSeries points{label, colors[idx % 4], false, {}, {}};
        for (std::size_t i = 0; i < trace->estimates.size(); ++i) {
            points.x.push_back(static_cast<double>(i + 1));
            points.y.push_back(trace->estimates[i]);
        }
        spec.series.push_back(std::move(points));
        PlotSeries truth{"", colors[idx % 4], true, {1.0, static_cast<double>(params.n_windows)},
                         {params.omega(trace->target), params.omega(trace->target)}};
        spec.series.push_back(std::move(truth));
        ++idx;
    }
    return spec;
}

void cmd_simulate(CliState& state) {
    const RunConfig cfg = load_config(state);
    const ModelKind model = ModelKind::from_name(state.model_name);
    const DetectionSeries series = sample_counts(cfg.params, model, cfg.seed);
    const fs::path base = fs::path(state.out_dir) / ("series_" + model.name());
    write_series_csv(fs::path(base).replace_extension(".csv"), series);
    write_text_file(fs::path(state.out_dir) / "config.json", to_json_string(cfg));
    if (state.plots) write_svg(fs::path(base).replace_extension(".svg"), series_plot(series));
    std::cout << "wrote " << base.string() << ".csv (" << series.counts.size() << " windows)\n";
    check_clamp(state);
}

void cmd_estimate(CliState& state) {
    const RunConfig cfg = load_config(state);
    const ModelKind model = ModelKind::from_name(state.model_name);
    const DetectionSeries series = sample_counts(cfg.params, model, cfg.seed);
    const EstimationTrace trace = estimation_trace(series, state.target);
    const std::string stem =
        "trace_" + model.name() + "_w" + std::to_string(state.target);
    const fs::path base = fs::path(state.out_dir) / stem;
    write_trace_csv(fs::path(base).replace_extension(".csv"), trace);
    write_series_csv(fs::path(state.out_dir) / ("series_" + model.name() + ".csv"), series);
    write_text_file(fs::path(state.out_dir) / "config.json", to_json_string(cfg));
    if (state.plots)
        write_svg(fs::path(base).replace_extension(".svg"),
                  trace_plot({{stem, &trace}}, cfg.params,
                             "Frequency estimate vs prefix (" + model.name() + ")"));
    const auto step = convergence_step(trace);
    std::cout << "final estimate " << trace.estimates.back() << " 1/s, convergence step "
              << (step ? std::to_string(*step) : std::string("none")) << "\n";
    if (trace.degenerate.back() && cfg.params.epsilon > 0.0 &&
        target_in_model(model, state.target, cfg.params))
        flag_contract(state, "degenerate likelihood on a model that contains the target");
    check_clamp(state);
}

nlohmann::ordered_json ensemble_summary(const EnsembleStats& stats, const ModelKind& model,
                                        std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["model"] = model.name();
    j["target"] = stats.target;
    j["runs"] = stats.runs;
    j["seed"] = seed;
    const auto crossing = sustained_crossing(stats.mean_deviation, 1.0);
    j["mean_dev_sustained_at"] = crossing ? nlohmann::json(*crossing) : nlohmann::json(nullptr);
    j["mean_n_post_at_crossing"] =
        crossing ? nlohmann::json(stats.mean_n_post[static_cast<std::size_t>(*crossing - 1)])
                 : nlohmann::json(nullptr);
    const auto median = median_convergence(stats.run_convergence);
    j["median_convergence"] = median ? nlohmann::json(*median) : nlohmann::json(nullptr);
    return j;
}

void cmd_ensemble(CliState& state) {
    const RunConfig cfg = load_config(state);
    const ModelKind model = ModelKind::from_name(state.model_name);
    const EnsembleStats stats =
        ensemble_stats(cfg.params, model, state.target, state.runs, cfg.seed);
    const std::string stem =
        "ensemble_" + model.name() + "_w" + std::to_string(state.target);
    const fs::path base = fs::path(state.out_dir) / stem;
    write_ensemble_csv(fs::path(base).replace_extension(".csv"), stats);
    write_text_file(fs::path(base).replace_extension(".summary.json"),
                    ensemble_summary(stats, model, cfg.seed).dump(2) + "\n");
    if (state.plots) {
        PlotSpec dev;
        dev.title = "Mean deviation over " + std::to_string(stats.runs) + " runs (" +
                    model.name() + ", target w" + std::to_string(state.target) + ")";
        dev.x_label = "prefix length m";
        dev.y_label = "mean |deviation| (1/s)";
        PlotSeries curve{"mean deviation", "#d62728", true, {}, {}};
        PlotSeries posts{"mean N_post", "#1f77b4", true, {}, {}};
        for (std::size_t i = 0; i < stats.mean_deviation.size(); ++i) {
            curve.x.push_back(static_cast<double>(i + 1));
            curve.y.push_back(stats.mean_deviation[i]);
            posts.x.push_back(static_cast<double>(i + 1));
            posts.y.push_back(stats.mean_n_post[i]);
        }
        dev.series = {curve};
        write_svg(fs::path(state.out_dir) / (stem + "_deviation.svg"), dev);
        PlotSpec np;
        np.title = "Mean cumulative postselected photons (" + model.name() + ")";
        np.x_label = "prefix length m";
        np.y_label = "mean N_post";
        np.log_y = true;
        np.series = {posts};
        write_svg(fs::path(state.out_dir) / (stem + "_npost.svg"), np);
    }
    std::cout << ensemble_summary(stats, model, cfg.seed).dump(2) << "\n";
    check_clamp(state);
}

void cmd_table1(CliState& state) {
    const RunConfig cfg = load_config(state);
    const InfoTable table = build_table1(cfg.params.epsilon, 0.01);
    write_text_file(fs::path(state.out_dir) / "info_table.txt", render_info_table_text(table));
    write_text_file(fs::path(state.out_dir) / "info_table.csv", render_info_table_csv(table));
    write_text_file(fs::path(state.out_dir) / "info_table.json", render_info_table_json(table));
    std::cout << render_info_table_text(table);
    for (int i = 0; i < 5; ++i)
        if (table.presence_undefined[static_cast<std::size_t>(i)] ||
            table.presence_noeta_undefined[static_cast<std::size_t>(i)])
            flag_contract(state, "undefined presence ratio at L" + std::to_string(i + 1));
    check_clamp(state);
}

void cmd_oracle_verify(CliState& state) {
    const VerificationReport report = run_verification_suite();
    write_text_file(fs::path(state.out_dir) / "oracle_report.json", to_json_string(report));
    ExperimentParams defaults;
    write_text_file(fs::path(state.out_dir) / "network.json",
                    to_json_string(build_network(defaults)));
    for (const auto& check : report.expansions) {
        const std::string slope = check.exact ? "exact" : std::to_string(check.slope);
        std::printf("%-45s %s  slope=%s residual=%.3g\n", check.formula_id.c_str(),
                    check.pass ? "ok  " : "FAIL", slope.c_str(), check.max_residual);
    }
    std::printf("weak values: %s (|W_L1| slope %.3f, completeness %.2e, anomalous %.1f/%.1f)\n",
                report.weak_values.pass ? "ok" : "FAIL", report.weak_values.l1_order_slope,
                report.weak_values.completeness_error, report.weak_values.anomalous_l3,
                report.weak_values.anomalous_l4);
    std::printf("unitarity: %s (max violation %.2e)\n", report.unitary_ok ? "ok" : "FAIL",
                report.max_unitarity_violation);
    if (!report.all_pass) flag_contract(state, "verification suite failed");
}

void cmd_figures(CliState& state) {
    const RunConfig cfg = load_config(state);
    const fs::path out(state.out_dir);

    // Counts and single-seed estimation traces.
    const DetectionSeries plain = sample_counts(cfg.params, ModelKind::unconditioned(), cfg.seed);
    const DetectionSeries loc1 = sample_counts(cfg.params, ModelKind::localized_l1(), cfg.seed);
    const DetectionSeries loc4 = sample_counts(cfg.params, ModelKind::localized_l4(), cfg.seed);
    write_series_csv(out / "fig_counts_plain.csv", plain);
    write_series_csv(out / "fig_counts_localized_l1.csv", loc1);
    write_series_csv(out / "fig_counts_localized_l4.csv", loc4);
    const EstimationTrace plain_w1 = estimation_trace(plain, 1);
    const EstimationTrace plain_w4 = estimation_trace(plain, 4);
    const EstimationTrace loc1_w1 = estimation_trace(loc1, 1);
    const EstimationTrace loc4_w4 = estimation_trace(loc4, 4);
    write_trace_csv(out / "fig_trace_plain_w1.csv", plain_w1);
    write_trace_csv(out / "fig_trace_plain_w4.csv", plain_w4);
    write_trace_csv(out / "fig_trace_localized_l1_w1.csv", loc1_w1);
    write_trace_csv(out / "fig_trace_localized_l4_w4.csv", loc4_w4);
    if (state.plots) {
        write_svg(out / "fig_counts_plain.svg", series_plot(plain));
        write_svg(out / "fig_counts_localized_l1.svg", series_plot(loc1));
        write_svg(out / "fig_counts_localized_l4.svg", series_plot(loc4));
        write_svg(out / "fig_trace_plain.svg",
                  trace_plot({{"w1", &plain_w1}, {"w4", &plain_w4}}, cfg.params,
                             "Estimates from the plain run"));
        write_svg(out / "fig_trace_localized_l1.svg",
                  trace_plot({{"w1", &loc1_w1}}, cfg.params, "Estimates, localized at L1"));
        write_svg(out / "fig_trace_localized_l4.svg",
                  trace_plot({{"w4", &loc4_w4}}, cfg.params, "Estimates, localized at L4"));
    }

    // Ensemble comparisons.
    nlohmann::ordered_json summary;
    auto run_pair = [&](const ModelKind& model, int target, const std::string& stem) {
        const EnsembleStats stats =
            ensemble_stats(cfg.params, model, target, state.runs, cfg.seed);
        write_ensemble_csv(out / (stem + ".csv"), stats);
        summary[stem] = ensemble_summary(stats, model, cfg.seed);
        return stats;
    };
    const EnsembleStats ens_plain_w1 = run_pair(ModelKind::unconditioned(), 1, "ensemble_plain_w1");
    const EnsembleStats ens_loc1_w1 = run_pair(ModelKind::localized_l1(), 1, "ensemble_localized_l1_w1");
    const EnsembleStats ens_plain_w4 = run_pair(ModelKind::unconditioned(), 4, "ensemble_plain_w4");
    const EnsembleStats ens_loc4_w4 = run_pair(ModelKind::localized_l4(), 4, "ensemble_localized_l4_w4");

    auto post_ratio = [&](const EnsembleStats& a, const EnsembleStats& b) -> std::optional<double> {
        const auto ma = sustained_crossing(a.mean_deviation, 1.0);
        const auto mb = sustained_crossing(b.mean_deviation, 1.0);
        if (!ma || !mb) return std::nullopt;
        return a.mean_n_post[static_cast<std::size_t>(*ma - 1)] /
               b.mean_n_post[static_cast<std::size_t>(*mb - 1)];
    };
    const auto ratio_l1 = post_ratio(ens_plain_w1, ens_loc1_w1);
    const auto ratio_l4 = post_ratio(ens_plain_w4, ens_loc4_w4);
    summary["n_post_ratio_w1_plain_over_l1"] =
        ratio_l1 ? nlohmann::json(*ratio_l1) : nlohmann::json(nullptr);
    summary["n_post_ratio_w4_plain_over_l4"] =
        ratio_l4 ? nlohmann::json(*ratio_l4) : nlohmann::json(nullptr);
    write_text_file(out / "ensemble_summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";

    // Information table and oracle report.
    cmd_table1(state);
    cmd_oracle_verify(state);
    check_clamp(state);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Six-port interferometer simulation and analysis toolkit"};
    app.require_subcommand(1);
    CliState state;

    auto add_common = [&](CLI::App* cmd, bool with_model, bool with_target, bool with_runs) {
        cmd->add_option("--config", state.config_path, "JSON config file")
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", state.out_dir, "output directory");
        cmd->add_option("--seed", state.seed_override, "override the config seed");
        cmd->add_option("--plots", state.plots, "emit SVG figures (true/false)");
        if (with_model)
            cmd->add_option("--model", state.model_name,
                            "unconditioned | localized-l1 | localized-l4");
        if (with_target)
            cmd->add_option("--target", state.target, "frequency index to estimate")
                ->check(CLI::Range(1, 5));
        if (with_runs)
            cmd->add_option("--runs", state.runs, "ensemble size")->check(CLI::PositiveNumber);
    };

    add_common(app.add_subcommand("simulate", "sample postselected counts per window"), true,
               false, false);
    add_common(app.add_subcommand("estimate", "maximum-likelihood frequency trace"), true, true,
               false);
    add_common(app.add_subcommand("ensemble", "deviation and N_post averaged over many seeds"),
               true, true, true);
    add_common(app.add_subcommand("table1", "two-window information and presence table"), false,
               false, false);
    add_common(app.add_subcommand("oracle-verify", "check the closed forms against the unitary network"),
               false, false, false);
    add_common(app.add_subcommand("figures", "full reproduction suite"), false, false, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("simulate")) cmd_simulate(state);
        if (app.got_subcommand("estimate")) cmd_estimate(state);
        if (app.got_subcommand("ensemble")) cmd_ensemble(state);
        if (app.got_subcommand("table1")) cmd_table1(state);
        if (app.got_subcommand("oracle-verify")) cmd_oracle_verify(state);
        if (app.got_subcommand("figures")) cmd_figures(state);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return state.exit_code;
}
