#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <stdexcept>

#include "jlrobust/experiment.hpp"

namespace {

// Every subcommand exposes the full config surface; validate_config rejects
// combinations that make no sense for the parsed task.
void add_run_options(CLI::App* cmd, jlrobust::ExperimentConfig& cfg) {
    cmd->add_option("--input", cfg.input_path, "read points from this file instead of synthesizing")
        ->group("Input");
    cmd->add_flag("--sparse", cfg.input_sparse, "input uses the sparse 'label i:v ...' text format")
        ->group("Input");
    cmd->add_flag("--labeled", cfg.input_labeled, "CSV input carries a trailing +1/-1 label column")
        ->group("Input");
    cmd->add_option("--synth-k", cfg.synth_k, "synthetic clusters")->group("Input");
    cmd->add_option("--synth-per", cfg.synth_per, "synthetic points per cluster")->group("Input");
    cmd->add_option("--synth-d", cfg.synth_d, "synthetic ambient dimension")->group("Input");
    cmd->add_option("--synth-spread", cfg.synth_spread, "synthetic within-cluster spread")->group("Input");
    cmd->add_option("--synth-sep", cfg.synth_separation, "synthetic minimum center separation")->group("Input");

    cmd->add_option("--flip-fraction", cfg.flip_fraction, "flip this fraction of labels (ground truth recorded)")
        ->group("Contamination");
    cmd->add_option("--ball-fraction", cfg.ball_fraction, "append this fraction of far points (ground truth recorded)")
        ->group("Contamination");
    cmd->add_option("--ball-scale", cfg.ball_scale, "distance multiple for appended far points (> 1)")
        ->group("Contamination");

    cmd->add_option("--variant", cfg.variant, "map variant: gaussian, binary, fast, or none (skip the map)")
        ->check(CLI::IsMember({"gaussian", "binary", "fast", "none"}))
        ->group("Map");
    cmd->add_option("--rates", cfg.rates, "reduction rates in (0,1], comma separated")
        ->delimiter(',')
        ->group("Map");

    cmd->add_option("--gamma", cfg.gamma, "trimmed outlier fraction (first class for svm2)")->group("Task");
    cmd->add_option("--gamma2", cfg.gamma2, "trimmed outlier fraction, second class (svm2)")->group("Task");
    cmd->add_option("--k", cfg.k, "number of cluster centers (kcenter)")->group("Task");
    cmd->add_option("--eps", cfg.eps, "ball approximation / distortion parameter")->group("Task");
    cmd->add_option("--eps0", cfg.eps0, "margin approximation parameter (svm tasks)")->group("Task");

    cmd->add_option("--seed", cfg.seed, "root seed; fixes every random choice in the run")->group("Run");
    cmd->add_option("--trials", cfg.trials, "independent trials per rate")->group("Run");
    cmd->add_option("--output", cfg.output_path, "write rows here and means to <path>.summary.csv")->group("Run");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimension-reduced robust margins and clustering"};
    app.require_subcommand(1);

    jlrobust::ExperimentConfig cfg;
    CLI::App* reduce = app.add_subcommand("reduce", "measure pairwise distance distortion of a map");
    CLI::App* svm1 = app.add_subcommand("svm1", "one-class trimmed maximum margin through a reduced space");
    CLI::App* svm2 = app.add_subcommand("svm2", "two-class trimmed maximum margin through a reduced space");
    CLI::App* kcenter = app.add_subcommand("kcenter", "k-center with outliers through a reduced space");
    CLI::App* bench = app.add_subcommand("bench", "time map construction and application");
    for (CLI::App* cmd : {reduce, svm1, svm2, kcenter, bench}) add_run_options(cmd, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 1;
    }
    cfg.task = app.get_subcommands().front()->get_name();

    try {
        const jlrobust::ExperimentReport report = jlrobust::run_experiment(cfg);
        if (cfg.output_path.empty()) {
            std::fputs(report.jsonl().c_str(), stdout);
            std::fputs(report.summary_csv.c_str(), stderr);
        } else {
            std::printf("wrote %zu rows to %s (summary: %s.summary.csv)\n", report.rows.size(),
                        cfg.output_path.c_str(), cfg.output_path.c_str());
        }
        return 0;
    } catch (const jlrobust::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const jlrobust::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pipeline failure: %s\n", e.what());
        return 2;
    }
}
