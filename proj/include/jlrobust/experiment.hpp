#pragma once

// Experiment harness: a validated config, the reduction-rate sweep protocol,
// and machine-readable reports. Each run emits JSON-lines rows (one per
// variant/rate/trial) plus a CSV summary of per-rate means. Rows echo the
// fully resolved configuration so a report is auditable on its own. Like
// serialize.hpp this header uses the vendored json.hpp.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "kcenter.hpp"
#include "projection.hpp"
#include "serialize.hpp"
#include "svm.hpp"

namespace jlrobust {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mirrored one-to-one by the command line flags. An empty input_path
// synthesizes clusters; otherwise the file is loaded (CSV by default,
// sparse labeled text when input_sparse).
struct ExperimentConfig {
    std::string task = "svm1";  // svm1 | svm2 | kcenter | reduce | bench
    std::string input_path;
    bool input_sparse = false;
    bool input_labeled = false;  // CSV carries a trailing label column

    std::size_t synth_k = 2;
    std::size_t synth_per = 100;
    std::size_t synth_d = 64;
    double synth_spread = 0.5;
    double synth_separation = 20.0;

    double flip_fraction = 0.0;  // label contamination (labeled data only)
    double ball_fraction = 0.0;  // appended far-point contamination
    double ball_scale = 3.0;

    std::string variant = "gaussian";  // gaussian | binary | fast | none
    std::vector<double> rates{0.1};    // reduced dimension = max(1, round(rate*d))
    double gamma = 0.1;
    double gamma2 = 0.1;  // second-class trim (svm2)
    std::size_t k = 2;    // kcenter
    double eps = 0.3;     // kcenter ball parameter; distortion check for reduce/bench
    double eps0 = 0.3;    // margin parameter (svm tasks)
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::string output_path;  // optional; rows at <path>, means at <path>.summary.csv
};

inline void validate_config(const ExperimentConfig& cfg) {
    const auto is_one_of = [](const std::string& s, std::initializer_list<const char*> allowed) {
        for (const char* a : allowed)
            if (s == a) return true;
        return false;
    };
    if (!is_one_of(cfg.task, {"svm1", "svm2", "kcenter", "reduce", "bench"}))
        throw ConfigError("task: unknown task '" + cfg.task + "'");
    if (!is_one_of(cfg.variant, {"gaussian", "binary", "fast", "none"}))
        throw ConfigError("variant: unknown variant '" + cfg.variant + "'");
    if ((cfg.task == "reduce" || cfg.task == "bench") && cfg.variant == "none")
        throw ConfigError("variant: " + cfg.task + " needs a map variant");
    if (cfg.rates.empty()) throw ConfigError("rates: at least one reduction rate is required");
    for (std::size_t i = 0; i < cfg.rates.size(); ++i)
        if (!(cfg.rates[i] > 0.0 && cfg.rates[i] <= 1.0))
            throw ConfigError("rates[" + std::to_string(i) + "]: must lie in (0,1]");
    if (cfg.trials < 1) throw ConfigError("trials: must be >= 1");
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw ConfigError("gamma: must lie in [0,1)");
    if (!(cfg.gamma2 >= 0.0 && cfg.gamma2 < 1.0)) throw ConfigError("gamma2: must lie in [0,1)");
    if (cfg.k < 1) throw ConfigError("k: must be >= 1");
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw ConfigError("eps: must lie in (0,1)");
    if (!(cfg.eps0 > 0.0 && cfg.eps0 < 1.0)) throw ConfigError("eps0: must lie in (0,1)");
    if (!(cfg.flip_fraction >= 0.0 && cfg.flip_fraction < 1.0))
        throw ConfigError("flip-fraction: must lie in [0,1)");
    if (!(cfg.ball_fraction >= 0.0 && cfg.ball_fraction < 1.0))
        throw ConfigError("ball-fraction: must lie in [0,1)");
    if (!(cfg.ball_scale > 1.0)) throw ConfigError("ball-scale: must exceed 1");
    if (cfg.input_path.empty()) {
        if (cfg.synth_k < 1) throw ConfigError("synth-k: must be >= 1");
        if (cfg.synth_per < 1) throw ConfigError("synth-per: must be >= 1");
        if (cfg.synth_d < 1) throw ConfigError("synth-d: must be >= 1");
    }
}

struct ExperimentReport {
    std::vector<nlohmann::json> rows;
    std::string summary_csv;

    std::string jsonl() const {
        std::string out;
        for (const auto& row : rows) {
            out += row.dump();
            out += '\n';
        }
        return out;
    }

    // rows with wall-clock fields removed; two runs of the same config and
    // seed must agree on this view byte for byte
    std::string fixture_view() const {
        std::string out;
        for (nlohmann::json row : rows) {
            row.erase("timing");
            row.erase("normalizedTime");
            row.erase("buildSeconds");
            row.erase("applySeconds");
            out += row.dump();
            out += '\n';
        }
        return out;
    }
};

namespace detail {

inline std::size_t rate_dimension(double rate, std::size_t d) {
    const auto dt = static_cast<std::size_t>(std::llround(rate * static_cast<double>(d)));
    return std::min(std::max<std::size_t>(dt, 1), d);
}

inline std::vector<std::size_t> complement_of(const std::vector<std::size_t>& kept, std::size_t n) {
    std::vector<std::size_t> out;
    std::size_t t = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (t < kept.size() && kept[t] == i)
            ++t;
        else
            out.push_back(i);
    }
    return out;
}

inline double recall_against(const std::vector<std::size_t>& discarded,
                             const std::vector<std::size_t>& injected) {
    if (injected.empty()) return 0.0;
    std::size_t hit = 0;
    for (const std::size_t i : injected)
        if (std::binary_search(discarded.begin(), discarded.end(), i)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(injected.size());
}

// one pipeline execution, reduced or baseline, in report-row terms
struct RunOutcome {
    double quality = 0.0;          // width, radius, or distortion fraction
    double total_seconds = 0.0;
    PipelineTiming timing;
    std::vector<std::size_t> discarded;  // dataset indices trimmed away
    std::string blackbox;
    std::size_t d_tilde = 0;
};

inline RunOutcome run_svm1(const PointSet& p, const ExperimentConfig& cfg, Variant variant,
                           std::size_t d_tilde, std::uint64_t seed) {
    RunOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    if (variant == Variant::custom) {  // stands for "none": solve in place
        const BlackBoxDirection bb = default_blackbox_one_class(p, cfg.gamma, cfg.eps0);
        out.quality = trimmed_margin_one_class(p, bb.v, cfg.gamma);
        out.discarded = complement_of(select_inliers_one_class(p, bb.v, cfg.gamma), p.size());
        out.timing.t_blackbox = bb.seconds;
        out.blackbox = bb.solver;
        out.d_tilde = p.dim();
    } else {
        SvmOptions opts;
        opts.d_tilde_override = d_tilde;
        const MarginResult res = solve_one_class(p, cfg.gamma, cfg.eps0, variant, seed, {}, opts);
        out.quality = res.width;
        out.discarded = complement_of(res.inliers, p.size());
        out.timing = res.timing;
        out.blackbox = res.blackbox_name;
        out.d_tilde = res.descriptor.d_tilde;
    }
    out.total_seconds = seconds_since(t0);
    return out;
}

inline RunOutcome run_svm2(const TwoClassView& view, const ExperimentConfig& cfg, Variant variant,
                           std::size_t d_tilde, std::uint64_t seed) {
    RunOutcome out;
    std::vector<std::size_t> in1, in2;
    const auto t0 = std::chrono::steady_clock::now();
    if (variant == Variant::custom) {
        const BlackBoxDirection bb =
            default_blackbox_two_class(view.p1, view.p2, cfg.gamma, cfg.gamma2, cfg.eps0);
        out.quality = trimmed_margin_two_class(view.p1, view.p2, bb.v, cfg.gamma, cfg.gamma2);
        std::tie(in1, in2) = select_inliers_two_class(view.p1, view.p2, bb.v, cfg.gamma, cfg.gamma2);
        out.timing.t_blackbox = bb.seconds;
        out.blackbox = bb.solver;
        out.d_tilde = view.p1.dim();
    } else {
        SvmOptions opts;
        opts.d_tilde_override = d_tilde;
        const MarginResult res =
            solve_two_class(view.p1, view.p2, cfg.gamma, cfg.gamma2, cfg.eps0, variant, seed, {}, opts);
        out.quality = res.width;
        in1 = res.inliers;
        in2 = res.inliers_second;
        out.timing = res.timing;
        out.blackbox = res.blackbox_name;
        out.d_tilde = res.descriptor.d_tilde;
    }
    for (const std::size_t j : complement_of(in1, view.p1.size())) out.discarded.push_back(view.idx1[j]);
    for (const std::size_t j : complement_of(in2, view.p2.size())) out.discarded.push_back(view.idx2[j]);
    std::sort(out.discarded.begin(), out.discarded.end());
    out.total_seconds = seconds_since(t0);
    return out;
}

inline RunOutcome run_kcenter(const PointSet& p, const ExperimentConfig& cfg, Variant variant,
                              std::size_t d_tilde, std::uint64_t seed) {
    RunOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<int> assignment;
    if (variant == Variant::custom) {
        const ClusterSet cs = charikar_kcenter_outliers(p, cfg.k, cfg.gamma);
        assignment.assign(p.size(), -1);
        double radius = 0.0;
        for (std::size_t c = 0; c < cs.clusters.size(); ++c) {
            const SparseSolution ball = bc_meb(p.subset(cs.clusters[c]), cfg.eps);
            for (const std::size_t i : cs.clusters[c]) {
                assignment[i] = static_cast<int>(c);
                radius = std::max(radius, distance(p[i], ball.point));
            }
        }
        out.quality = radius;
        out.timing.t_blackbox = cs.seconds;
        out.blackbox = cs.solver;
        out.d_tilde = p.dim();
    } else {
        KCenterOptions opts;
        opts.d_tilde_override = d_tilde;
        const KCenterResult res = solve_kcenter(p, cfg.k, cfg.gamma, cfg.eps, variant, seed, {}, opts);
        assignment = res.assignment;
        out.quality = res.radius;
        out.timing = res.timing;
        out.blackbox = res.blackbox_name;
        out.d_tilde = res.descriptor.d_tilde;
    }
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] < 0) out.discarded.push_back(i);
    out.total_seconds = seconds_since(t0);
    return out;
}

}  // namespace detail

// The sweep protocol: resolve the dataset once, run the no-reduction
// baseline once (when a reduction variant is configured), then one pipeline
// run per (rate, trial). Solver rows carry time normalized by the baseline
// and, for clustering, radius normalized the same way. reduce and bench rows
// measure the maps themselves and have no baseline to normalize against.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);

    LabeledDataset ds = [&] {
        if (!cfg.input_path.empty())
            return cfg.input_sparse ? load_sparse_labeled(cfg.input_path)
                                    : load_csv(cfg.input_path, cfg.input_labeled);
        return synth_clusters(cfg.synth_k, cfg.synth_per, cfg.synth_d, cfg.synth_spread,
                              cfg.synth_separation, cfg.seed);
    }();
    if (cfg.flip_fraction > 0.0) {
        if (!ds.labeled()) throw ConfigError("flip-fraction: the input has no labels to flip");
        ds = inject_label_flip(ds, cfg.flip_fraction, cfg.seed + 1);
    }
    if (cfg.ball_fraction > 0.0) ds = inject_ball_outliers(ds, cfg.ball_fraction, cfg.ball_scale, cfg.seed + 2);

    const bool solver_task = cfg.task == "svm1" || cfg.task == "svm2" || cfg.task == "kcenter";
    TwoClassView view;
    if (cfg.task == "svm2") {
        if (!ds.labeled()) throw ConfigError("task: svm2 needs a labeled input");
        view = split_by_label(ds);
    }

    const auto solver_run = [&](Variant variant, std::size_t d_tilde, std::uint64_t seed) {
        if (cfg.task == "svm1") return detail::run_svm1(ds.points, cfg, variant, d_tilde, seed);
        if (cfg.task == "svm2") return detail::run_svm2(view, cfg, variant, d_tilde, seed);
        return detail::run_kcenter(ds.points, cfg, variant, d_tilde, seed);
    };

    const auto base_row = [&](const char* variant_name_str, double rate, std::size_t trial,
                              std::uint64_t seed, std::size_t d_tilde) {
        nlohmann::json row{{"task", cfg.task},       {"variant", variant_name_str},
                           {"rate", rate},           {"trial", trial},
                           {"seed", seed},           {"n", ds.size()},
                           {"d", ds.dim()},          {"dTilde", d_tilde},
                           {"input", ds.provenance}, {"trials", cfg.trials}};
        if (cfg.task == "svm1" || cfg.task == "kcenter") row["gamma"] = cfg.gamma;
        if (cfg.task == "svm2") {
            row["gamma"] = cfg.gamma;
            row["gamma2"] = cfg.gamma2;
        }
        if (cfg.task == "svm1" || cfg.task == "svm2") row["eps0"] = cfg.eps0;
        if (cfg.task == "kcenter") {
            row["k"] = cfg.k;
            row["eps"] = cfg.eps;
        }
        if (cfg.task == "reduce" || cfg.task == "bench") row["eps"] = cfg.eps;
        return row;
    };

    ExperimentReport report;

    // metric name and per-(variant, rate) accumulators for the CSV summary
    const char* metric = solver_task ? (cfg.task == "kcenter" ? "radius" : "width") : "fracWithin";
    struct Acc {
        std::string variant;
        double rate;
        std::size_t count = 0;
        double quality = 0.0, normalized_time = 0.0, normalized_radius = 0.0, recall = 0.0;
        bool has_normalized = false, has_recall = false;
    };
    std::vector<Acc> accs;
    const auto accumulate = [&](const std::string& variant, double rate, const nlohmann::json& row) {
        auto it = std::find_if(accs.begin(), accs.end(),
                               [&](const Acc& a) { return a.variant == variant && a.rate == rate; });
        if (it == accs.end()) {
            accs.push_back({variant, rate, 0, 0.0, 0.0, 0.0, 0.0, false, false});
            it = std::prev(accs.end());
        }
        it->count += 1;
        it->quality += row.at(metric).get<double>();
        if (row.contains("normalizedTime")) {
            it->normalized_time += row["normalizedTime"].get<double>();
            it->has_normalized = true;
        }
        if (row.contains("normalizedRadius")) it->normalized_radius += row["normalizedRadius"].get<double>();
        if (row.contains("outlierRecall")) {
            it->recall += row["outlierRecall"].get<double>();
            it->has_recall = true;
        }
    };

    detail::RunOutcome baseline;
    const bool want_baseline = solver_task;
    if (want_baseline) {
        // Variant::custom is the internal stand-in for "no map at all"
        baseline = solver_run(Variant::custom, ds.dim(), cfg.seed);
        nlohmann::json row = base_row("none", 1.0, 0, cfg.seed, ds.dim());
        row[metric] = baseline.quality;
        row["blackbox"] = baseline.blackbox;
        row["keptCount"] = ds.size() - baseline.discarded.size();
        row["normalizedTime"] = 1.0;  // by definition
        if (cfg.task == "kcenter") row["normalizedRadius"] = 1.0;
        if (!ds.injected_outliers.empty())
            row["outlierRecall"] = detail::recall_against(baseline.discarded, ds.injected_outliers);
        row["timing"] = timing_to_json(baseline.timing);
        accumulate("none", 1.0, row);
        report.rows.push_back(std::move(row));
    }

    if (!(solver_task && cfg.variant == "none")) {  // "none" alone: the baseline was the experiment
        for (std::size_t ri = 0; ri < cfg.rates.size(); ++ri) {
            const double rate = cfg.rates[ri];
            for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
                const std::uint64_t seed = cfg.seed + 1000003ull * ri + trial;
                const std::size_t d_tilde = detail::rate_dimension(rate, ds.dim());

                if (solver_task) {
                    const Variant variant = variant_from_name(cfg.variant);
                    const detail::RunOutcome run = solver_run(variant, d_tilde, seed);
                    nlohmann::json row = base_row(cfg.variant.c_str(), rate, trial, seed, run.d_tilde);
                    row[metric] = run.quality;
                    row["blackbox"] = run.blackbox;
                    row["keptCount"] = ds.size() - run.discarded.size();
                    row["timing"] = timing_to_json(run.timing);
                    if (baseline.total_seconds > 0.0)
                        row["normalizedTime"] = run.total_seconds / baseline.total_seconds;
                    if (cfg.task == "kcenter" && baseline.quality > 0.0)
                        row["normalizedRadius"] = run.quality / baseline.quality;
                    if (!ds.injected_outliers.empty())
                        row["outlierRecall"] = detail::recall_against(run.discarded, ds.injected_outliers);
                    accumulate(cfg.variant, rate, row);
                    report.rows.push_back(std::move(row));
                } else {
                    // reduce and bench measure the map itself
                    const Variant variant = variant_from_name(cfg.variant);
                    const auto t0 = std::chrono::steady_clock::now();
                    const ProjectionMap map = ProjectionMap::make(variant, ds.dim(), d_tilde, seed);
                    const double t_build = detail::seconds_since(t0);
                    const auto t1 = std::chrono::steady_clock::now();
                    const PointSet mapped = map.apply(ds.points);
                    const double t_apply = detail::seconds_since(t1);
                    (void)mapped;

                    const std::size_t all_pairs = ds.size() * (ds.size() - 1) / 2;
                    const DistortionReport rep =
                        distortion_report(ds.points, map, all_pairs <= 20000 ? 0 : 20000, cfg.eps, seed);

                    nlohmann::json row = base_row(cfg.variant.c_str(), rate, trial, seed, d_tilde);
                    row["fracWithin"] = rep.frac_within;
                    row["maxRel"] = rep.max_rel;
                    row["meanRel"] = rep.mean_rel;
                    row["pairs"] = rep.pairs;
                    row["buildSeconds"] = t_build;
                    row["applySeconds"] = t_apply;
                    accumulate(cfg.variant, rate, row);
                    report.rows.push_back(std::move(row));
                }
            }
        }
    }

    std::string csv = "task,variant,rate,trials,mean_" + std::string(metric) +
                      ",mean_normalized_time,mean_normalized_radius,mean_outlier_recall\n";
    for (const Acc& a : accs) {
        const double c = static_cast<double>(a.count);
        csv += cfg.task + "," + a.variant + "," + detail::shortest(a.rate) + "," + std::to_string(a.count);
        csv += "," + detail::shortest(a.quality / c);
        csv += "," + (a.has_normalized ? detail::shortest(a.normalized_time / c) : std::string());
        csv += "," + (cfg.task == "kcenter" ? detail::shortest(a.normalized_radius / c) : std::string());
        csv += "," + (a.has_recall ? detail::shortest(a.recall / c) : std::string());
        csv += '\n';
    }
    report.summary_csv = std::move(csv);

    if (!cfg.output_path.empty()) {
        std::ofstream out(cfg.output_path, std::ios::binary);
        if (!out) throw ConfigError("output: cannot open '" + cfg.output_path + "' for writing");
        out << report.jsonl();
        if (!out) throw ConfigError("output: write to '" + cfg.output_path + "' failed");
        const std::string summary_path = cfg.output_path + ".summary.csv";
        std::ofstream sum(summary_path, std::ios::binary);
        if (!sum) throw ConfigError("output: cannot open '" + summary_path + "' for writing");
        sum << report.summary_csv;
    }
    return report;
}

}  // namespace jlrobust
