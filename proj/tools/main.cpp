// relsim command line: dataset -> distance matrices -> clustering / kNN
// evaluation, plus a neighbourhood-tree inspector. Subcommands communicate
// through files so the expensive pairwise stage runs once per dataset.
//
// Exit codes: 0 success, 1 data error (unreadable or inconsistent input
// files), 2 usage error (bad flags or flag/data combinations).

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "relsim/clustering.hpp"
#include "relsim/dissimilarity.hpp"
#include "relsim/evaluation.hpp"
#include "relsim/ingest.hpp"
#include "relsim/neighbourhood_tree.hpp"
#include "relsim/parallel.hpp"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

int exit_code_for(const relsim::Error& e) {
    switch (e.code()) {
        case relsim::errc::weight_sum_invalid:
        case relsim::errc::invalid_depth:
        case relsim::errc::bad_k:
        case relsim::errc::bad_grid:
        case relsim::errc::missing_labels:
        case relsim::errc::empty_train:
            return kExitUsage;
        default:
            return kExitData;
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) relsim::raise(relsim::errc::parse_error, "cannot open '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) relsim::raise(relsim::errc::parse_error, "cannot write '" + path + "'");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    auto out = open_output(path);
    out << text;
}

relsim::DissimilarityConfig make_config(const std::vector<double>& weights, int depth) {
    relsim::DissimilarityConfig cfg;
    cfg.depth = depth;
    if (weights.size() != 5)
        relsim::raise(relsim::errc::weight_sum_invalid, "--weights takes exactly five values");
    for (std::size_t i = 0; i < 5; ++i) cfg.weights[i] = weights[i];
    cfg.validate();
    return cfg;
}

nlohmann::json config_json(const relsim::DissimilarityConfig& cfg) {
    return {{"weights", cfg.weights}, {"depth", cfg.depth},
            {"aggregates", cfg.aggregate_mean && cfg.aggregate_stddev
                               ? std::vector<std::string>{"mean", "stddev"}
                               : std::vector<std::string>{cfg.aggregate_mean ? "mean" : "stddev"}}};
}

int cmd_distances(const std::string& dataset_path, const std::string& out_path,
                  const std::vector<double>& weights, int depth,
                  const std::string& components_prefix, unsigned workers) {
    const relsim::DissimilarityConfig cfg = make_config(weights, depth);
    auto in = open_input(dataset_path);
    const relsim::Dataset ds = relsim::parse_dataset(in);
    const relsim::PairwiseResult res = relsim::pairwise_matrix(ds, cfg, workers);
    write_text(out_path, relsim::matrix_to_string(res.distance.values, res.distance.ids));
    if (!components_prefix.empty()) {
        for (std::size_t c = 0; c < 5; ++c) {
            auto out = open_output(components_prefix + "." +
                                   relsim::ComponentMatrices::names[c] + ".csv");
            relsim::write_matrix(out, res.normalized.component(c), res.normalized.ids);
        }
    }
    return 0;
}

int cmd_cluster(const std::string& matrix_path, int k, const std::string& method,
                const std::string& linkage, const std::string& affinity, double sigma,
                int restarts, std::uint64_t seed, const std::string& labels_path, bool want_ari,
                const std::string& out_path, const std::string& report_path) {
    if (want_ari && labels_path.empty()) {
        std::cerr << "error: --ari requires --labels\n";
        return kExitUsage;
    }
    if (method != "agglomerative" && method != "spectral") {
        std::cerr << "error: unknown method '" << method << "'\n";
        return kExitUsage;
    }
    if (k < 1) {
        std::cerr << "error: --k must be >= 1\n";
        return kExitUsage;
    }
    const auto start = std::chrono::steady_clock::now();
    auto in = open_input(matrix_path);
    auto [matrix, ids] = relsim::parse_matrix(in);

    relsim::ClusterAssignment assignment;
    std::vector<std::string> warnings;
    if (method == "agglomerative") {
        assignment = relsim::agglomerative(matrix, ids, k, relsim::linkage_from_name(linkage));
    } else if (method == "spectral") {
        relsim::SpectralParams params;
        params.affinity = affinity == "gaussian" ? relsim::SpectralParams::Affinity::gaussian
                                                 : relsim::SpectralParams::Affinity::one_minus;
        params.sigma = sigma;
        params.kmeans_restarts = restarts;
        params.seed = seed;
        assignment = relsim::spectral(matrix, ids, k, params, &warnings);
    }

    std::ostringstream lines;
    for (std::size_t i = 0; i < assignment.ids.size(); ++i)
        lines << assignment.ids[i] << ' ' << assignment.cluster[i] << '\n';
    write_text(out_path, lines.str());

    nlohmann::json report{{"task", "clustering"}, {"method", method}, {"k", k},
                          {"seed", seed}, {"warnings", warnings}};
    if (method == "agglomerative") report["linkage"] = linkage;
    if (method == "spectral") {
        report["affinity"] = affinity;
        if (affinity == "gaussian") report["sigma"] = sigma;
        report["restarts"] = restarts;
    }
    if (!labels_path.empty()) {
        auto lin = open_input(labels_path);
        const relsim::LabelMap labels = relsim::parse_labels(lin);
        report["ari"] = relsim::adjusted_rand_index(assignment, labels);
    }
    report["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!report_path.empty()) write_text(report_path, report.dump(2) + "\n");
    return 0;
}

int cmd_knn(const std::string& dataset_path, int k, int folds, bool tune, double grid_step,
            std::uint64_t seed, const std::vector<double>& weights, int depth, unsigned workers,
            const std::string& report_path) {
    const relsim::DissimilarityConfig cfg = make_config(weights, depth);
    if (k < 1) {
        std::cerr << "error: --k must be >= 1\n";
        return kExitUsage;
    }
    if (folds < 2) {
        std::cerr << "error: --folds must be >= 2\n";
        return kExitUsage;
    }
    if (tune && grid_step != 0.0) relsim::weight_grid(grid_step); // fail fast on a bad step
    auto in = open_input(dataset_path);
    const relsim::Dataset ds = relsim::parse_dataset(in);
    if (ds.labels.empty())
        relsim::raise(relsim::errc::missing_labels, "kNN evaluation needs label lines");

    relsim::EvaluationReport rep;
    if (tune) {
        // --grid-step 0 degenerates the grid to the --weights vector alone
        const auto grid = grid_step == 0.0
                              ? std::vector<relsim::WeightVector>{cfg.weights}
                              : relsim::weight_grid(grid_step);
        rep = relsim::tune_weights(ds, cfg, grid, folds, k, seed, workers);
    } else {
        const relsim::PairwiseResult res = relsim::pairwise_matrix(ds, cfg, workers);
        rep = relsim::knn_cross_validate(res.distance.values, res.distance.ids, ds.labels, folds,
                                         k, seed);
    }

    nlohmann::json report{{"task", rep.task},
                          {"k", k},
                          {"folds", rep.folds_used},
                          {"seed", seed},
                          {"tuned", tune},
                          {"fold_accuracy", rep.fold_accuracy},
                          {"mean_accuracy", rep.mean_accuracy},
                          {"warnings", rep.warnings},
                          {"wall_seconds", rep.wall_seconds},
                          {"config", config_json(cfg)}};
    if (tune) {
        report["grid_step"] = grid_step;
        report["selected_weights"] = rep.selected_weights;
    }
    write_text(report_path, report.dump(2) + "\n");
    return 0;
}

int cmd_inspect_tree(const std::string& dataset_path, const std::string& vertex, int depth) {
    if (depth < 1) {
        std::cerr << "error: --depth must be >= 1\n";
        return kExitUsage;
    }
    auto in = open_input(dataset_path);
    const relsim::Dataset ds = relsim::parse_dataset(in);
    if (!ds.graph.has_vertex(vertex)) {
        std::cerr << "error: vertex '" << vertex << "' is not in the dataset\n";
        return kExitUsage;
    }
    const relsim::NeighbourhoodTree tree = relsim::build_tree(ds.graph, vertex, depth);

    std::ostringstream out;
    out << "root " << vertex << '\n';
    out << "depth " << depth << '\n';
    for (int l = 1; l <= depth; ++l) {
        out << "level " << l << '\n';
        std::map<std::string, int> by_id; // sorted by vertex id
        for (const auto& [v, count] : tree.level_vertices(l)) by_id[ds.graph.vertex(v).id] = count;
        for (const auto& [id, count] : by_id) out << "  v " << id << " x" << count << '\n';
        std::map<std::pair<std::string, int>, int> by_label;
        for (const auto& [label, count] : tree.level_edge_labels(l))
            by_label[{ds.graph.edge_type(label.edge_type).name, label.parent_position}] = count;
        for (const auto& [label, count] : by_label)
            out << "  e (" << label.first << ',' << label.second << ") x" << count << '\n';
    }
    std::cout << out.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"relational similarity over typed hypergraphs"};
    app.require_subcommand(1);

    std::string dataset_path, matrix_path, out_path = "-", report_path, labels_path;
    std::string components_prefix, method = "agglomerative", linkage = "average";
    std::string affinity = "one_minus", vertex;
    std::vector<double> weights{0.2, 0.2, 0.2, 0.2, 0.2};
    int depth = 1, k = 0, folds = 10, knn_k = 5, restarts = 10;
    double sigma = 1.0, grid_step = 0.2;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    bool tune = true, want_ari = false;

    auto* distances = app.add_subcommand("distances", "compute the pairwise distance matrix");
    distances->add_option("dataset", dataset_path, "dataset file")->required();
    distances->add_option("--out", out_path, "matrix output path, - for stdout");
    distances->add_option("--depth", depth, "neighbourhood tree depth");
    distances->add_option("--weights", weights, "five component weights, must sum to 1")
        ->expected(5);
    distances->add_option("--emit-components", components_prefix,
                          "also write <prefix>.<component>.csv per component");
    distances->add_option("--workers", workers, "worker threads (default: RELSIM_WORKERS or cores)");

    auto* cluster = app.add_subcommand("cluster", "cluster a precomputed distance matrix");
    cluster->add_option("matrix", matrix_path, "distance matrix file")->required();
    cluster->add_option("--k", k, "number of clusters")->required();
    cluster->add_option("--method", method, "agglomerative or spectral");
    cluster->add_option("--linkage", linkage, "single, complete or average");
    cluster->add_option("--affinity", affinity, "one_minus or gaussian");
    cluster->add_option("--sigma", sigma, "gaussian affinity width");
    cluster->add_option("--restarts", restarts, "k-means restarts");
    cluster->add_option("--seed", seed, "random seed");
    cluster->add_option("--labels", labels_path, "labels file for ARI scoring");
    cluster->add_flag("--ari", want_ari, "require ARI in the report (needs --labels)");
    cluster->add_option("--out", out_path, "assignment output path, - for stdout");
    cluster->add_option("--report", report_path, "JSON report path");

    auto* knn = app.add_subcommand("knn", "kNN cross-validation with optional weight tuning");
    knn->add_option("dataset", dataset_path, "dataset file with labels")->required();
    knn->add_option("--k", knn_k, "neighbour count");
    knn->add_option("--folds", folds, "cross-validation folds");
    knn->add_flag("--tune,!--no-tune", tune, "tune weights by nested cross-validation");
    knn->add_option("--grid-step", grid_step, "weight grid granularity");
    knn->add_option("--seed", seed, "random seed");
    knn->add_option("--depth", depth, "neighbourhood tree depth");
    knn->add_option("--weights", weights, "weights for the untuned run")->expected(5);
    knn->add_option("--workers", workers, "worker threads");
    knn->add_option("--report", report_path, "JSON report path, - for stdout");

    auto* inspect = app.add_subcommand("inspect-tree", "dump one neighbourhood tree");
    inspect->add_option("dataset", dataset_path, "dataset file")->required();
    inspect->add_option("--vertex", vertex, "root vertex id")->required();
    inspect->add_option("--depth", depth, "neighbourhood tree depth");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (distances->parsed())
            return cmd_distances(dataset_path, out_path, weights, depth, components_prefix,
                                 workers);
        if (cluster->parsed())
            return cmd_cluster(matrix_path, k, method, linkage, affinity, sigma, restarts, seed,
                               labels_path, want_ari, out_path, report_path);
        if (knn->parsed())
            return cmd_knn(dataset_path, knn_k, folds, tune, grid_step, seed, weights, depth,
                           workers, report_path.empty() ? "-" : report_path);
        if (inspect->parsed()) return cmd_inspect_tree(dataset_path, vertex, depth);
    } catch (const relsim::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
