#pragma once

#include "wips/eval.hpp"
#include "wips/graph.hpp"
#include "wips/spectral.hpp"
#include "wips/trainer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wips {

// Orchestration behind the CLI subcommands. Everything here is
// deterministic in its inputs: reruns with equal flags produce
// byte-identical output files.

struct SynthSpec {
    std::string model = "wips";
    std::size_t n = 100;
    std::size_t dim = 4;
    std::size_t neg_dims = 2;
    std::uint64_t seed = 1;
    double scale = 1.0;
    bool emit_features = false;
    std::string out_dir;
};

struct SynthResult {
    Graph graph;
    DenseMatrix truth;  // ground-truth similarity matrix
    std::string edges_path, truth_path, features_path;
};

// Samples ground-truth features Y ~ N(0,1)^{n x K} and lambda* with
// `neg_dims` trailing -1 entries, then draws w_ij ~ Bernoulli(sigma(scale *
// <y_i, y_j>_lambda*)). Writes edges.tsv, truth.tsv, manifest.tsv and
// optionally features.tsv under out_dir.
SynthResult synth_graph(const SynthSpec& spec);

DenseMatrix load_matrix_file(const std::string& path);
void save_matrix_file(const std::string& path, const DenseMatrix& m);

enum class ValidateMode { None, Recon, Split };

struct TrainJobSpec {
    std::string edges_path;
    std::string features_path;  // empty or "onehot" for 1-hot
    SimilarityHead head;        // kind, dim, fixed q / eps; lambda left empty
    bool q_fixed = false;       // when false, IPDS heads grid-search q
    TrainConfig config;
    ValidateMode validate = ValidateMode::None;
    double split_train = 0.64, split_valid = 0.16, split_test = 0.20;
    std::uint64_t split_seed = 0;
    std::size_t jobs = 1;
    std::string out_dir;
};

struct TrainJobResult {
    Checkpoint checkpoint;
    std::vector<GridCell> grid;  // empty for single runs
    double false_negative_rate = 0.0;
    std::string checkpoint_path, curve_path, manifest_path, grid_path;
};

TrainJobResult run_train_job(const TrainJobSpec& spec);

struct EvalJobSpec {
    std::string task;  // reconstruction | linkpred | classification
    std::string edges_path;
    std::string features_path;
    std::string checkpoint_path;
    std::string labels_path;  // classification
    std::uint64_t seed = 0;
    std::size_t repeats = 1;
    double split_train = 0.64, split_valid = 0.16, split_test = 0.20;
    std::string out_dir;
};

struct ReportRow {
    std::string task, head;
    std::size_t dim;
    std::string seed;  // a number, "mean" or "std"
    std::string metric;
    double value;
};

struct EvalJobResult {
    std::vector<ReportRow> rows;
    std::string report_path;
};

EvalJobResult run_eval_job(const EvalJobSpec& spec);

struct SpectralJobSpec {
    std::vector<std::string> kernels;  // empty selects the built-in set
    std::vector<std::size_t> ranks;    // empty selects {1, 2, 4, 8, n}
    std::size_t n = 24;
    std::size_t point_dim = 2;
    std::uint64_t seed = 7;
    std::string out_dir;  // empty writes to stdout only
};

struct SpectralJobResult {
    std::vector<HierarchyRow> rows;
    std::string report_path;
};

SpectralJobResult run_spectral_job(const SpectralJobSpec& spec);

// Convenience used by tests and the acceptance suite.
double reconstruction_auc(const Graph& g, const Checkpoint& ckpt, std::uint64_t seed);
double oracle_reconstruction_auc(const Graph& g, const DenseMatrix& truth, std::uint64_t seed);
double linkpred_auc(const Graph& full, const NodeSplit& split, const Checkpoint& ckpt,
                    std::uint64_t seed);

std::uint64_t fnv1a_file(const std::string& path);
std::string format_g17(double v);

}  // namespace wips
