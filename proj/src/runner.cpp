#include "wips/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wips {

namespace fs = std::filesystem;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string out_file(const std::string& dir, const char* name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << "key\tvalue\n";
    for (const auto& [k, v] : entries) out << k << '\t' << v << '\n';
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string csv_of_dims(const std::vector<std::size_t>& dims) {
    if (dims.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
    return s;
}

}  // namespace

void save_matrix_file(const std::string& path, const DenseMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write matrix: " + path);
    out << "matrix " << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_g17(m(i, j));
        out << '\n';
    }
}

DenseMatrix load_matrix_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read matrix: " + path);
    std::string tag;
    std::size_t r, c;
    if (!(in >> tag >> r >> c) || tag != "matrix")
        throw std::runtime_error("bad matrix header in " + path);
    DenseMatrix m(r, c);
    for (auto& v : m.data())
        if (!(in >> v)) throw std::runtime_error("short matrix file: " + path);
    return m;
}

SynthResult synth_graph(const SynthSpec& spec) {
    if (spec.model != "wips") throw std::invalid_argument("synth: unknown model " + spec.model);
    if (spec.dim == 0 || spec.n < 2) throw std::invalid_argument("synth: need n >= 2 and dim >= 1");
    if (spec.neg_dims > spec.dim) throw std::invalid_argument("synth: neg-dims exceeds dim");

    Rng rng(spec.seed);
    DenseMatrix y(spec.n, spec.dim);
    for (auto& v : y.data()) v = rng.normal();
    std::vector<double> lambda(spec.dim, 1.0);
    for (std::size_t k = spec.dim - spec.neg_dims; k < spec.dim; ++k) lambda[k] = -1.0;

    SynthResult res;
    res.truth = DenseMatrix(spec.n, spec.n);
    res.graph.n = spec.n;
    for (std::size_t i = 0; i < spec.n; ++i)
        for (std::size_t j = i; j < spec.n; ++j) {
            double h = 0.0;
            for (std::size_t k = 0; k < spec.dim; ++k) h += lambda[k] * y(i, k) * y(j, k);
            h *= spec.scale;
            res.truth(i, j) = h;
            res.truth(j, i) = h;
            if (i == j) continue;
            if (rng.uniform() < sigmoid(h))
                res.graph.edges.push_back({static_cast<std::uint32_t>(i),
                                           static_cast<std::uint32_t>(j), 1.0});
        }
    res.graph.onehot = true;
    res.graph.build_edge_index();

    if (!spec.out_dir.empty()) {
        res.edges_path = out_file(spec.out_dir, "edges.tsv");
        {
            std::ofstream out(res.edges_path, std::ios::binary);
            for (const auto& e : res.graph.edges) out << e.i << ' ' << e.j << '\n';
        }
        res.truth_path = out_file(spec.out_dir, "truth.tsv");
        save_matrix_file(res.truth_path, res.truth);
        if (spec.emit_features) {
            res.features_path = out_file(spec.out_dir, "features.tsv");
            std::ofstream out(res.features_path, std::ios::binary);
            out << spec.n << ' ' << spec.dim << '\n';
            for (std::size_t i = 0; i < spec.n; ++i) {
                for (std::size_t k = 0; k < spec.dim; ++k)
                    out << (k ? " " : "") << format_g17(y(i, k));
                out << '\n';
            }
        }
        write_manifest(out_file(spec.out_dir, "manifest.tsv"),
                       {{"subcommand", "synth"},
                        {"model", spec.model},
                        {"n", std::to_string(spec.n)},
                        {"dim", std::to_string(spec.dim)},
                        {"neg_dims", std::to_string(spec.neg_dims)},
                        {"scale", format_g17(spec.scale)},
                        {"seed", std::to_string(spec.seed)},
                        {"edges", "edges.tsv"},
                        {"edges_fnv1a", hex64(fnv1a_file(res.edges_path))},
                        {"truth_fnv1a", hex64(fnv1a_file(res.truth_path))}});
    }
    return res;
}

namespace {

Graph load_job_graph(const std::string& edges_path, const std::string& features_path) {
    return load_graph_files(edges_path, features_path);
}

void write_curve(const std::string& path, const std::vector<CurvePoint>& curve) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write curve: " + path);
    out << "iteration\tloss\tval_auc\n";
    for (const auto& cp : curve) {
        out << cp.iteration << '\t' << format_g17(cp.loss) << '\t';
        out << (cp.val_auc ? format_g17(*cp.val_auc) : "-");
        out << '\n';
    }
}

}  // namespace

TrainJobResult run_train_job(const TrainJobSpec& spec) {
    Graph full = load_job_graph(spec.edges_path, spec.features_path);

    // Training graph and validation pairs per mode.
    Graph train_graph;
    const Graph* train_ptr = &full;
    ValidationSpec validation;
    bool has_validation = false;
    std::optional<NodeSplit> split;

    switch (spec.validate) {
        case ValidateMode::None:
            break;
        case ValidateMode::Recon: {
            validation.graph = &full;
            validation.pairs = reconstruction_pairs(full, spec.config.seed);
            has_validation = true;
            break;
        }
        case ValidateMode::Split: {
            if (full.onehot)
                throw std::runtime_error(
                    "inductive validation is impossible with 1-hot features: held-out nodes have "
                    "no data vectors to embed; supply --features");
            Rng srng(spec.split_seed);
            split = split_nodes(full, spec.split_train, spec.split_valid, spec.split_test, srng);
            train_graph = induced_subgraph(full, split->train);
            train_ptr = &train_graph;
            // Validation pairs: (u in valid, v in train or valid), labels from
            // the full graph; test nodes stay unseen until evaluation.
            std::vector<std::uint32_t> candidates = split->train;
            candidates.insert(candidates.end(), split->valid.begin(), split->valid.end());
            std::sort(candidates.begin(), candidates.end());
            validation.graph = &full;
            validation.pairs = linkpred_pairs(full, split->valid, candidates, spec.split_seed);
            has_validation = true;
            break;
        }
    }

    const bool grid_q = spec.head.kind == HeadKind::IPDS && !spec.q_fixed;
    const bool grid_lr = !spec.config.lr_grid.empty() && spec.config.lr_grid.size() > 1;
    const bool use_grid = grid_q || grid_lr || !spec.config.lr_grid.empty();

    TrainJobResult res;
    if (use_grid) {
        if (!has_validation) {
            // Grid cells are ranked by validation AUC; default to the
            // reconstruction pairs of the training graph.
            validation.graph = train_ptr;
            validation.pairs = reconstruction_pairs(*train_ptr, spec.config.seed);
            has_validation = true;
        }
        GridResult gr = grid_search(*train_ptr, spec.head, spec.config, validation, spec.jobs);
        res.checkpoint = std::move(gr.best);
        res.grid = std::move(gr.cells);
    } else {
        TrainResult tr = train(*train_ptr, spec.head, spec.config,
                               has_validation ? &validation : nullptr);
        res.checkpoint = std::move(tr.checkpoint);
        res.false_negative_rate = tr.false_negative_rate;
        if (!spec.out_dir.empty()) {
            res.curve_path = out_file(spec.out_dir, "curve.tsv");
            write_curve(res.curve_path, tr.curve);
        }
    }

    if (!spec.out_dir.empty()) {
        res.checkpoint_path = out_file(spec.out_dir, "ckpt.txt");
        save_checkpoint_file(res.checkpoint_path, res.checkpoint);
        if (!res.grid.empty()) {
            res.grid_path = out_file(spec.out_dir, "grid.tsv");
            std::ofstream out(res.grid_path, std::ios::binary);
            out << "lr\tq\tval_auc\tbest_iteration\n";
            for (const auto& c : res.grid) {
                out << format_g17(c.learning_rate) << '\t';
                if (c.q >= 0) out << c.q; else out << '-';
                out << '\t' << format_g17(c.best_val_auc) << '\t' << c.best_iteration << '\n';
            }
        }

        std::vector<std::pair<std::string, std::string>> m;
        m.emplace_back("subcommand", "train");
        m.emplace_back("edges", spec.edges_path);
        m.emplace_back("edges_fnv1a", hex64(fnv1a_file(spec.edges_path)));
        m.emplace_back("features", spec.features_path.empty() ? "onehot" : spec.features_path);
        if (!spec.features_path.empty() && spec.features_path != "onehot")
            m.emplace_back("features_fnv1a", hex64(fnv1a_file(spec.features_path)));
        m.emplace_back("head", head_kind_name(spec.head.kind));
        m.emplace_back("dim", std::to_string(spec.head.dim));
        if (spec.head.kind == HeadKind::IPDS && spec.q_fixed)
            m.emplace_back("q", std::to_string(spec.head.q));
        if (spec.head.kind == HeadKind::NegPoincare)
            m.emplace_back("eps_ball", format_g17(spec.head.eps_ball));
        m.emplace_back("hidden", csv_of_dims(spec.config.hidden_dims));
        m.emplace_back("lr", format_g17(spec.config.learning_rate));
        {
            std::string lrs;
            for (std::size_t i = 0; i < spec.config.lr_grid.size(); ++i)
                lrs += (i ? "," : "") + format_g17(spec.config.lr_grid[i]);
            m.emplace_back("lr_grid", lrs.empty() ? "-" : lrs);
        }
        if (grid_q) {
            std::string qs;
            for (std::size_t i = 0; i < spec.config.q_ratio_grid.size(); ++i)
                qs += (i ? "," : "") + format_g17(spec.config.q_ratio_grid[i]);
            m.emplace_back("q_ratio_grid", qs);
        }
        m.emplace_back("iters", std::to_string(spec.config.max_iterations));
        m.emplace_back("eval_interval", std::to_string(spec.config.eval_interval));
        m.emplace_back("batch", std::to_string(spec.config.batch_size));
        m.emplace_back("negatives", std::to_string(spec.config.negatives_per_positive));
        m.emplace_back("negative_sampling",
                       spec.config.negative_sampling == NegativeSampling::Uniform ? "uniform"
                                                                                  : "degree");
        m.emplace_back("seed", std::to_string(spec.config.seed));
        m.emplace_back("validate", spec.validate == ValidateMode::None
                                       ? "none"
                                       : (spec.validate == ValidateMode::Recon ? "recon" : "split"));
        if (spec.validate == ValidateMode::Split) {
            m.emplace_back("split", format_g17(spec.split_train) + "," +
                                        format_g17(spec.split_valid) + "," +
                                        format_g17(spec.split_test));
            m.emplace_back("split_seed", std::to_string(spec.split_seed));
        }
        m.emplace_back("best_iteration", std::to_string(res.checkpoint.iteration));
        m.emplace_back("best_val_auc", res.checkpoint.best_val_auc
                                           ? format_g17(*res.checkpoint.best_val_auc)
                                           : "-");
        if (!use_grid)
            m.emplace_back("false_negative_rate", format_g17(res.false_negative_rate));
        res.manifest_path = out_file(spec.out_dir, "manifest.tsv");
        write_manifest(res.manifest_path, m);
    }
    return res;
}

double reconstruction_auc(const Graph& g, const Checkpoint& ckpt, std::uint64_t seed) {
    if (g.feature_dim() != ckpt.encoder.input_dim())
        throw std::runtime_error("reconstruction: graph feature width " +
                                 std::to_string(g.feature_dim()) +
                                 " does not match checkpoint input dim " +
                                 std::to_string(ckpt.encoder.input_dim()));
    const DenseMatrix y = embed_all_nodes(ckpt.encoder, g);
    return auc_for_pairs(y, ckpt.head, reconstruction_pairs(g, seed));
}

double oracle_reconstruction_auc(const Graph& g, const DenseMatrix& truth, std::uint64_t seed) {
    const PairSet ps = reconstruction_pairs(g, seed);
    std::vector<ScoredPair> scored;
    scored.reserve(ps.pairs.size());
    for (std::size_t k = 0; k < ps.pairs.size(); ++k)
        scored.push_back({truth(ps.pairs[k].first, ps.pairs[k].second), ps.labels[k]});
    return roc_auc(std::move(scored));
}

double linkpred_auc(const Graph& full, const NodeSplit& split, const Checkpoint& ckpt,
                    std::uint64_t seed) {
    if (full.onehot)
        throw std::runtime_error(
            "inductive link prediction is impossible with 1-hot features: held-out nodes have no "
            "data vectors to embed");
    if (full.feature_dim() != ckpt.encoder.input_dim())
        throw std::runtime_error("linkpred: feature width does not match checkpoint input dim");
    std::vector<std::uint32_t> all(full.n);
    for (std::size_t i = 0; i < full.n; ++i) all[i] = static_cast<std::uint32_t>(i);
    const PairSet ps = linkpred_pairs(full, split.test, all, seed);
    const DenseMatrix y = embed_all_nodes(ckpt.encoder, full);
    return auc_for_pairs(y, ckpt.head, ps);
}

namespace {

std::vector<int> load_labels(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels file: " + path);
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        int v;
        if (!(ls >> v)) continue;
        labels.push_back(v);
    }
    if (labels.size() != n)
        throw std::runtime_error("labels file has " + std::to_string(labels.size()) +
                                 " entries for " + std::to_string(n) + " nodes");
    return labels;
}

void append_summary_rows(std::vector<ReportRow>& rows, const std::vector<double>& values,
                         const ReportRow& proto) {
    if (values.size() < 2) return;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size() - 1);
    ReportRow mr = proto;
    mr.seed = "mean";
    mr.value = mean;
    rows.push_back(mr);
    ReportRow sr = proto;
    sr.seed = "std";
    sr.value = std::sqrt(var);
    rows.push_back(sr);
}

}  // namespace

EvalJobResult run_eval_job(const EvalJobSpec& spec) {
    Graph full = load_job_graph(spec.edges_path, spec.features_path);
    Checkpoint ckpt = load_checkpoint_file(spec.checkpoint_path);
    EvalJobResult res;

    ReportRow proto;
    proto.task = spec.task;
    proto.head = head_kind_name(ckpt.head.kind);
    proto.dim = ckpt.head.dim;

    if (spec.task == "reconstruction") {
        std::vector<double> values;
        for (std::size_t r = 0; r < spec.repeats; ++r) {
            const std::uint64_t seed = spec.seed + r;
            const double auc = reconstruction_auc(full, ckpt, seed);
            ReportRow row = proto;
            row.seed = std::to_string(seed);
            row.metric = "auc";
            row.value = auc;
            res.rows.push_back(row);
            values.push_back(auc);
        }
        ReportRow p = proto;
        p.metric = "auc";
        append_summary_rows(res.rows, values, p);
    } else if (spec.task == "linkpred") {
        std::vector<double> values;
        for (std::size_t r = 0; r < spec.repeats; ++r) {
            const std::uint64_t seed = spec.seed + r;
            Rng srng(seed);
            const NodeSplit split =
                split_nodes(full, spec.split_train, spec.split_valid, spec.split_test, srng);
            Checkpoint model = ckpt;
            if (spec.repeats > 1) {
                // Full inductive protocol: retrain on the induced train
                // subgraph with the checkpoint's own hyperparameters.
                Graph train_graph = induced_subgraph(full, split.train);
                std::vector<std::uint32_t> candidates = split.train;
                candidates.insert(candidates.end(), split.valid.begin(), split.valid.end());
                std::sort(candidates.begin(), candidates.end());
                ValidationSpec validation;
                validation.graph = &full;
                validation.pairs = linkpred_pairs(full, split.valid, candidates, seed);
                TrainConfig cfg = ckpt.config;
                cfg.seed = Rng(seed).fork(17).seed();
                SimilarityHead head_spec = ckpt.head;
                if (head_spec.kind == HeadKind::WIPS) head_spec.lambda.clear();  // re-init
                model = train(train_graph, head_spec, cfg, &validation).checkpoint;
            }
            const double auc = linkpred_auc(full, split, model, seed);
            ReportRow row = proto;
            row.seed = std::to_string(seed);
            row.metric = "auc";
            row.value = auc;
            res.rows.push_back(row);
            values.push_back(auc);
        }
        ReportRow p = proto;
        p.metric = "auc";
        append_summary_rows(res.rows, values, p);
    } else if (spec.task == "classification") {
        if (spec.labels_path.empty())
            throw std::runtime_error("classification requires --labels");
        const std::vector<int> labels = load_labels(spec.labels_path, full.n);
        const DenseMatrix y = embed_all_nodes(ckpt.encoder, full);

        std::optional<DenseMatrix> y_hyp;
        if (ckpt.head.kind == HeadKind::NegPoincare) {
            DenseMatrix h(y.rows(), y.cols());
            for (std::size_t i = 0; i < y.rows(); ++i) {
                const auto v = to_hyperbolic(std::span<const double>(y.row(i), y.cols()),
                                             ckpt.head.eps_ball);
                for (std::size_t k = 0; k < y.cols(); ++k) h(i, k) = v[k];
            }
            y_hyp = std::move(h);
        }

        auto run_repeats = [&](const DenseMatrix& feats, const std::string& task_name) {
            ReportRow p = proto;
            p.task = task_name;
            std::vector<double> values;
            for (std::size_t r = 0; r < spec.repeats; ++r) {
                const std::uint64_t seed = spec.seed + r;
                Rng srng(seed);
                const NodeSplit split =
                    split_nodes(full, spec.split_train, spec.split_valid, spec.split_test, srng);
                DenseMatrix train_x(split.train.size(), feats.cols());
                std::vector<int> train_y;
                for (std::size_t i = 0; i < split.train.size(); ++i) {
                    for (std::size_t k = 0; k < feats.cols(); ++k)
                        train_x(i, k) = feats(split.train[i], k);
                    train_y.push_back(labels[split.train[i]]);
                }
                DenseMatrix test_x(split.test.size(), feats.cols());
                std::vector<int> test_y;
                for (std::size_t i = 0; i < split.test.size(); ++i) {
                    for (std::size_t k = 0; k < feats.cols(); ++k)
                        test_x(i, k) = feats(split.test[i], k);
                    test_y.push_back(labels[split.test[i]]);
                }
                const ClassifierModel model = train_classifier(train_x, train_y);
                const double acc = classify_accuracy(model, test_x, test_y);
                ReportRow row = p;
                row.seed = std::to_string(seed);
                row.metric = "accuracy";
                row.value = acc;
                res.rows.push_back(row);
                values.push_back(acc);
            }
            p.metric = "accuracy";
            append_summary_rows(res.rows, values, p);
        };
        run_repeats(y, "classification");
        if (y_hyp) run_repeats(*y_hyp, "classification_hyperbolic");
    } else {
        throw std::invalid_argument("unknown eval task: " + spec.task);
    }

    if (!spec.out_dir.empty()) {
        res.report_path = out_file(spec.out_dir, "report.tsv");
        std::ofstream out(res.report_path, std::ios::binary);
        out << "task\thead\tK\tseed\tmetric\tvalue\n";
        for (const auto& r : res.rows)
            out << r.task << '\t' << r.head << '\t' << r.dim << '\t' << r.seed << '\t' << r.metric
                << '\t' << format_g17(r.value) << '\n';
    }
    return res;
}

SpectralJobResult run_spectral_job(const SpectralJobSpec& spec) {
    std::vector<std::string> kernels = spec.kernels;
    if (kernels.empty())
        kernels = {"gaussian:1", "neg_sq_dist", "neg_poincare:1e-5", "epanechnikov:1",
                   "random_indefinite:2:4:11"};
    std::vector<std::size_t> ranks = spec.ranks;
    if (ranks.empty()) {
        for (std::size_t r : {std::size_t{1}, std::size_t{2}, std::size_t{4}, std::size_t{8}})
            if (r < spec.n) ranks.push_back(r);
        ranks.push_back(spec.n);
    }

    // Seeded points; scaled into the unit ball so the Poincare kernel is
    // defined on them.
    Rng rng(spec.seed);
    DenseMatrix points(spec.n, spec.point_dim);
    for (auto& v : points.data()) v = rng.normal();
    double max_norm = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < points.cols(); ++c) s += points(i, c) * points(i, c);
        max_norm = std::max(max_norm, std::sqrt(s));
    }
    if (max_norm > 0.0)
        for (auto& v : points.data()) v *= 0.8 / max_norm;

    SpectralJobResult res;
    res.rows = hierarchy_report(points, kernels, ranks);
    if (!spec.out_dir.empty()) {
        res.report_path = out_file(spec.out_dir, "hierarchy.tsv");
        std::ofstream out(res.report_path, std::ios::binary);
        write_hierarchy_tsv(out, res.rows);
    }
    return res;
}

}  // namespace wips
