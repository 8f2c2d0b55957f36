#include "wips/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_csv_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

std::vector<std::size_t> parse_csv_sizes(const std::string& csv) {
    std::vector<std::size_t> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoul(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph embedding with learned-sign weighted inner product similarity"};
    app.require_subcommand(1);
    app.set_config("--config");

    // ---- train ----
    auto* train = app.add_subcommand("train", "train an embedding model");
    std::string edges, features, head_name = "wips", hidden_csv = "64,64";
    std::string lr_grid_csv, q_ratio_grid_csv, split_csv = "0.64,0.16,0.20", validate = "none";
    std::string out_dir;
    std::size_t dim = 10;
    long q_fixed = -1;
    double eps_ball = 1e-5;
    wips::TrainConfig cfg;
    std::uint64_t split_seed = 0;
    std::size_t jobs = 1;
    bool degree_negatives = false;
    train->add_option("--edges", edges, "edge list file")->required();
    train->add_option("--features", features, "feature file path, or 'onehot'");
    train->add_option("--head", head_name, "similarity head")
        ->check(CLI::IsMember({"ips", "sips", "ipds", "wips", "poincare"}));
    train->add_option("--dim", dim, "feature dimension K");
    train->add_option("--hidden", hidden_csv, "hidden layer widths CSV; 'none' for linear");
    train->add_option("--q", q_fixed, "fixed q for ipds (otherwise grid-searched)");
    train->add_option("--eps-ball", eps_ball, "poincare ball clip margin");
    train->add_option("--lr", cfg.learning_rate, "learning rate");
    train->add_option("--lr-grid", lr_grid_csv, "learning rate grid CSV");
    train->add_option("--q-ratio-grid", q_ratio_grid_csv, "ipds q/K ratio grid CSV");
    train->add_option("--iters", cfg.max_iterations, "max iterations");
    train->add_option("--eval-interval", cfg.eval_interval, "validation interval");
    train->add_option("--batch", cfg.batch_size, "positives per batch");
    train->add_option("--negatives", cfg.negatives_per_positive, "negatives per positive");
    train->add_option("--seed", cfg.seed, "training seed");
    train->add_option("--validate", validate, "none | recon | split")
        ->check(CLI::IsMember({"none", "recon", "split"}));
    train->add_option("--split", split_csv, "train,valid,test node ratios");
    train->add_option("--split-seed", split_seed, "node split seed");
    train->add_option("--jobs", jobs, "parallel grid cells");
    train->add_flag("--degree-negatives", degree_negatives,
                    "sample negatives proportional to degree");
    train->add_option("--out", out_dir, "output directory")->required();

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    wips::EvalJobSpec espec;
    std::string eval_split_csv = "0.64,0.16,0.20";
    eval->add_option("--edges", espec.edges_path, "edge list file")->required();
    eval->add_option("--features", espec.features_path, "feature file path, or 'onehot'");
    eval->add_option("--ckpt", espec.checkpoint_path, "checkpoint file")->required();
    eval->add_option("--task", espec.task, "reconstruction | linkpred | classification")
        ->required()
        ->check(CLI::IsMember({"reconstruction", "linkpred", "classification"}));
    eval->add_option("--labels", espec.labels_path, "node labels file (classification)");
    eval->add_option("--seed", espec.seed, "evaluation seed");
    eval->add_option("--repeats", espec.repeats, "repeat count; adds mean and std rows");
    eval->add_option("--split", eval_split_csv, "train,valid,test node ratios");
    eval->add_option("--out", espec.out_dir, "output directory")->required();

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate a synthetic graph with known similarity");
    wips::SynthSpec sspec;
    synth->add_option("--model", sspec.model, "generator model");
    synth->add_option("--n", sspec.n, "node count");
    synth->add_option("--dim", sspec.dim, "ground-truth feature dimension");
    synth->add_option("--neg-dims", sspec.neg_dims, "trailing -1 entries of lambda*");
    synth->add_option("--scale", sspec.scale, "similarity scale before the link function");
    synth->add_option("--seed", sspec.seed, "generator seed");
    synth->add_flag("--emit-features", sspec.emit_features,
                    "write the ground-truth features as a data-vector file");
    synth->add_option("--out", sspec.out_dir, "output directory")->required();

    // ---- spectral ----
    auto* spectral = app.add_subcommand("spectral", "kernel hierarchy report");
    wips::SpectralJobSpec pspec;
    std::string ranks_csv;
    spectral->add_option("--kernel", pspec.kernels, "kernel name(s), e.g. gaussian:1");
    spectral->add_option("--ranks", ranks_csv, "ranks CSV");
    spectral->add_option("--n", pspec.n, "point count");
    spectral->add_option("--point-dim", pspec.point_dim, "point dimension");
    spectral->add_option("--seed", pspec.seed, "point seed");
    spectral->add_option("--out", pspec.out_dir, "output directory (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train->parsed()) {
            wips::TrainJobSpec spec;
            spec.edges_path = edges;
            spec.features_path = features;
            spec.head.kind = wips::head_kind_from_name(head_name);
            spec.head.dim = dim;
            spec.head.eps_ball = eps_ball;
            if (q_fixed >= 0) {
                spec.head.q = static_cast<std::size_t>(q_fixed);
                spec.q_fixed = true;
            }
            spec.config = cfg;
            spec.config.hidden_dims =
                (hidden_csv == "none" || hidden_csv.empty()) ? std::vector<std::size_t>{}
                                                             : parse_csv_sizes(hidden_csv);
            if (!lr_grid_csv.empty()) spec.config.lr_grid = parse_csv_doubles(lr_grid_csv);
            if (!q_ratio_grid_csv.empty())
                spec.config.q_ratio_grid = parse_csv_doubles(q_ratio_grid_csv);
            if (degree_negatives)
                spec.config.negative_sampling = wips::NegativeSampling::DegreeProportional;
            spec.validate = validate == "none"
                                ? wips::ValidateMode::None
                                : (validate == "recon" ? wips::ValidateMode::Recon
                                                       : wips::ValidateMode::Split);
            const auto ratios = parse_csv_doubles(split_csv);
            if (ratios.size() != 3) throw std::runtime_error("--split needs three ratios");
            spec.split_train = ratios[0];
            spec.split_valid = ratios[1];
            spec.split_test = ratios[2];
            spec.split_seed = split_seed;
            spec.jobs = jobs;
            spec.out_dir = out_dir;
            const auto res = wips::run_train_job(spec);
            std::printf("checkpoint %s\n", res.checkpoint_path.c_str());
            if (res.checkpoint.best_val_auc)
                std::printf("best_val_auc %.6f at iteration %zu\n", *res.checkpoint.best_val_auc,
                            res.checkpoint.iteration);
        } else if (eval->parsed()) {
            const auto ratios = parse_csv_doubles(eval_split_csv);
            if (ratios.size() != 3) throw std::runtime_error("--split needs three ratios");
            espec.split_train = ratios[0];
            espec.split_valid = ratios[1];
            espec.split_test = ratios[2];
            const auto res = wips::run_eval_job(espec);
            for (const auto& r : res.rows)
                std::printf("%s\t%s\t%zu\t%s\t%s\t%.6f\n", r.task.c_str(), r.head.c_str(), r.dim,
                            r.seed.c_str(), r.metric.c_str(), r.value);
        } else if (synth->parsed()) {
            const auto res = wips::synth_graph(sspec);
            std::printf("edges %s (%zu edges over %zu nodes)\n", res.edges_path.c_str(),
                        res.graph.edges.size(), res.graph.n);
        } else if (spectral->parsed()) {
            if (!ranks_csv.empty()) pspec.ranks = parse_csv_sizes(ranks_csv);
            const auto res = wips::run_spectral_job(pspec);
            std::ostringstream ss;
            wips::write_hierarchy_tsv(ss, res.rows);
            std::fputs(ss.str().c_str(), stdout);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
