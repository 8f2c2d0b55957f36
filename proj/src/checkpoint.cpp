#include "wips/trainer.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wips {

namespace {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_values(std::ostream& out, const double* v, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) out << ' ' << fmt_g17(v[k]);
}

[[noreturn]] void bad(const std::string& what) {
    throw std::runtime_error("checkpoint: " + what);
}

}  // namespace

std::string head_descriptor(const SimilarityHead& head) {
    switch (head.kind) {
        case HeadKind::IPS: return "ips";
        case HeadKind::SIPS: return "sips";
        case HeadKind::IPDS: return "ipds q=" + std::to_string(head.q);
        case HeadKind::WIPS: return "wips";
        case HeadKind::NegPoincare: return "poincare eps=" + fmt_g17(head.eps_ball);
    }
    throw std::logic_error("head_descriptor: bad enum");
}

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    out << "WIPS-CKPT v1\n";
    out << head_descriptor(ckpt.head) << '\n';
    out << "dims";
    for (std::size_t d : ckpt.encoder.layer_dims) out << ' ' << d;
    out << '\n';
    if (ckpt.head.has_lambda()) {
        for (std::size_t k = 0; k < ckpt.head.lambda.size(); ++k)
            out << (k ? " " : "") << fmt_g17(ckpt.head.lambda[k]);
        out << '\n';
    } else {
        out << "-\n";
    }
    for (std::size_t l = 0; l < ckpt.encoder.num_layers(); ++l) {
        const DenseMatrix& w = ckpt.encoder.weights[l];
        out << 'W' << l << " 2 " << w.rows() << ' ' << w.cols();
        write_values(out, w.data().data(), w.size());
        out << '\n';
        const auto& b = ckpt.encoder.biases[l];
        out << 'b' << l << " 1 " << b.size();
        write_values(out, b.data(), b.size());
        out << '\n';
    }
    out << "iteration " << ckpt.iteration << '\n';
    out << "best_val_auc " << (ckpt.best_val_auc ? fmt_g17(*ckpt.best_val_auc) : "-") << '\n';
    const TrainConfig& c = ckpt.config;
    out << "config lr=" << fmt_g17(c.learning_rate) << " beta1=" << fmt_g17(c.adam_beta1)
        << " beta2=" << fmt_g17(c.adam_beta2) << " eps=" << fmt_g17(c.adam_eps)
        << " batch=" << c.batch_size << " negatives=" << c.negatives_per_positive
        << " iters=" << c.max_iterations << " eval_interval=" << c.eval_interval
        << " seed=" << c.seed << " freeze_lambda=" << (c.freeze_lambda ? 1 : 0) << " negsamp="
        << (c.negative_sampling == NegativeSampling::Uniform ? "uniform" : "degree") << '\n';
}

Checkpoint load_checkpoint(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "WIPS-CKPT v1") bad("bad magic line");

    Checkpoint ckpt;
    if (!std::getline(in, line)) bad("missing head descriptor");
    {
        std::istringstream hs(line);
        std::string kind;
        hs >> kind;
        ckpt.head.kind = head_kind_from_name(kind);
        std::string extra;
        if (hs >> extra) {
            if (ckpt.head.kind == HeadKind::IPDS && extra.rfind("q=", 0) == 0)
                ckpt.head.q = std::stoul(extra.substr(2));
            else if (ckpt.head.kind == HeadKind::NegPoincare && extra.rfind("eps=", 0) == 0)
                ckpt.head.eps_ball = std::stod(extra.substr(4));
            else
                bad("unexpected head parameter: " + extra);
        }
    }

    if (!std::getline(in, line)) bad("missing dims line");
    {
        std::istringstream ds(line);
        std::string tag;
        ds >> tag;
        if (tag != "dims") bad("expected dims line");
        std::size_t d;
        while (ds >> d) ckpt.encoder.layer_dims.push_back(d);
        if (ckpt.encoder.layer_dims.size() < 2) bad("dims line needs at least input and output");
    }
    ckpt.head.dim = ckpt.encoder.layer_dims.back();

    if (!std::getline(in, line)) bad("missing lambda line");
    if (ckpt.head.kind == HeadKind::WIPS) {
        std::istringstream ls(line);
        double v;
        while (ls >> v) ckpt.head.lambda.push_back(v);
        if (ckpt.head.lambda.size() != ckpt.head.dim) bad("lambda length does not match K");
    } else if (line != "-") {
        bad("expected '-' lambda line for a head without lambda");
    }

    const std::size_t layers = ckpt.encoder.layer_dims.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        if (!std::getline(in, line)) bad("missing weight tensor W" + std::to_string(l));
        std::istringstream ws(line);
        std::string name;
        int rank;
        std::size_t r, c;
        if (!(ws >> name >> rank >> r >> c) || name != "W" + std::to_string(l) || rank != 2)
            bad("malformed weight tensor line for layer " + std::to_string(l));
        DenseMatrix w(r, c);
        for (auto& v : w.data())
            if (!(ws >> v)) bad("short weight tensor W" + std::to_string(l));
        ckpt.encoder.weights.push_back(std::move(w));

        if (!std::getline(in, line)) bad("missing bias tensor b" + std::to_string(l));
        std::istringstream bs(line);
        std::size_t len;
        if (!(bs >> name >> rank >> len) || name != "b" + std::to_string(l) || rank != 1)
            bad("malformed bias tensor line for layer " + std::to_string(l));
        std::vector<double> b(len);
        for (auto& v : b)
            if (!(bs >> v)) bad("short bias tensor b" + std::to_string(l));
        ckpt.encoder.biases.push_back(std::move(b));
    }
    for (std::size_t l = 0; l < layers; ++l) {
        if (ckpt.encoder.weights[l].rows() != ckpt.encoder.layer_dims[l + 1] ||
            ckpt.encoder.weights[l].cols() != ckpt.encoder.layer_dims[l])
            bad("weight shape disagrees with dims line at layer " + std::to_string(l));
    }

    while (std::getline(in, line)) {
        std::istringstream ms(line);
        std::string key;
        if (!(ms >> key)) continue;
        if (key == "iteration") {
            ms >> ckpt.iteration;
        } else if (key == "best_val_auc") {
            std::string v;
            ms >> v;
            if (v != "-") ckpt.best_val_auc = std::stod(v);
        } else if (key == "config") {
            std::string kv;
            while (ms >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) bad("malformed config entry: " + kv);
                const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                TrainConfig& c = ckpt.config;
                if (k == "lr") c.learning_rate = std::stod(v);
                else if (k == "beta1") c.adam_beta1 = std::stod(v);
                else if (k == "beta2") c.adam_beta2 = std::stod(v);
                else if (k == "eps") c.adam_eps = std::stod(v);
                else if (k == "batch") c.batch_size = std::stoul(v);
                else if (k == "negatives") c.negatives_per_positive = std::stoul(v);
                else if (k == "iters") c.max_iterations = std::stoul(v);
                else if (k == "eval_interval") c.eval_interval = std::stoul(v);
                else if (k == "seed") c.seed = std::stoull(v);
                else if (k == "freeze_lambda") c.freeze_lambda = (v == "1");
                else if (k == "negsamp")
                    c.negative_sampling = (v == "degree") ? NegativeSampling::DegreeProportional
                                                          : NegativeSampling::Uniform;
                else bad("unknown config key: " + k);
            }
        } else {
            bad("unexpected trailing line: " + line);
        }
    }
    ckpt.config.hidden_dims.assign(ckpt.encoder.layer_dims.begin() + 1,
                                   ckpt.encoder.layer_dims.end() - 1);
    ckpt.head.validate();
    return ckpt;
}

void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    save_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    return load_checkpoint(in);
}

}  // namespace wips
