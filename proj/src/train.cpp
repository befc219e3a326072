#include "xdeepint/train.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "xdeepint/errors.hpp"
#include "xdeepint/gradients.hpp"

namespace xdeepint {

namespace {

constexpr char kMagic[4] = {'X', 'D', 'P', 'I'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw FormatError("cannot write checkpoint: " + path);
    }
    void u32(std::uint32_t v) { le(v); }
    void u64(std::uint64_t v) { le(v); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        le(bits);
    }
    void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void matrix(const Matrix& m) {
        u64(m.rows());
        u64(m.cols());
        for (double v : m.data()) f64(v);
    }
    void reals(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }

private:
    template <typename T>
    void le(T v) {
        char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(buf, sizeof(T));
    }
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw FormatError("cannot open checkpoint: " + path);
    }
    std::uint32_t u32() { return le<std::uint32_t>(); }
    std::uint64_t u64() { return le<std::uint64_t>(); }
    double f64() {
        std::uint64_t bits = le<std::uint64_t>();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    void bytes(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        check(n);
        offset_ += n;
    }
    Matrix matrix() {
        std::uint64_t r = u64(), c = u64();
        if (r * c > (1ull << 32)) {
            throw FormatError("checkpoint matrix too large at offset " + std::to_string(offset_));
        }
        Matrix m(r, c);
        for (double& v : m.data()) v = f64();
        return m;
    }
    std::vector<double> reals() {
        std::uint64_t n = u64();
        if (n > (1ull << 32)) {
            throw FormatError("checkpoint array too large at offset " + std::to_string(offset_));
        }
        std::vector<double> v(n);
        for (double& x : v) x = f64();
        return v;
    }
    std::size_t offset() const { return offset_; }

private:
    template <typename T>
    T le() {
        char buf[sizeof(T)];
        in_.read(buf, sizeof(T));
        check(sizeof(T));
        offset_ += sizeof(T);
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<unsigned char>(buf[i])) << (8 * i);
        }
        return v;
    }
    void check(std::size_t want) {
        if (static_cast<std::size_t>(in_.gcount()) != want) {
            throw FormatError("truncated checkpoint " + path_ + " at offset " +
                              std::to_string(offset_));
        }
    }
    std::ifstream in_;
    std::string path_;
    std::size_t offset_ = 0;
};

void write_ftrl(Writer& w, const FtrlState& s) {
    w.f64(s.hyper.alpha);
    w.f64(s.hyper.beta);
    w.f64(s.hyper.lambda1);
    w.f64(s.hyper.lambda2);
    w.reals(s.z);
    w.reals(s.n);
}

FtrlState read_ftrl(Reader& r) {
    FtrlState s;
    s.hyper.alpha = r.f64();
    s.hyper.beta = r.f64();
    s.hyper.lambda1 = r.f64();
    s.hyper.lambda2 = r.f64();
    s.z = r.reals();
    s.n = r.reals();
    if (s.z.size() != s.n.size()) throw FormatError("ftrl state z/n length mismatch");
    return s;
}

void write_adam(Writer& w, const AdamState& s) {
    w.f64(s.hyper.alpha);
    w.f64(s.hyper.beta1);
    w.f64(s.hyper.beta2);
    w.f64(s.hyper.eps);
    w.u64(s.t);
    w.reals(s.m);
    w.reals(s.v);
}

AdamState read_adam(Reader& r) {
    AdamState s;
    s.hyper.alpha = r.f64();
    s.hyper.beta1 = r.f64();
    s.hyper.beta2 = r.f64();
    s.hyper.eps = r.f64();
    s.t = r.u64();
    s.m = r.reals();
    s.v = r.reals();
    if (s.m.size() != s.v.size()) throw FormatError("adam state m/v length mismatch");
    return s;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t epoch) {
    std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (epoch + 1));
    return splitmix64(state);
}

}  // namespace

void TrainConfig::validate() const {
    model.validate();
    if (batch_size < 1) throw ValueError("batch_size must be >= 1");
    if (patience < 1) throw ValueError("patience must be >= 1");
    if (eval_every_steps < 1) throw ValueError("eval_every_steps must be >= 1");
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u32(kVersion);

    w.u64(ckpt.model.field_count);
    w.u64(ckpt.model.embedding_dim);
    w.u64(ckpt.model.pin_layers);
    w.u64(ckpt.model.subspaces);
    w.u32(static_cast<std::uint32_t>(ckpt.model.activation));
    w.u32(static_cast<std::uint32_t>(ckpt.opt.kind));

    for (const auto& table : ckpt.params.embeddings) w.matrix(table);
    for (const auto& kernel : ckpt.params.pin_kernels) w.matrix(kernel);
    w.matrix(ckpt.params.out_weights);
    w.f64(ckpt.params.bias);

    if (ckpt.opt.kind == OptimizerKind::GftrlFtrl) {
        for (const auto& s : ckpt.opt.gftrl_embeddings) {
            w.f64(s.hyper.alpha);
            w.f64(s.hyper.beta);
            w.f64(s.hyper.lambda1);
            w.f64(s.hyper.lambda2);
            w.u64(s.row_width);
            w.reals(s.z);
            w.reals(s.n);
        }
        for (const auto& s : ckpt.opt.ftrl_kernels) write_ftrl(w, s);
        write_ftrl(w, ckpt.opt.ftrl_head);
    } else {
        for (const auto& s : ckpt.opt.adam_embeddings) write_adam(w, s);
        for (const auto& s : ckpt.opt.adam_kernels) write_adam(w, s);
        write_adam(w, ckpt.opt.adam_head);
    }

    w.u64(ckpt.vocab_hash);
    w.u64(ckpt.step);
    w.f64(ckpt.best_valid_auc);
    w.f64(ckpt.best_valid_logloss);
    w.u64(ckpt.evals_since_improvement);
}

Checkpoint load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("bad checkpoint magic in " + path + " at offset 0");
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version) +
                          " at offset 4");
    }

    Checkpoint ckpt;
    ckpt.model.field_count = r.u64();
    ckpt.model.embedding_dim = r.u64();
    ckpt.model.pin_layers = r.u64();
    ckpt.model.subspaces = r.u64();
    ckpt.model.activation = static_cast<Activation>(r.u32());
    ckpt.opt.kind = static_cast<OptimizerKind>(r.u32());
    ckpt.model.validate();

    const std::size_t fh = ckpt.model.stacked_rows();
    for (std::size_t f = 0; f < ckpt.model.field_count; ++f) {
        Matrix table = r.matrix();
        if (table.cols() != ckpt.model.embedding_dim) {
            throw FormatError("embedding table width mismatch at offset " +
                              std::to_string(r.offset()));
        }
        ckpt.params.embeddings.push_back(std::move(table));
    }
    for (std::size_t l = 0; l < ckpt.model.pin_layers; ++l) {
        Matrix kernel = r.matrix();
        if (kernel.rows() != fh || kernel.cols() != fh) {
            throw FormatError("pin kernel shape mismatch at offset " + std::to_string(r.offset()));
        }
        ckpt.params.pin_kernels.push_back(std::move(kernel));
    }
    ckpt.params.out_weights = r.matrix();
    if (ckpt.params.out_weights.rows() != 1 || ckpt.params.out_weights.cols() != fh) {
        throw FormatError("output weight shape mismatch at offset " + std::to_string(r.offset()));
    }
    ckpt.params.bias = r.f64();

    if (ckpt.opt.kind == OptimizerKind::GftrlFtrl) {
        for (std::size_t f = 0; f < ckpt.model.field_count; ++f) {
            GroupFtrlState s;
            s.hyper.alpha = r.f64();
            s.hyper.beta = r.f64();
            s.hyper.lambda1 = r.f64();
            s.hyper.lambda2 = r.f64();
            s.row_width = r.u64();
            s.z = r.reals();
            s.n = r.reals();
            if (s.row_width != ckpt.model.embedding_dim ||
                s.z.size() != ckpt.params.embeddings[f].size() || s.z.size() != s.n.size()) {
                throw FormatError("gftrl state shape mismatch at offset " +
                                  std::to_string(r.offset()));
            }
            ckpt.opt.gftrl_embeddings.push_back(std::move(s));
        }
        for (std::size_t l = 0; l < ckpt.model.pin_layers; ++l) {
            ckpt.opt.ftrl_kernels.push_back(read_ftrl(r));
        }
        ckpt.opt.ftrl_head = read_ftrl(r);
    } else {
        for (std::size_t f = 0; f < ckpt.model.field_count; ++f) {
            ckpt.opt.adam_embeddings.push_back(read_adam(r));
        }
        for (std::size_t l = 0; l < ckpt.model.pin_layers; ++l) {
            ckpt.opt.adam_kernels.push_back(read_adam(r));
        }
        ckpt.opt.adam_head = read_adam(r);
    }

    ckpt.vocab_hash = r.u64();
    ckpt.step = r.u64();
    ckpt.best_valid_auc = r.f64();
    ckpt.best_valid_logloss = r.f64();
    ckpt.evals_since_improvement = r.u64();
    return ckpt;
}

TrainOutcome train(const EncodedDataset& train_ds, const EncodedDataset& valid_ds,
                   const TrainConfig& config, const std::optional<Checkpoint>& resume,
                   std::uint64_t vocab_hash) {
    config.validate();
    if (train_ds.examples.empty() || valid_ds.examples.empty()) {
        throw ValueError("train and valid datasets must be non-empty");
    }
    if (train_ds.field_count != config.model.field_count) {
        throw ValueError("dataset field count does not match model config");
    }

    TrainOutcome outcome;
    Checkpoint cur;
    if (resume) {
        cur = *resume;
    } else {
        cur.model = config.model;
        cur.params = init_params(config.model, train_ds.cardinalities, config.seed);
        cur.opt = OptimizerBundle::create(config.optimizer, config.model, train_ds.cardinalities,
                                          config.ftrl, config.adam);
        cur.vocab_hash = vocab_hash;
        cur.step = 0;
    }

    auto evaluate_valid = [&](std::uint64_t step) {
        EvalResult ev = evaluate(cur.params, cur.model, valid_ds);
        outcome.history.push_back({step, "valid", ev.auc, ev.logloss});
        const bool first = outcome.best.params.embeddings.empty();
        const bool improved =
            first || ev.auc > cur.best_valid_auc ||
            (ev.auc == cur.best_valid_auc && ev.logloss < cur.best_valid_logloss);
        if (improved) {
            cur.best_valid_auc = ev.auc;
            cur.best_valid_logloss = ev.logloss;
            cur.evals_since_improvement = 0;
            outcome.best = cur;
        } else {
            ++cur.evals_since_improvement;
        }
        return cur.evals_since_improvement >= config.patience;
    };

    if (!resume) {
        evaluate_valid(0);
    } else {
        outcome.best = cur;  // resuming keeps the stored best metrics on cur
    }

    const std::size_t n = train_ds.examples.size();
    const std::size_t batches_per_epoch = (n + config.batch_size - 1) / config.batch_size;
    bool stop = cur.step >= config.max_steps;

    while (!stop) {
        const std::uint64_t epoch = cur.step / batches_per_epoch;
        auto perm = seeded_permutation(n, mix_seed(config.seed, epoch));
        std::size_t batch_index = cur.step % batches_per_epoch;
        for (; batch_index < batches_per_epoch && !stop; ++batch_index) {
            const std::size_t begin = batch_index * config.batch_size;
            const std::size_t end = std::min(begin + config.batch_size, n);
            std::vector<Example> batch;
            batch.reserve(end - begin);
            for (std::size_t i = begin; i < end; ++i) batch.push_back(train_ds.examples[perm[i]]);

            BatchResult br = batch_forward_backward(batch, cur.params, cur.model);
            if (!std::isfinite(br.mean_loss)) {
                throw NumericError("training diverged: non-finite loss at step " +
                                   std::to_string(cur.step + 1) + ", batch " +
                                   std::to_string(batch_index) + " of epoch " +
                                   std::to_string(epoch));
            }
            cur.opt.step(cur.params, br.grads, cur.model);
            ++cur.step;

            if (cur.step % config.eval_every_steps == 0) {
                if (evaluate_valid(cur.step)) stop = true;
            }
            if (cur.step >= config.max_steps) stop = true;
        }
    }

    outcome.final = cur;
    if (outcome.best.params.embeddings.empty()) outcome.best = cur;
    return outcome;
}

void write_metrics_csv(const std::vector<MetricRecord>& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write metrics file: " + path);
    out << "step,split,auc,logloss\n";
    char buf[128];
    for (const auto& rec : history) {
        std::snprintf(buf, sizeof(buf), "%llu,%s,%.17g,%.17g\n",
                      static_cast<unsigned long long>(rec.step), rec.split.c_str(), rec.auc,
                      rec.logloss);
        out << buf;
    }
}

}  // namespace xdeepint
