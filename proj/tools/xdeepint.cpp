#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "xdeepint/config.hpp"
#include "xdeepint/errors.hpp"
#include "xdeepint/feature.hpp"
#include "xdeepint/metrics.hpp"
#include "xdeepint/oracles.hpp"
#include "xdeepint/train.hpp"

namespace {

using namespace xdeepint;

// Exit codes: 0 success, 1 usage, 2 data/format, 3 numeric, 4 self-check.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumeric = 3;
constexpr int kSelfCheck = 4;

int cmd_build_vocab(const std::string& schema_path, const std::string& data_path,
                    const std::string& out_path, std::size_t min_count, std::size_t bins,
                    const std::string& label_column, const std::string& delimiter) {
    RawReaderOptions opts;
    opts.delimiter = delimiter == "tab" ? '\t' : delimiter.at(0);
    opts.label_column = label_column;
    Schema schema = load_schema(schema_path);
    RawTable table = load_raw_table(data_path, opts.delimiter);
    Vocabulary vocab = fit_vocabulary(table, schema, min_count, bins, opts);
    save_vocabulary(vocab, schema, out_path);
    for (std::size_t f = 0; f < schema.size(); ++f) {
        std::printf("%s cardinality=%zu\n", schema[f].name.c_str(),
                    vocab.fields[f].cardinality);
    }
    return kOk;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& o : overrides) cfg.apply_override(o);

    Schema schema = load_schema(cfg.get("data.schema"));
    Vocabulary vocab = load_vocabulary(cfg.get("data.vocab"), schema);
    const std::uint64_t vhash = hash_file(cfg.get("data.vocab"));
    const auto opts = cfg.reader_options();

    EncodedDataset train_ds, valid_ds;
    {
        RawTable raw = load_raw_table(cfg.get("data.train"), opts.delimiter);
        EncodedDataset full = encode(raw, vocab, schema, opts);
        if (cfg.has_value("data.valid")) {
            train_ds = std::move(full);
            RawTable raw_valid = load_raw_table(cfg.get("data.valid"), opts.delimiter);
            valid_ds = encode(raw_valid, vocab, schema, opts);
        } else {
            auto parts = split(full, cfg.get_real("data.fraction_train"),
                               cfg.get_real("data.fraction_valid"),
                               cfg.get_real("data.fraction_test"),
                               static_cast<std::uint64_t>(cfg.get_int("data.split_seed")));
            train_ds = std::move(parts.train);
            valid_ds = std::move(parts.valid);
        }
    }

    TrainConfig tc = cfg.train_config(schema.size());
    std::cout << "# effective config\n" << cfg.echo();

    TrainOutcome outcome = train(train_ds, valid_ds, tc, {}, vhash);
    save_checkpoint(outcome.best, cfg.get("out.checkpoint"));
    write_metrics_csv(outcome.history, cfg.get("out.metrics"));
    std::printf("best step=%llu auc=%.6f logloss=%.6f\n",
                static_cast<unsigned long long>(outcome.best.step), outcome.best.best_valid_auc,
                outcome.best.best_valid_logloss);
    return kOk;
}

EncodedDataset load_encoded_for(const Checkpoint& ckpt, const std::string& schema_path,
                                const std::string& vocab_path, const std::string& data_path,
                                const std::string& label_column, const std::string& delimiter,
                                bool allow_hash_mismatch) {
    Schema schema = load_schema(schema_path);
    Vocabulary vocab = load_vocabulary(vocab_path, schema);
    if (ckpt.vocab_hash != 0 && hash_file(vocab_path) != ckpt.vocab_hash) {
        std::cerr << "warning: vocabulary hash does not match the checkpoint\n";
        if (!allow_hash_mismatch) {
            throw FormatError("vocabulary hash mismatch (pass --allow-hash-mismatch to proceed)");
        }
    }
    RawReaderOptions opts;
    opts.delimiter = delimiter == "tab" ? '\t' : delimiter.at(0);
    opts.label_column = label_column;
    RawTable raw = load_raw_table(data_path, opts.delimiter);
    return encode(raw, vocab, schema, opts);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xDeepInt training and evaluation CLI"};
    app.require_subcommand(1);

    // build-vocab
    auto* sc_vocab = app.add_subcommand("build-vocab", "Fit vocabularies and bins");
    std::string schema_path, data_path, out_path, label_column = "label", delimiter = "tab";
    std::size_t min_count = 20, bins = 16;
    sc_vocab->add_option("--schema", schema_path)->required();
    sc_vocab->add_option("--data", data_path)->required();
    sc_vocab->add_option("--out", out_path)->required();
    sc_vocab->add_option("--min-count", min_count);
    sc_vocab->add_option("--bins", bins);
    sc_vocab->add_option("--label-column", label_column);
    sc_vocab->add_option("--delimiter", delimiter);

    // train
    auto* sc_train = app.add_subcommand("train", "Train a model");
    std::string config_path;
    std::vector<std::string> overrides;
    sc_train->add_option("--config", config_path);
    sc_train->add_option("overrides", overrides, "key=value config overrides");

    // evaluate / predict
    std::string ckpt_path, eval_data;
    bool allow_hash_mismatch = false;
    auto* sc_eval = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset");
    auto* sc_pred = app.add_subcommand("predict", "Print per-row predictions");
    for (auto* sc : {sc_eval, sc_pred}) {
        sc->add_option("--checkpoint", ckpt_path)->required();
        sc->add_option("--schema", schema_path)->required();
        sc->add_option("--vocab", out_path)->required();
        sc->add_option("--data", eval_data)->required();
        sc->add_option("--label-column", label_column);
        sc->add_option("--delimiter", delimiter);
        sc->add_flag("--allow-hash-mismatch", allow_hash_mismatch);
    }

    // sparsity
    auto* sc_sparse = app.add_subcommand("sparsity", "Report model sparsity ratios");
    sc_sparse->add_option("--checkpoint", ckpt_path)->required();

    // self-check
    auto* sc_check = app.add_subcommand("self-check", "Run the built-in oracle suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_vocab->parsed()) {
            return cmd_build_vocab(schema_path, data_path, out_path, min_count, bins, label_column,
                                   delimiter);
        }
        if (sc_train->parsed()) {
            return cmd_train(config_path, overrides);
        }
        if (sc_eval->parsed() || sc_pred->parsed()) {
            Checkpoint ckpt = load_checkpoint(ckpt_path);
            EncodedDataset ds = load_encoded_for(ckpt, schema_path, out_path, eval_data,
                                                 label_column, delimiter, allow_hash_mismatch);
            if (sc_eval->parsed()) {
                EvalResult ev = evaluate(ckpt.params, ckpt.model, ds);
                std::printf("auc=%.6f logloss=%.6f n=%zu\n", ev.auc, ev.logloss, ev.n_examples);
            } else {
                auto preds = predict_batch(ds.examples, ckpt.params, ckpt.model);
                for (double p : preds) std::printf("%.6f\n", p);
            }
            return kOk;
        }
        if (sc_sparse->parsed()) {
            Checkpoint ckpt = load_checkpoint(ckpt_path);
            SparsityReport rep = sparsity_report(ckpt.params);
            std::printf("feature_sparse_ratio=%.6f weight_sparse_ratio=%.6f\n",
                        rep.feature_sparse_ratio, rep.weight_sparse_ratio);
            return kOk;
        }
        if (sc_check->parsed()) {
            SelfCheckResult result = run_self_check();
            for (const auto& item : result.items) {
                std::printf("%s %s (%s)\n", item.passed ? "PASS" : "FAIL", item.name.c_str(),
                            item.detail.c_str());
            }
            return result.all_passed() ? kOk : kSelfCheck;
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumeric;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
