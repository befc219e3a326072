#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "synthetic.hpp"
#include "xdeepint/errors.hpp"
#include "xdeepint/train.hpp"

using namespace xdeepint;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path tmp_path(const std::string& name) {
    return fs::temp_directory_path() / ("xdeepint_test_" + name);
}

TrainConfig small_config(std::size_t field_count) {
    TrainConfig tc;
    tc.model.field_count = field_count;
    tc.model.embedding_dim = 4;
    tc.model.pin_layers = 2;
    tc.model.subspaces = 1;
    tc.batch_size = 64;
    tc.eval_every_steps = 10;
    tc.patience = 100;  // effectively off unless a test wants it
    tc.max_steps = 40;
    tc.seed = 7;
    return tc;
}

std::string checkpoint_bytes(const Checkpoint& ckpt, const std::string& tag) {
    const fs::path p = tmp_path(tag + ".ckpt");
    save_checkpoint(ckpt, p.string());
    std::string bytes = slurp(p);
    fs::remove(p);
    return bytes;
}

}  // namespace

TEST_CASE("max_steps=0 returns the untouched initial model") {
    auto ds = synth::product_interaction(400, 20, 3.0, 1);
    auto valid = synth::product_interaction(100, 20, 3.0, 2);
    TrainConfig tc = small_config(2);
    tc.max_steps = 0;
    TrainOutcome out = train(ds, valid, tc);
    CHECK(out.final.step == 0);
    // zero-init head: constant 0.5 predictor
    CHECK(out.best.best_valid_auc == 0.5);
    REQUIRE(!out.history.empty());
    CHECK(out.history.front().step == 0);
    for (const auto& w : out.final.params.pin_kernels)
        for (double v : w.data()) CHECK(v == 0.0);
}

TEST_CASE("training is deterministic: identical history and byte-identical checkpoints") {
    auto ds = synth::product_interaction(600, 25, 3.0, 11);
    auto valid = synth::product_interaction(150, 25, 3.0, 12);
    TrainConfig tc = small_config(2);

    TrainOutcome a = train(ds, valid, tc, {}, 0xfeed);
    TrainOutcome b = train(ds, valid, tc, {}, 0xfeed);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].step == b.history[i].step);
        CHECK(a.history[i].auc == b.history[i].auc);
        CHECK(a.history[i].logloss == b.history[i].logloss);
    }
    CHECK(checkpoint_bytes(a.final, "det_a") == checkpoint_bytes(b.final, "det_b"));
    CHECK(checkpoint_bytes(a.best, "det_ba") == checkpoint_bytes(b.best, "det_bb"));
}

TEST_CASE("checkpoint save/load/save round-trips byte-identically") {
    auto ds = synth::product_interaction(300, 15, 3.0, 21);
    auto valid = synth::product_interaction(80, 15, 3.0, 22);
    TrainConfig tc = small_config(2);
    tc.max_steps = 15;
    TrainOutcome out = train(ds, valid, tc, {}, 0xabc123);

    const fs::path p1 = tmp_path("rt1.ckpt");
    const fs::path p2 = tmp_path("rt2.ckpt");
    save_checkpoint(out.final, p1.string());
    Checkpoint loaded = load_checkpoint(p1.string());
    save_checkpoint(loaded, p2.string());
    CHECK(slurp(p1) == slurp(p2));
    CHECK(loaded.step == out.final.step);
    CHECK(loaded.vocab_hash == 0xabc123);
    CHECK(loaded.best_valid_auc == out.final.best_valid_auc);
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("truncated checkpoint raises a format error naming the offset") {
    auto ds = synth::product_interaction(200, 10, 3.0, 31);
    TrainConfig tc = small_config(2);
    tc.max_steps = 5;
    TrainOutcome out = train(ds, ds, tc);
    const fs::path full = tmp_path("trunc.ckpt");
    save_checkpoint(out.final, full.string());
    std::string bytes = slurp(full);
    REQUIRE(bytes.size() > 40);

    const fs::path cut = tmp_path("trunc_cut.ckpt");
    std::ofstream(cut, std::ios::binary) << bytes.substr(0, bytes.size() / 2);
    CHECK_THROWS_AS(load_checkpoint(cut.string()), FormatError);
    try {
        load_checkpoint(cut.string());
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }

    const fs::path garbage = tmp_path("trunc_magic.ckpt");
    std::ofstream(garbage, std::ios::binary) << "NOPE" << bytes.substr(4);
    CHECK_THROWS_AS(load_checkpoint(garbage.string()), FormatError);
    fs::remove(full);
    fs::remove(cut);
    fs::remove(garbage);
}

TEST_CASE("resuming from step t reproduces the uninterrupted run") {
    auto ds = synth::product_interaction(500, 20, 3.0, 41);
    auto valid = synth::product_interaction(120, 20, 3.0, 42);

    TrainConfig full = small_config(2);
    full.max_steps = 50;
    TrainOutcome straight = train(ds, valid, full, {}, 0x77);

    TrainConfig half = full;
    half.max_steps = 23;  // deliberately not a multiple of eval_every or epoch
    TrainOutcome first = train(ds, valid, half, {}, 0x77);
    CHECK(first.final.step == 23);
    TrainOutcome second = train(ds, valid, full, first.final, 0x77);
    CHECK(second.final.step == 50);

    CHECK(checkpoint_bytes(straight.final, "res_a") == checkpoint_bytes(second.final, "res_b"));
    CHECK(checkpoint_bytes(straight.best, "res_ba") == checkpoint_bytes(second.best, "res_bb"));
}

TEST_CASE("early stopping halts and best is never worse than any recorded eval") {
    auto ds = synth::product_interaction(400, 15, 3.0, 51);
    auto valid = synth::product_interaction(100, 15, 3.0, 52);
    TrainConfig tc = small_config(2);
    tc.patience = 2;
    tc.max_steps = 2000;
    TrainOutcome out = train(ds, valid, tc, {}, 0);
    CHECK(out.final.step <= tc.max_steps);
    double best_seen = 0.0;
    for (const auto& rec : out.history) {
        if (rec.split == "valid") best_seen = std::max(best_seen, rec.auc);
    }
    CHECK(out.best.best_valid_auc == best_seen);
}

TEST_CASE("metrics csv layout") {
    std::vector<MetricRecord> hist{{0, "valid", 0.5, std::log(2.0)}, {10, "valid", 0.625, 0.66}};
    const fs::path p = tmp_path("metrics.csv");
    write_metrics_csv(hist, p.string());
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    CHECK(line == "step,split,auc,logloss");
    std::getline(in, line);
    CHECK(line.rfind("0,valid,0.5,", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("10,valid,0.625,0.66", 0) == 0);
    fs::remove(p);
}

TEST_CASE("train config validation") {
    TrainConfig tc = small_config(2);
    tc.batch_size = 0;
    CHECK_THROWS_AS(tc.validate(), ValueError);
    tc = small_config(2);
    tc.model.subspaces = 3;  // does not divide embedding_dim=4
    CHECK_THROWS_AS(tc.validate(), ValueError);
}
