#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "xdeepint/config.hpp"
#include "xdeepint/errors.hpp"

using namespace xdeepint;
namespace fs = std::filesystem;

TEST_CASE("defaults cover the full key set") {
    RunConfig cfg;
    CHECK(cfg.get("data.label_column") == "label");
    CHECK(cfg.get_int("data.min_count") == 20);
    CHECK(cfg.get_real("data.fraction_train") == 0.7);
    CHECK(cfg.get_int("model.embedding_dim") == 16);
    CHECK(cfg.get("opt.kind") == "gftrl_ftrl");
    CHECK(cfg.delimiter() == '\t');
    CHECK(!cfg.has_value("data.train"));
    CHECK(cfg.has_value("out.checkpoint"));
}

TEST_CASE("file parsing with comments and blank lines") {
    const fs::path p = fs::temp_directory_path() / "xdeepint_cfg_test.cfg";
    std::ofstream(p) << "# run settings\n"
                        "\n"
                        "model.pin_layers = 4   # deeper\n"
                        "opt.alpha = 0.05\n"
                        "data.delimiter = comma\n";
    RunConfig cfg;
    cfg.load_file(p.string());
    CHECK(cfg.get_int("model.pin_layers") == 4);
    CHECK(cfg.get_real("opt.alpha") == 0.05);
    CHECK(cfg.delimiter() == ',');
    // untouched keys keep defaults
    CHECK(cfg.get_int("train.batch_size") == 4096);
    fs::remove(p);
}

TEST_CASE("unknown keys and malformed lines are rejected") {
    RunConfig cfg;
    CHECK_THROWS_AS(cfg.apply_override("model.depth=3"), FormatError);
    CHECK_THROWS_AS(cfg.apply_override("no_equals_sign"), FormatError);
    CHECK_THROWS_AS(cfg.get("nope"), FormatError);
    CHECK_THROWS_AS(cfg.load_file("/nonexistent/path.cfg"), FormatError);

    const fs::path p = fs::temp_directory_path() / "xdeepint_cfg_bad.cfg";
    std::ofstream(p) << "model.embedding_dim\n";
    CHECK_THROWS_AS(cfg.load_file(p.string()), FormatError);
    fs::remove(p);
}

TEST_CASE("overrides win over file values") {
    const fs::path p = fs::temp_directory_path() / "xdeepint_cfg_ovr.cfg";
    std::ofstream(p) << "train.seed = 1\n";
    RunConfig cfg;
    cfg.load_file(p.string());
    cfg.apply_override("train.seed=99");
    cfg.apply_override("model.activation = relu");
    CHECK(cfg.get_int("train.seed") == 99);
    CHECK(cfg.get("model.activation") == "relu");
    fs::remove(p);
}

TEST_CASE("typed getter errors name the key") {
    RunConfig cfg;
    cfg.apply_override("train.max_steps=lots");
    try {
        cfg.get_int("train.max_steps");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("train.max_steps") != std::string::npos);
    }
}

TEST_CASE("train_config maps keys onto the training structs") {
    RunConfig cfg;
    cfg.apply_override("model.embedding_dim=8");
    cfg.apply_override("model.subspaces=2");
    cfg.apply_override("opt.kind=adam");
    cfg.apply_override("opt.lambda1=0.5");
    cfg.apply_override("train.batch_size=128");
    TrainConfig tc = cfg.train_config(5);
    CHECK(tc.model.field_count == 5);
    CHECK(tc.model.embedding_dim == 8);
    CHECK(tc.model.subspaces == 2);
    CHECK(tc.optimizer == OptimizerKind::Adam);
    CHECK(tc.ftrl.lambda1 == 0.5);
    CHECK(tc.batch_size == 128);
    tc.validate();
}

TEST_CASE("echo reproduces the effective configuration exactly") {
    RunConfig a;
    a.apply_override("model.pin_layers=5");
    a.apply_override("opt.alpha=0.123");
    std::string text = a.echo();
    CHECK(text.find("model.pin_layers = 5\n") != std::string::npos);

    // feed the echo back through the parser: round-trip must be stable
    const fs::path p = fs::temp_directory_path() / "xdeepint_cfg_echo.cfg";
    std::ofstream(p) << text;
    RunConfig b;
    b.load_file(p.string());
    CHECK(b.echo() == text);
    fs::remove(p);
}
