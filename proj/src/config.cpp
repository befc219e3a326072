#include "xdeepint/config.hpp"

#include <fstream>
#include <sstream>

#include "xdeepint/errors.hpp"

namespace xdeepint {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig::RunConfig() {
    values_ = {
        {"data.schema", ""},
        {"data.vocab", ""},
        {"data.train", ""},
        {"data.valid", ""},
        {"data.label_column", "label"},
        {"data.delimiter", "tab"},
        {"data.min_count", "20"},
        {"data.bins", "16"},
        {"data.fraction_train", "0.7"},
        {"data.fraction_valid", "0.1"},
        {"data.fraction_test", "0.2"},
        {"data.split_seed", "42"},
        {"model.embedding_dim", "16"},
        {"model.pin_layers", "3"},
        {"model.subspaces", "1"},
        {"model.activation", "linear"},
        {"opt.kind", "gftrl_ftrl"},
        {"opt.alpha", "0.01"},
        {"opt.beta", "1.0"},
        {"opt.lambda1", "0.001"},
        {"opt.lambda2", "0.001"},
        {"opt.adam_alpha", "0.001"},
        {"opt.adam_beta1", "0.9"},
        {"opt.adam_beta2", "0.999"},
        {"opt.adam_eps", "1e-8"},
        {"train.batch_size", "4096"},
        {"train.eval_every_steps", "2000"},
        {"train.patience", "3"},
        {"train.max_steps", "10000"},
        {"train.seed", "42"},
        {"out.checkpoint", "model.ckpt"},
        {"out.metrics", "metrics.csv"},
    };
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw FormatError("unknown config key: " + key);
    it->second = value;
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void RunConfig::apply_override(const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw FormatError("override must be key=value, got: " + assignment);
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw FormatError("unknown config key: " + key);
    return it->second;
}

std::int64_t RunConfig::get_int(const std::string& key) const {
    try {
        return std::stoll(get(key));
    } catch (const std::exception&) {
        throw FormatError("config key " + key + " is not an integer: " + get(key));
    }
}

double RunConfig::get_real(const std::string& key) const {
    try {
        return std::stod(get(key));
    } catch (const std::exception&) {
        throw FormatError("config key " + key + " is not a number: " + get(key));
    }
}

bool RunConfig::has_value(const std::string& key) const { return !get(key).empty(); }

char RunConfig::delimiter() const {
    const std::string& d = get("data.delimiter");
    if (d == "tab") return '\t';
    if (d == "comma") return ',';
    if (d.size() == 1) return d[0];
    throw FormatError("data.delimiter must be 'tab', 'comma' or a single character");
}

RawReaderOptions RunConfig::reader_options() const {
    RawReaderOptions opts;
    opts.delimiter = delimiter();
    opts.label_column = get("data.label_column");
    return opts;
}

TrainConfig RunConfig::train_config(std::size_t field_count) const {
    TrainConfig tc;
    tc.model.field_count = field_count;
    tc.model.embedding_dim = static_cast<std::size_t>(get_int("model.embedding_dim"));
    tc.model.pin_layers = static_cast<std::size_t>(get_int("model.pin_layers"));
    tc.model.subspaces = static_cast<std::size_t>(get_int("model.subspaces"));
    tc.model.activation = parse_activation(get("model.activation"));
    tc.optimizer = parse_optimizer(get("opt.kind"));
    tc.ftrl.alpha = get_real("opt.alpha");
    tc.ftrl.beta = get_real("opt.beta");
    tc.ftrl.lambda1 = get_real("opt.lambda1");
    tc.ftrl.lambda2 = get_real("opt.lambda2");
    tc.adam.alpha = get_real("opt.adam_alpha");
    tc.adam.beta1 = get_real("opt.adam_beta1");
    tc.adam.beta2 = get_real("opt.adam_beta2");
    tc.adam.eps = get_real("opt.adam_eps");
    tc.batch_size = static_cast<std::size_t>(get_int("train.batch_size"));
    tc.eval_every_steps = static_cast<std::size_t>(get_int("train.eval_every_steps"));
    tc.patience = static_cast<std::size_t>(get_int("train.patience"));
    tc.max_steps = static_cast<std::size_t>(get_int("train.max_steps"));
    tc.seed = static_cast<std::uint64_t>(get_int("train.seed"));
    return tc;
}

std::string RunConfig::echo() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
    return out.str();
}

}  // namespace xdeepint
