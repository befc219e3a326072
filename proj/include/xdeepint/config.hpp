#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xdeepint/train.hpp"

namespace xdeepint {

/// Flat dotted-key configuration: `key = value` lines, `#` comments,
/// command-line overrides as `key=value`. Unknown keys are rejected; the
/// effective config can be echoed for exact reproduction.
class RunConfig {
public:
    RunConfig();  // defaults only

    void load_file(const std::string& path);
    void apply_override(const std::string& assignment);  // "key=value"

    const std::string& get(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    double get_real(const std::string& key) const;

    bool has_value(const std::string& key) const;  // non-empty

    TrainConfig train_config(std::size_t field_count) const;
    RawReaderOptions reader_options() const;
    char delimiter() const;

    /// All keys in sorted order, one `key = value` per line.
    std::string echo() const;

private:
    void set(const std::string& key, const std::string& value);
    std::map<std::string, std::string> values_;
};

}  // namespace xdeepint
