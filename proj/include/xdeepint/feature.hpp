#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace xdeepint {

enum class FieldKind { Categorical, Continuous };
enum class Transform { None, LogSquareFloor };

struct FieldSpec {
    std::string name;
    FieldKind kind = FieldKind::Categorical;
    Transform transform = Transform::None;
};

using Schema = std::vector<FieldSpec>;

/// Schema file: one `name<TAB>kind<TAB>transform` line per field.
Schema load_schema(const std::string& path);
void save_schema(const Schema& schema, const std::string& path);

/// ⌊ln(v²)⌋ for |v| > 1, else 0. Transform::None passes v through.
double transform_value(double v, Transform t);

/// Fitted per-field dictionaries. Categorical fields map raw tokens to
/// indices in [1, C_f-1]; index 0 is reserved for OOV/infrequent tokens.
/// Continuous fields carry sorted bin boundaries (value <= boundary[i]
/// lands in bucket i).
struct Vocabulary {
    struct Field {
        FieldKind kind = FieldKind::Categorical;
        std::map<std::string, std::size_t> tokens;   // categorical
        std::vector<double> boundaries;              // continuous
        std::size_t cardinality = 1;
    };
    std::vector<Field> fields;  // aligned with the schema

    std::vector<std::size_t> cardinalities() const;
};

struct Example {
    std::vector<std::uint32_t> indices;  // one per field
    int label = 0;                       // strictly {0,1}
};

struct EncodedDataset {
    std::vector<Example> examples;
    std::size_t field_count = 0;
    std::vector<std::size_t> cardinalities;

    std::size_t size() const { return examples.size(); }
};

struct RawReaderOptions {
    char delimiter = '\t';
    std::string label_column = "label";
};

/// In-memory raw table: header names plus string cells, as parsed from a
/// delimited text file. Kept simple so tests can build rows directly.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawTable load_raw_table(const std::string& path, char delimiter);

Vocabulary fit_vocabulary(const RawTable& table, const Schema& schema,
                          std::size_t min_count, std::size_t bins,
                          const RawReaderOptions& opts = {});

EncodedDataset encode(const RawTable& table, const Vocabulary& vocab, const Schema& schema,
                      const RawReaderOptions& opts = {});

struct SplitResult {
    EncodedDataset train, valid, test;
};

SplitResult split(const EncodedDataset& ds, double f_train, double f_valid, double f_test,
                  std::uint64_t seed);

/// Versioned text format `PINVOCAB v1`; reals at 17 significant digits so
/// save/load round-trips exactly.
void save_vocabulary(const Vocabulary& vocab, const Schema& schema, const std::string& path);
Vocabulary load_vocabulary(const std::string& path, const Schema& schema);

/// 64-bit FNV-1a over the vocabulary file bytes, used to tie checkpoints
/// to the dictionaries they were trained against.
std::uint64_t hash_file(const std::string& path);

// Seedable deterministic utilities (identical output on every platform).
std::uint64_t splitmix64(std::uint64_t& state);
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace xdeepint
