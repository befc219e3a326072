#include "xdeepint/feature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "xdeepint/errors.hpp"

namespace xdeepint {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.push_back("");
    return cells;
}

FieldKind parse_kind(const std::string& s, const std::string& ctx) {
    if (s == "categorical") return FieldKind::Categorical;
    if (s == "continuous") return FieldKind::Continuous;
    throw FormatError("unknown field kind '" + s + "' in " + ctx);
}

Transform parse_transform(const std::string& s, const std::string& ctx) {
    if (s == "none") return Transform::None;
    if (s == "log_square_floor") return Transform::LogSquareFloor;
    throw FormatError("unknown transform '" + s + "' in " + ctx);
}

const char* kind_name(FieldKind k) {
    return k == FieldKind::Categorical ? "categorical" : "continuous";
}

double parse_real(const std::string& tok, std::size_t row_number) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw FormatError("non-numeric token '" + tok + "' in continuous field at row " +
                          std::to_string(row_number));
    }
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Column index of each schema field in the table header.
std::vector<std::size_t> resolve_columns(const RawTable& table, const Schema& schema) {
    std::vector<std::size_t> cols;
    cols.reserve(schema.size());
    for (const auto& field : schema) {
        auto it = std::find(table.header.begin(), table.header.end(), field.name);
        if (it == table.header.end()) {
            throw FormatError("schema field '" + field.name + "' not present in data header");
        }
        cols.push_back(static_cast<std::size_t>(it - table.header.begin()));
    }
    return cols;
}

std::size_t resolve_label_column(const RawTable& table, const RawReaderOptions& opts) {
    auto it = std::find(table.header.begin(), table.header.end(), opts.label_column);
    if (it == table.header.end()) {
        throw FormatError("label column '" + opts.label_column + "' not present in data header");
    }
    return static_cast<std::size_t>(it - table.header.begin());
}

}  // namespace

Schema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open schema file: " + path);
    Schema schema;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_line(line, '\t');
        if (cells.size() != 3) {
            throw FormatError("schema line " + std::to_string(line_no) +
                              ": expected name<TAB>kind<TAB>transform");
        }
        FieldSpec spec;
        spec.name = cells[0];
        spec.kind = parse_kind(cells[1], path + ":" + std::to_string(line_no));
        spec.transform = parse_transform(cells[2], path + ":" + std::to_string(line_no));
        if (spec.transform == Transform::LogSquareFloor && spec.kind != FieldKind::Continuous) {
            throw FormatError("schema line " + std::to_string(line_no) +
                              ": log_square_floor is only valid on continuous fields");
        }
        for (const auto& f : schema) {
            if (f.name == spec.name) {
                throw FormatError("duplicate field name '" + spec.name + "' in schema");
            }
        }
        schema.push_back(std::move(spec));
    }
    if (schema.empty()) throw FormatError("schema file has no fields: " + path);
    return schema;
}

void save_schema(const Schema& schema, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write schema file: " + path);
    for (const auto& f : schema) {
        out << f.name << '\t' << kind_name(f.kind) << '\t'
            << (f.transform == Transform::LogSquareFloor ? "log_square_floor" : "none") << '\n';
    }
}

double transform_value(double v, Transform t) {
    if (t == Transform::None) return v;
    if (std::abs(v) <= 1.0) return 0.0;
    return std::floor(std::log(v * v));
}

RawTable load_raw_table(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open data file: " + path);
    RawTable table;
    std::string line;
    if (!std::getline(in, line)) throw FormatError("data file is empty (header required): " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_line(line, delimiter);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line, delimiter);
        if (cells.size() != table.header.size()) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(table.header.size()) + " cells, got " +
                              std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

std::vector<std::size_t> Vocabulary::cardinalities() const {
    std::vector<std::size_t> out;
    out.reserve(fields.size());
    for (const auto& f : fields) out.push_back(f.cardinality);
    return out;
}

Vocabulary fit_vocabulary(const RawTable& table, const Schema& schema,
                          std::size_t min_count, std::size_t bins,
                          const RawReaderOptions& opts) {
    if (table.rows.empty()) throw ValueError("cannot fit vocabulary on an empty dataset");
    if (bins < 2) throw ValueError("bins must be >= 2");
    (void)opts;
    auto columns = resolve_columns(table, schema);

    Vocabulary vocab;
    vocab.fields.resize(schema.size());
    for (std::size_t f = 0; f < schema.size(); ++f) {
        auto& vf = vocab.fields[f];
        vf.kind = schema[f].kind;
        const std::size_t col = columns[f];
        if (schema[f].kind == FieldKind::Categorical) {
            std::unordered_map<std::string, std::size_t> freq;
            for (const auto& row : table.rows) ++freq[row[col]];
            std::vector<std::pair<std::string, std::size_t>> kept;
            for (const auto& [tok, n] : freq) {
                if (n >= min_count) kept.emplace_back(tok, n);
            }
            // Descending frequency, lexicographic tie-break.
            std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            std::size_t idx = 1;
            for (const auto& [tok, n] : kept) vf.tokens[tok] = idx++;
            vf.cardinality = kept.size() + 1;
        } else {
            std::vector<double> values;
            values.reserve(table.rows.size());
            std::size_t row_number = 1;
            for (const auto& row : table.rows) {
                ++row_number;
                values.push_back(transform_value(parse_real(row[col], row_number),
                                                 schema[f].transform));
            }
            std::sort(values.begin(), values.end());
            const std::size_t n = values.size();
            std::vector<double> bounds;
            for (std::size_t i = 1; i < bins; ++i) {
                // ceil(i*n/bins) - 1, the empirical i/bins quantile
                std::size_t idx = (i * n + bins - 1) / bins - 1;
                bounds.push_back(values[idx]);
            }
            bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
            vf.boundaries = std::move(bounds);
            vf.cardinality = vf.boundaries.size() + 1;
        }
    }
    return vocab;
}

EncodedDataset encode(const RawTable& table, const Vocabulary& vocab, const Schema& schema,
                      const RawReaderOptions& opts) {
    if (vocab.fields.size() != schema.size()) {
        throw ValueError("vocabulary was fitted on a different schema (field count mismatch)");
    }
    auto columns = resolve_columns(table, schema);
    auto label_col = resolve_label_column(table, opts);

    EncodedDataset ds;
    ds.field_count = schema.size();
    ds.cardinalities = vocab.cardinalities();
    ds.examples.reserve(table.rows.size());
    std::size_t row_number = 1;
    for (const auto& row : table.rows) {
        ++row_number;
        Example ex;
        const std::string& lab = row[label_col];
        if (lab == "0") ex.label = 0;
        else if (lab == "1") ex.label = 1;
        else throw FormatError("label must be 0 or 1, got '" + lab + "' at row " +
                               std::to_string(row_number));
        ex.indices.reserve(schema.size());
        for (std::size_t f = 0; f < schema.size(); ++f) {
            const auto& vf = vocab.fields[f];
            const std::string& cell = row[columns[f]];
            std::uint32_t idx = 0;
            if (vf.kind == FieldKind::Categorical) {
                auto it = vf.tokens.find(cell);
                idx = it == vf.tokens.end() ? 0u : static_cast<std::uint32_t>(it->second);
            } else {
                double v = transform_value(parse_real(cell, row_number), schema[f].transform);
                auto it = std::lower_bound(vf.boundaries.begin(), vf.boundaries.end(), v);
                idx = static_cast<std::uint32_t>(it - vf.boundaries.begin());
            }
            ex.indices.push_back(idx);
        }
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::uint64_t state = seed;
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(splitmix64(state) % i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

SplitResult split(const EncodedDataset& ds, double f_train, double f_valid, double f_test,
                  std::uint64_t seed) {
    if (ds.examples.empty()) throw ValueError("cannot split an empty dataset");
    if (f_train <= 0 || f_valid <= 0 || f_test <= 0) {
        throw ValueError("split fractions must all be positive");
    }
    if (std::abs(f_train + f_valid + f_test - 1.0) > 1e-9) {
        throw ValueError("split fractions must sum to 1");
    }
    const std::size_t n = ds.examples.size();
    auto perm = seeded_permutation(n, seed);
    std::size_t n_train = static_cast<std::size_t>(std::llround(f_train * static_cast<double>(n)));
    std::size_t n_valid = static_cast<std::size_t>(std::llround(f_valid * static_cast<double>(n)));
    if (n_train + n_valid > n) n_valid = n - n_train;

    SplitResult out;
    for (auto* part : {&out.train, &out.valid, &out.test}) {
        part->field_count = ds.field_count;
        part->cardinalities = ds.cardinalities;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Example& ex = ds.examples[perm[i]];
        if (i < n_train) out.train.examples.push_back(ex);
        else if (i < n_train + n_valid) out.valid.examples.push_back(ex);
        else out.test.examples.push_back(ex);
    }
    return out;
}

void save_vocabulary(const Vocabulary& vocab, const Schema& schema, const std::string& path) {
    if (vocab.fields.size() != schema.size()) {
        throw ValueError("vocabulary/schema field count mismatch on save");
    }
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write vocabulary file: " + path);
    out << "PINVOCAB v1\n";
    out << "fields " << vocab.fields.size() << '\n';
    for (std::size_t f = 0; f < vocab.fields.size(); ++f) {
        const auto& vf = vocab.fields[f];
        if (vf.kind == FieldKind::Categorical) {
            out << "field " << schema[f].name << " categorical " << vf.tokens.size() << '\n';
            // Emit in index order (descending fit-time frequency).
            std::vector<std::pair<std::size_t, const std::string*>> by_index;
            for (const auto& [tok, idx] : vf.tokens) by_index.emplace_back(idx, &tok);
            std::sort(by_index.begin(), by_index.end());
            for (const auto& [idx, tok] : by_index) out << *tok << '\t' << idx << '\n';
        } else {
            out << "field " << schema[f].name << " continuous " << vf.boundaries.size() << '\n';
            for (double b : vf.boundaries) out << format_real(b) << '\n';
        }
    }
}

Vocabulary load_vocabulary(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open vocabulary file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "PINVOCAB v1") {
        throw FormatError("bad vocabulary header (expected 'PINVOCAB v1'): " + path);
    }
    std::size_t field_count = 0;
    {
        std::string word;
        if (!std::getline(in, line)) throw FormatError("truncated vocabulary file: " + path);
        std::istringstream ss(line);
        ss >> word >> field_count;
        if (word != "fields" || field_count != schema.size()) {
            throw FormatError("vocabulary field count does not match schema: " + path);
        }
    }
    Vocabulary vocab;
    vocab.fields.resize(field_count);
    for (std::size_t f = 0; f < field_count; ++f) {
        if (!std::getline(in, line)) throw FormatError("truncated vocabulary file: " + path);
        std::istringstream ss(line);
        std::string word, name, kind;
        std::size_t count = 0;
        ss >> word >> name >> kind >> count;
        if (word != "field" || name != schema[f].name) {
            throw FormatError("vocabulary field '" + name + "' does not match schema field '" +
                              schema[f].name + "'");
        }
        auto& vf = vocab.fields[f];
        vf.kind = parse_kind(kind, path);
        if (vf.kind != schema[f].kind) {
            throw FormatError("vocabulary kind mismatch for field '" + name + "'");
        }
        if (vf.kind == FieldKind::Categorical) {
            for (std::size_t i = 0; i < count; ++i) {
                if (!std::getline(in, line)) throw FormatError("truncated vocabulary file: " + path);
                auto pos = line.rfind('\t');
                if (pos == std::string::npos) {
                    throw FormatError("bad token line in vocabulary file: " + line);
                }
                vf.tokens[line.substr(0, pos)] =
                    static_cast<std::size_t>(std::stoull(line.substr(pos + 1)));
            }
            vf.cardinality = count + 1;
        } else {
            for (std::size_t i = 0; i < count; ++i) {
                if (!std::getline(in, line)) throw FormatError("truncated vocabulary file: " + path);
                vf.boundaries.push_back(parse_real(line, i));
            }
            vf.cardinality = count + 1;
        }
    }
    return vocab;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file for hashing: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return h;
}

}  // namespace xdeepint
