#pragma once

// Streaming reader for pipe-delimited RRF release files.
//
// Column contract (0-indexed, one trailing pipe per line):
//   concepts      18 fields: 0=rxcui 7=rxaui 11=sab 12=tty 14=str 16=suppress
//   relationships 16 fields: 0=rxcui1 1=rxaui1 4=rxcui2 5=rxaui2 7=rela
//   attributes    13 fields: 0=rxcui 3=rxaui 8=atn 10=atv
//
// This is the public MRCONSO/RXNCONSO, MRREL/RXNREL and MRSAT/RXNSAT layout.
// The two distributions differ in identifier naming: UMLS files carry
// C-prefixed concept ids and A-prefixed atom ids, RxNorm-native files carry
// bare numbers. Rows are canonicalized to the bare numeric form.

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medlist/errors.hpp"
#include "medlist/text.hpp"

namespace medlist::rrf {

enum class SourceDialect { umls, rxnorm_native };

inline std::optional<SourceDialect> parse_dialect(std::string_view name) {
    if (text::iequals(name, "UMLS")) return SourceDialect::umls;
    if (text::iequals(name, "RXNORM") || text::iequals(name, "RXNORM_NATIVE")) return SourceDialect::rxnorm_native;
    return std::nullopt;
}

inline const char* to_string(SourceDialect d) noexcept {
    return d == SourceDialect::umls ? "UMLS" : "RXNORM";
}

struct ConceptRow {
    std::string rxcui;
    std::string rxaui;
    std::string sab;
    std::string tty;
    std::string str;
    std::string suppress;

    friend bool operator==(const ConceptRow&, const ConceptRow&) = default;
};

struct RelationshipRow {
    std::string rxcui1;
    std::string rxaui1;
    std::string rxcui2;
    std::string rxaui2;
    std::string rela;

    friend bool operator==(const RelationshipRow&, const RelationshipRow&) = default;
};

struct AttributeRow {
    std::string rxcui;
    std::string rxaui;
    std::string atn;
    std::string atv;

    friend bool operator==(const AttributeRow&, const AttributeRow&) = default;
};

struct MalformedLine {
    std::size_t line_number = 0;  // 1-based
    std::string reason;
};

struct ParseReport {
    std::size_t lines = 0;
    std::vector<MalformedLine> malformed;
};

template <class Row>
struct ParseResult {
    std::vector<Row> rows;
    ParseReport report;
};

/// Lowercases and repairs the historical 'tradenname_of' spelling.
inline std::string normalize_rela(std::string_view rela) {
    auto out = text::to_lower(text::trim(rela));
    if (out == "tradenname_of") out = "tradename_of";
    return out;
}

namespace detail {

enum class IdKind { concept_id, atom_id };

inline bool all_digits(std::string_view s) noexcept {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

inline std::string strip_zeros(std::string_view digits) {
    auto pos = digits.find_first_not_of('0');
    return pos == std::string_view::npos ? std::string("0") : std::string(digits.substr(pos));
}

/// Canonical identifier or nullopt when the raw value does not fit the dialect.
inline std::optional<std::string> canonical_id(std::string_view raw, SourceDialect dialect, IdKind kind) {
    if (dialect == SourceDialect::umls) {
        char prefix = kind == IdKind::concept_id ? 'C' : 'A';
        if (raw.size() < 2 || raw.front() != prefix || !all_digits(raw.substr(1))) return std::nullopt;
        return strip_zeros(raw.substr(1));
    }
    if (!all_digits(raw)) return std::nullopt;
    return strip_zeros(raw);
}

inline std::string dialect_id(const std::string& canonical, SourceDialect dialect, IdKind kind) {
    if (dialect == SourceDialect::rxnorm_native || canonical.empty()) return canonical;
    std::string out(1, kind == IdKind::concept_id ? 'C' : 'A');
    if (canonical.size() < 7) out.append(7 - canonical.size(), '0');
    return out + canonical;
}

struct Decoded {
    bool ok = true;
    std::string reason;

    static Decoded fail(std::string why) { return {false, std::move(why)}; }
};

// Decodes a required (or optional) identifier field into `out`.
inline Decoded decode_id(std::string_view raw, SourceDialect dialect, IdKind kind, const char* name, bool required,
                         std::string& out) {
    if (raw.empty()) {
        if (required) return Decoded::fail(std::string(name) + " is empty");
        out.clear();
        return {};
    }
    auto id = canonical_id(raw, dialect, kind);
    if (!id) return Decoded::fail(std::string(name) + " '" + std::string(raw) + "' is not a " + to_string(dialect) + " identifier");
    out = std::move(*id);
    return {};
}

template <class Row>
struct Layout;

template <>
struct Layout<ConceptRow> {
    static constexpr std::size_t fields = 18;

    static Decoded decode(const std::vector<std::string_view>& f, SourceDialect d, ConceptRow& row) {
        if (auto r = decode_id(f[0], d, IdKind::concept_id, "rxcui", true, row.rxcui); !r.ok) return r;
        if (auto r = decode_id(f[7], d, IdKind::atom_id, "rxaui", true, row.rxaui); !r.ok) return r;
        row.sab = f[11];
        row.tty = f[12];
        row.str = f[14];
        row.suppress = f[16];
        if (text::trim(row.str).empty()) return Decoded::fail("term string is empty");
        if (row.suppress.size() > 1) return Decoded::fail("suppress flag must be a single character");
        return {};
    }

    static std::vector<std::string> encode(const ConceptRow& row, SourceDialect d) {
        std::vector<std::string> f(fields);
        f[0] = dialect_id(row.rxcui, d, IdKind::concept_id);
        f[7] = dialect_id(row.rxaui, d, IdKind::atom_id);
        f[11] = row.sab;
        f[12] = row.tty;
        f[14] = row.str;
        f[16] = row.suppress;
        return f;
    }
};

template <>
struct Layout<RelationshipRow> {
    static constexpr std::size_t fields = 16;

    static Decoded decode(const std::vector<std::string_view>& f, SourceDialect d, RelationshipRow& row) {
        if (auto r = decode_id(f[0], d, IdKind::concept_id, "rxcui1", true, row.rxcui1); !r.ok) return r;
        if (auto r = decode_id(f[1], d, IdKind::atom_id, "rxaui1", false, row.rxaui1); !r.ok) return r;
        if (auto r = decode_id(f[4], d, IdKind::concept_id, "rxcui2", true, row.rxcui2); !r.ok) return r;
        if (auto r = decode_id(f[5], d, IdKind::atom_id, "rxaui2", false, row.rxaui2); !r.ok) return r;
        row.rela = normalize_rela(f[7]);
        return {};
    }

    static std::vector<std::string> encode(const RelationshipRow& row, SourceDialect d) {
        std::vector<std::string> f(fields);
        f[0] = dialect_id(row.rxcui1, d, IdKind::concept_id);
        f[1] = dialect_id(row.rxaui1, d, IdKind::atom_id);
        f[4] = dialect_id(row.rxcui2, d, IdKind::concept_id);
        f[5] = dialect_id(row.rxaui2, d, IdKind::atom_id);
        f[7] = row.rela;
        return f;
    }
};

template <>
struct Layout<AttributeRow> {
    static constexpr std::size_t fields = 13;

    static Decoded decode(const std::vector<std::string_view>& f, SourceDialect d, AttributeRow& row) {
        if (auto r = decode_id(f[0], d, IdKind::concept_id, "rxcui", true, row.rxcui); !r.ok) return r;
        if (auto r = decode_id(f[3], d, IdKind::atom_id, "rxaui", false, row.rxaui); !r.ok) return r;
        row.atn = f[8];
        row.atv = f[10];
        if (row.atn.empty()) return Decoded::fail("atn is empty");
        return {};
    }

    static std::vector<std::string> encode(const AttributeRow& row, SourceDialect d) {
        std::vector<std::string> f(fields);
        f[0] = dialect_id(row.rxcui, d, IdKind::concept_id);
        f[3] = dialect_id(row.rxaui, d, IdKind::atom_id);
        f[8] = row.atn;
        f[10] = row.atv;
        return f;
    }
};

}  // namespace detail

/// Streams `in` line by line, calling `sink(Row&&)` for every well-formed line.
/// Malformed lines are collected in the returned report and parsing continues.
/// Throws IoError if the stream fails mid-read.
template <class Row, class Sink>
ParseReport for_each_row(std::istream& in, SourceDialect dialect, Sink&& sink) {
    using L = detail::Layout<Row>;
    ParseReport report;
    std::string line;
    while (std::getline(in, line)) {
        ++report.lines;
        std::string_view view(line);
        if (report.lines == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);

        auto reject = [&](std::string reason) { report.malformed.push_back({report.lines, std::move(reason)}); };
        if (view.empty()) {
            reject("empty line");
            continue;
        }
        if (!text::valid_utf8(view)) {
            reject("invalid UTF-8 (input must be UTF-8 encoded)");
            continue;
        }
        if (view.back() != '|') {
            reject("missing trailing pipe");
            continue;
        }
        view.remove_suffix(1);
        auto fields = text::split(view, '|');
        if (fields.size() != L::fields) {
            reject("expected " + std::to_string(L::fields) + " fields, found " + std::to_string(fields.size()));
            continue;
        }
        Row row;
        if (auto r = L::decode(fields, dialect, row); !r.ok) {
            reject(std::move(r.reason));
            continue;
        }
        sink(std::move(row));
    }
    if (in.bad()) throw IoError("read failure after line " + std::to_string(report.lines));
    return report;
}

template <class Row>
ParseResult<Row> parse_rows(std::istream& in, SourceDialect dialect) {
    ParseResult<Row> result;
    result.report = for_each_row<Row>(in, dialect, [&](Row&& row) { result.rows.push_back(std::move(row)); });
    return result;
}

inline ParseResult<ConceptRow> parse_concepts(std::istream& in, SourceDialect dialect) {
    return parse_rows<ConceptRow>(in, dialect);
}

inline ParseResult<RelationshipRow> parse_relationships(std::istream& in, SourceDialect dialect) {
    return parse_rows<RelationshipRow>(in, dialect);
}

inline ParseResult<AttributeRow> parse_attributes(std::istream& in, SourceDialect dialect) {
    return parse_rows<AttributeRow>(in, dialect);
}

/// Writes one row in `dialect` form, trailing pipe included, no newline.
template <class Row>
std::string to_rrf_line(const Row& row, SourceDialect dialect) {
    std::string out;
    for (const auto& field : detail::Layout<Row>::encode(row, dialect)) {
        if (field.find_first_of("|\r\n") != std::string::npos)
            throw Error("field '" + field + "' cannot be written to a pipe-delimited line");
        out += field;
        out += '|';
    }
    return out;
}

}  // namespace medlist::rrf
