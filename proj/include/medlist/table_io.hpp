#pragma once

// On-disk form of a CompiledTerminology: three tab-separated UTF-8 files with
// header rows plus a JSON manifest.
//
//   med_list.tsv         med_list_id  med_name  rxcui  rxaui  is_brand  generic_rxaui
//   med_list_common.tsv  med_list_id  common_form  dose_amt  dose_units  rxcui  rxaui
//   med_list_dose.tsv    med_list_id  dose_units
//   manifest.json        {"format", "version_tag", "files": {name: row_count}}
//
// Backslash, tab, CR and LF inside a field are written as \\, \t, \r, \n.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "medlist/errors.hpp"
#include "medlist/terminology.hpp"
#include "medlist/text.hpp"

namespace medlist::table_io {

inline constexpr std::string_view format_name = "medlist-tables/1";
inline constexpr std::string_view med_list_file = "med_list.tsv";
inline constexpr std::string_view common_file = "med_list_common.tsv";
inline constexpr std::string_view dose_file = "med_list_dose.tsv";
inline constexpr std::string_view manifest_file = "manifest.json";

namespace detail {

inline std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            case '\n': out += "\\n"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out += s[i];
            continue;
        }
        switch (s[++i]) {
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case 'n': out += '\n'; break;
            default: out += s[i];
        }
    }
    return out;
}

inline void write_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
    bool first = true;
    for (auto f : fields) {
        if (!first) out << '\t';
        out << escape(f);
        first = false;
    }
    out << '\n';
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

class TsvReader {
public:
    TsvReader(const std::filesystem::path& path, std::vector<std::string> header) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw DataError("missing table file " + path.string());
        std::vector<std::string> got;
        if (!next(got) || got != header) throw DataError(path.string() + ": unexpected header row");
        width_ = header.size();
    }

    /// Next data row, or false at end of file.
    bool next(std::vector<std::string>& fields) {
        std::string line;
        if (!std::getline(in_, line)) {
            if (in_.bad()) throw IoError("read failure in " + path_.string());
            return false;
        }
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        fields.clear();
        for (auto f : text::split(line, '\t')) fields.push_back(unescape(f));
        if (width_ && fields.size() != width_)
            throw DataError(path_.string() + ":" + std::to_string(line_) + ": expected " + std::to_string(width_) +
                            " columns");
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError(path_.string() + ":" + std::to_string(line_) + ": " + what);
    }

    MedListId parse_id(const std::string& s) const {
        MedListId v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || v <= 0) fail("bad med_list_id '" + s + "'");
        return v;
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t width_ = 0;
    std::size_t line_ = 0;
};

}  // namespace detail

inline void write_tables(const CompiledTerminology& t, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    {
        auto out = detail::open_out(dir / med_list_file);
        detail::write_row(out, {"med_list_id", "med_name", "rxcui", "rxaui", "is_brand", "generic_rxaui"});
        for (const auto& m : t.med_list())
            detail::write_row(out, {std::to_string(m.med_list_id), m.med_name, m.rxcui, m.rxaui,
                                    m.is_brand ? "1" : "0", m.generic_rxaui.value_or("")});
        if (!out.flush()) throw IoError("write failure in med_list.tsv");
    }
    {
        auto out = detail::open_out(dir / common_file);
        detail::write_row(out, {"med_list_id", "common_form", "dose_amt", "dose_units", "rxcui", "rxaui"});
        for (const auto& c : t.med_list_common())
            detail::write_row(out, {std::to_string(c.med_list_id), c.common_form, c.dose_amt.to_string(), c.dose_units,
                                    c.rxcui, c.rxaui});
        if (!out.flush()) throw IoError("write failure in med_list_common.tsv");
    }
    {
        auto out = detail::open_out(dir / dose_file);
        detail::write_row(out, {"med_list_id", "dose_units"});
        for (const auto& d : t.med_list_dose()) detail::write_row(out, {std::to_string(d.med_list_id), d.dose_units});
        if (!out.flush()) throw IoError("write failure in med_list_dose.tsv");
    }
    nlohmann::ordered_json manifest{
        {"format", format_name},
        {"version_tag", t.version_tag()},
        {"files",
         {{med_list_file, t.med_list().size()},
          {common_file, t.med_list_common().size()},
          {dose_file, t.med_list_dose().size()}}},
    };
    auto out = detail::open_out(dir / manifest_file);
    out << manifest.dump(2) << '\n';
    if (!out.flush()) throw IoError("write failure in manifest.json");
}

/// Loads and validates a compiled data directory. Throws DataError on any
/// missing file, malformed row, row-count mismatch or broken invariant.
inline CompiledTerminology read_tables(const std::filesystem::path& dir) {
    std::ifstream mf(dir / manifest_file);
    if (!mf) throw DataError("missing manifest " + (dir / manifest_file).string());
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(mf);
        if (manifest.at("format").get<std::string>() != format_name)
            throw DataError("unsupported table format '" + manifest.at("format").get<std::string>() + "'");
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad manifest: ") + e.what());
    }

    std::vector<std::string> f;
    std::vector<MedListEntry> med_list;
    {
        detail::TsvReader r(dir / med_list_file, {"med_list_id", "med_name", "rxcui", "rxaui", "is_brand", "generic_rxaui"});
        while (r.next(f)) {
            if (f[4] != "0" && f[4] != "1") r.fail("is_brand must be 0 or 1");
            med_list.push_back({r.parse_id(f[0]), f[1], f[2], f[3], f[4] == "1",
                                f[5].empty() ? std::nullopt : std::optional<std::string>(f[5])});
        }
    }
    std::vector<CommonFormEntry> common;
    {
        detail::TsvReader r(dir / common_file, {"med_list_id", "common_form", "dose_amt", "dose_units", "rxcui", "rxaui"});
        while (r.next(f)) {
            auto amt = Decimal::parse(f[2]);
            if (!amt) r.fail("bad dose_amt '" + f[2] + "'");
            common.push_back({r.parse_id(f[0]), f[1], *amt, f[3], f[4], f[5]});
        }
    }
    std::vector<DoseUnitEntry> dose;
    {
        detail::TsvReader r(dir / dose_file, {"med_list_id", "dose_units"});
        while (r.next(f)) dose.push_back({r.parse_id(f[0]), f[1]});
    }

    try {
        const auto& files = manifest.at("files");
        auto check = [&](std::string_view name, std::size_t rows) {
            if (files.at(std::string(name)).get<std::size_t>() != rows)
                throw DataError(std::string(name) + ": row count does not match manifest");
        };
        check(med_list_file, med_list.size());
        check(common_file, common.size());
        check(dose_file, dose.size());
        return CompiledTerminology(std::move(med_list), std::move(common), std::move(dose),
                                   manifest.value("version_tag", std::string()));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad manifest: ") + e.what());
    }
}

}  // namespace medlist::table_io
