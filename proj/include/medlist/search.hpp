#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "medlist/terminology.hpp"
#include "medlist/text.hpp"

namespace medlist::search {

inline constexpr std::size_t default_suggest_limit = 12;
inline constexpr std::size_t min_query_length = 2;

struct Suggestion {
    MedListId med_list_id = 0;
    std::string med_name;

    friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

/// Immutable unanchored-substring index over medication names.
///
/// Entries are kept in case-insensitive name order. Every folded name is
/// broken into byte bigrams; a query is answered by walking the shortest
/// posting list among the query's bigrams and verifying each candidate, so
/// results come out in index order without a full scan.
class SearchIndex {
public:
    struct Entry {
        MedListId med_list_id = 0;
        std::string med_name;
        std::string folded;
    };

    SearchIndex() = default;

    explicit SearchIndex(std::span<const MedListEntry> med_list,
                         std::chrono::system_clock::time_point built_at = std::chrono::system_clock::now())
        : built_at_(built_at) {
        entries_.reserve(med_list.size());
        for (const auto& m : med_list) entries_.push_back({m.med_list_id, m.med_name, text::fold(m.med_name)});
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            if (a.folded != b.folded) return a.folded < b.folded;
            return a.med_list_id < b.med_list_id;
        });
        for (std::uint32_t pos = 0; pos < entries_.size(); ++pos) {
            const auto& s = entries_[pos].folded;
            for (std::size_t i = 0; i + 1 < s.size(); ++i) {
                auto& list = postings_[bigram(s[i], s[i + 1])];
                if (list.empty() || list.back() != pos) list.push_back(pos);
            }
        }
    }

    std::span<const Entry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    std::chrono::system_clock::time_point built_at() const noexcept { return built_at_; }

    /// Up to `limit` names containing `query` (case-insensitive, any position),
    /// in index order. Queries shorter than two characters after trimming match nothing.
    std::vector<Suggestion> suggest(std::string_view query, std::size_t limit = default_suggest_limit) const {
        std::vector<Suggestion> out;
        auto trimmed = text::trim(query);
        if (limit == 0 || text::codepoint_count(trimmed) < min_query_length) return out;
        auto q = text::fold(trimmed);

        const std::vector<std::uint32_t>* shortest = nullptr;
        for (std::size_t i = 0; i + 1 < q.size(); ++i) {
            auto it = postings_.find(bigram(q[i], q[i + 1]));
            if (it == postings_.end()) return out;
            if (!shortest || it->second.size() < shortest->size()) shortest = &it->second;
        }
        for (auto pos : *shortest) {
            const auto& e = entries_[pos];
            if (e.folded.find(q) == std::string::npos) continue;
            out.push_back({e.med_list_id, e.med_name});
            if (out.size() == limit) break;
        }
        return out;
    }

private:
    static std::uint16_t bigram(char a, char b) noexcept {
        return static_cast<std::uint16_t>((static_cast<unsigned char>(a) << 8) | static_cast<unsigned char>(b));
    }

    std::vector<Entry> entries_;
    std::unordered_map<std::uint16_t, std::vector<std::uint32_t>> postings_;
    std::chrono::system_clock::time_point built_at_{};
};

inline SearchIndex build_index(const CompiledTerminology& terminology) { return SearchIndex(terminology.med_list()); }

inline std::vector<Suggestion> suggest(const SearchIndex& index, std::string_view query,
                                       std::size_t limit = default_suggest_limit) {
    return index.suggest(query, limit);
}

}  // namespace medlist::search
