#pragma once

// Turns parsed RRF rows into the three production tables.
//
// Relationship rows read "atom2 <rela> atom1": a common form (rxaui2)
// has_ingredient its concise name (rxaui1), and a brand name (rxaui2) is
// tradename_of its generic (rxaui1). An endpoint with an empty atom id
// refers to every atom of its concept.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "medlist/decimal.hpp"
#include "medlist/errors.hpp"
#include "medlist/rrf.hpp"
#include "medlist/terminology.hpp"
#include "medlist/text.hpp"

namespace medlist::compiler {

using rrf::AttributeRow;
using rrf::ConceptRow;
using rrf::RelationshipRow;

inline constexpr std::string_view strength_attribute = "RXN_STRENGTH";
inline constexpr std::string_view has_ingredient = "has_ingredient";
inline constexpr std::string_view tradename_of = "tradename_of";

struct CompileOptions {
    /// Term types whose atoms become common forms.
    std::set<std::string> form_ttys{"SCDC", "SBDC"};
    std::set<std::string> generic_name_ttys{"IN", "PIN", "MIN"};
    std::set<std::string> brand_name_ttys{"BN"};
    /// Term types of "Brand of" records.
    std::set<std::string> brand_of_ttys{"BD"};
    /// Source vocabulary to keep; empty keeps every source.
    std::string source_sab = "RXNORM";
    std::string version_tag;
    /// Raise CompileError when the output has no common forms.
    bool require_common_forms = false;
};

struct Strength {
    Decimal dose_amt;
    std::string dose_units;

    friend bool operator==(const Strength&, const Strength&) = default;
};

/// "7.5 MG/ML" -> {7.5, "MG/ML"}. Exactly one decimal, whitespace, one unit token.
inline Strength extract_strength(std::string_view atv) {
    auto s = text::trim(atv);
    std::size_t split = 0;
    while (split < s.size() && !text::is_space(s[split])) ++split;
    auto amount = s.substr(0, split);
    auto rest = text::trim(s.substr(split));
    if (rest.empty() || std::any_of(rest.begin(), rest.end(), text::is_space)) throw UnparseableStrength(std::string(atv));
    auto value = Decimal::parse(amount);
    if (!value) throw UnparseableStrength(std::string(atv));
    return {*value, text::fold(rest)};
}

/// Case-insensitive substring patterns for records to drop (e.g. pet shampoos).
class DenyList {
public:
    DenyList() = default;

    explicit DenyList(std::vector<std::string> patterns) {
        for (auto& p : patterns) add(p);
    }

    /// One pattern per line; blank lines and lines starting with '#' are skipped.
    static DenyList parse(std::istream& in) {
        DenyList list;
        std::string line;
        while (std::getline(in, line)) {
            auto p = text::trim(line);
            if (p.empty() || p.front() == '#') continue;
            list.add(p);
        }
        return list;
    }

    void add(std::string_view pattern) {
        auto p = text::trim(pattern);
        if (!p.empty()) patterns_.push_back(text::fold(p));
    }

    bool matches(std::string_view s) const {
        if (patterns_.empty()) return false;
        auto folded = text::fold(s);
        return std::any_of(patterns_.begin(), patterns_.end(),
                           [&](const std::string& p) { return folded.find(p) != std::string::npos; });
    }

    bool empty() const noexcept { return patterns_.empty(); }
    std::size_t size() const noexcept { return patterns_.size(); }

private:
    std::vector<std::string> patterns_;
};

struct SuppressionCounts {
    std::size_t other_source = 0;
    std::size_t brand_of = 0;
    std::size_t suppress_flag = 0;
    std::size_t deny_listed = 0;

    std::size_t total() const noexcept { return other_source + brand_of + suppress_flag + deny_listed; }
};

struct SuppressionResult {
    std::vector<ConceptRow> kept;
    SuppressionCounts counts;
};

inline bool is_brand_of_record(const ConceptRow& row, const CompileOptions& options) {
    return options.brand_of_ttys.contains(row.tty) || text::istarts_with(row.str, "Brand of ");
}

inline bool is_suppressed_flag(std::string_view flag) { return !flag.empty() && flag != "N"; }

/// Drops foreign-source, "Brand of", flag-suppressed and deny-listed atoms.
/// Each removed row is counted once, under the first rule that matched.
inline SuppressionResult apply_suppressions(std::span<const ConceptRow> candidates, const DenyList& deny_list,
                                            const CompileOptions& options = {}) {
    SuppressionResult out;
    for (const auto& row : candidates) {
        if (!options.source_sab.empty() && row.sab != options.source_sab) {
            ++out.counts.other_source;
        } else if (is_brand_of_record(row, options)) {
            ++out.counts.brand_of;
        } else if (is_suppressed_flag(row.suppress)) {
            ++out.counts.suppress_flag;
        } else if (deny_list.matches(row.str)) {
            ++out.counts.deny_listed;
        } else {
            out.kept.push_back(row);
        }
    }
    return out;
}

namespace detail {

// Lookup over the surviving atoms, in file order.
class AtomIndex {
public:
    explicit AtomIndex(std::span<const ConceptRow> atoms) : atoms_(atoms) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            by_aui_.emplace(atoms[i].rxaui, i);
            by_cui_[atoms[i].rxcui].push_back(i);
        }
    }

    /// Positions of the atoms an endpoint refers to.
    std::vector<std::size_t> resolve(const std::string& rxcui, const std::string& rxaui) const {
        if (!rxaui.empty()) {
            auto it = by_aui_.find(rxaui);
            if (it == by_aui_.end() || atoms_[it->second].rxcui != rxcui) return {};
            return {it->second};
        }
        auto it = by_cui_.find(rxcui);
        return it == by_cui_.end() ? std::vector<std::size_t>{} : it->second;
    }

    const ConceptRow& operator[](std::size_t i) const { return atoms_[i]; }
    std::size_t size() const noexcept { return atoms_.size(); }

private:
    std::span<const ConceptRow> atoms_;
    std::unordered_map<std::string, std::size_t> by_aui_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_cui_;
};

inline bool is_name_tty(const std::string& tty, const CompileOptions& o) {
    return o.generic_name_ttys.contains(tty) || o.brand_name_ttys.contains(tty);
}

// (form atom, name atom) pairs from has_ingredient rows, deduplicated, in relationship order.
inline std::vector<std::pair<std::size_t, std::size_t>> ingredient_links(const AtomIndex& atoms,
                                                                         std::span<const RelationshipRow> rels,
                                                                         const CompileOptions& o) {
    std::vector<std::pair<std::size_t, std::size_t>> links;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& r : rels) {
        if (r.rela != has_ingredient) continue;
        for (auto form : atoms.resolve(r.rxcui2, r.rxaui2)) {
            if (!o.form_ttys.contains(atoms[form].tty)) continue;
            for (auto name : atoms.resolve(r.rxcui1, r.rxaui1)) {
                if (!is_name_tty(atoms[name].tty, o)) continue;
                if (seen.emplace(form, name).second) links.emplace_back(form, name);
            }
        }
    }
    return links;
}

struct NameGroup {
    std::size_t atom = 0;  // first atom in file order carrying this folded name
    std::string folded;
};

// Groups the linked name atoms by folded name and assigns ids ascending by folded name.
inline std::map<std::string, NameGroup> group_names(const AtomIndex& atoms,
                                                    const std::vector<std::pair<std::size_t, std::size_t>>& links) {
    std::map<std::string, NameGroup> groups;
    for (const auto& [form, name] : links) {
        auto folded = text::fold(text::trim(atoms[name].str));
        auto [it, inserted] = groups.try_emplace(folded, NameGroup{name, folded});
        if (!inserted && name < it->second.atom) it->second.atom = name;
    }
    return groups;
}

inline MedListEntry make_entry(MedListId id, const ConceptRow& atom, const CompileOptions& o) {
    return MedListEntry{id, std::string(text::trim(atom.str)), atom.rxcui, atom.rxaui,
                        o.brand_name_ttys.contains(atom.tty), std::nullopt};
}

}  // namespace detail

/// One entry per distinct concise name referenced by at least one common form
/// atom. Ids are assigned from 1, ascending by case-insensitive name.
inline std::vector<MedListEntry> resolve_med_names(std::span<const ConceptRow> concepts,
                                                   std::span<const RelationshipRow> relationships,
                                                   const CompileOptions& options = {}) {
    detail::AtomIndex atoms(concepts);
    auto groups = detail::group_names(atoms, detail::ingredient_links(atoms, relationships, options));
    std::vector<MedListEntry> out;
    MedListId next = 1;
    for (const auto& [folded, group] : groups) out.push_back(detail::make_entry(next++, atoms[group.atom], options));
    return out;
}

/// Brand atom id -> generic atom id, only for brands with exactly one generic.
inline std::map<std::string, std::string> resolve_tradenames(std::span<const ConceptRow> concepts,
                                                             std::span<const RelationshipRow> relationships,
                                                             const CompileOptions& options = {}) {
    detail::AtomIndex atoms(concepts);
    std::map<std::string, std::set<std::string>> candidates;
    for (const auto& r : relationships) {
        if (r.rela != tradename_of) continue;
        for (auto brand : atoms.resolve(r.rxcui2, r.rxaui2)) {
            if (!options.brand_name_ttys.contains(atoms[brand].tty)) continue;
            auto& generics = candidates[atoms[brand].rxaui];
            for (auto generic : atoms.resolve(r.rxcui1, r.rxaui1))
                if (options.generic_name_ttys.contains(atoms[generic].tty)) generics.insert(atoms[generic].rxaui);
        }
    }
    std::map<std::string, std::string> out;
    for (const auto& [brand, generics] : candidates)
        if (generics.size() == 1) out.emplace(brand, *generics.begin());
    return out;
}

struct CompileReport {
    std::size_t concepts_in = 0;
    std::size_t relationships_in = 0;
    std::size_t attributes_in = 0;
    SuppressionCounts suppressed;
    std::size_t form_atoms = 0;
    std::size_t strength_missing = 0;
    std::size_t strength_unparseable = 0;
    std::size_t strength_conflicting = 0;
    std::size_t strength_zero = 0;
    std::size_t unlinked_forms = 0;
    std::size_t duplicate_forms = 0;
    std::size_t tradenames_mapped = 0;
    std::size_t brands_without_generic = 0;
    std::size_t med_names = 0;
    std::size_t common_forms = 0;
    std::size_t dose_units = 0;
    /// Raw attribute values that failed the strength grammar.
    std::vector<std::string> unparseable_values;
};

struct CompileResult {
    CompiledTerminology terminology;
    CompileReport report;
};

/// Full pipeline: suppress, pick form atoms, attach strengths, resolve names and
/// tradenames, derive the dose-unit table. Deterministic for identical inputs.
inline CompileResult compile(std::span<const ConceptRow> concepts, std::span<const RelationshipRow> relationships,
                             std::span<const AttributeRow> attributes, const DenyList& deny_list,
                             const CompileOptions& options = {}) {
    CompileReport report;
    report.concepts_in = concepts.size();
    report.relationships_in = relationships.size();
    report.attributes_in = attributes.size();

    auto suppression = apply_suppressions(concepts, deny_list, options);
    report.suppressed = suppression.counts;

    // Strength lookup by atom, falling back to concept.
    std::unordered_map<std::string, std::vector<const AttributeRow*>> strength_by_aui, strength_by_cui;
    for (const auto& a : attributes) {
        if (a.atn != strength_attribute) continue;
        if (!a.rxaui.empty()) strength_by_aui[a.rxaui].push_back(&a);
        strength_by_cui[a.rxcui].push_back(&a);
    }

    // Keep name atoms and the form atoms whose strength resolves cleanly.
    std::vector<ConceptRow> usable;
    std::unordered_map<std::string, Strength> strengths;
    for (const auto& atom : suppression.kept) {
        if (!options.form_ttys.contains(atom.tty)) {
            usable.push_back(atom);
            continue;
        }
        ++report.form_atoms;
        const std::vector<const AttributeRow*>* attrs = nullptr;
        if (auto it = strength_by_aui.find(atom.rxaui); it != strength_by_aui.end()) {
            attrs = &it->second;
        } else if (auto jt = strength_by_cui.find(atom.rxcui); jt != strength_by_cui.end()) {
            attrs = &jt->second;
        }
        if (!attrs) {
            ++report.strength_missing;
            continue;
        }
        std::optional<Strength> chosen;
        bool bad = false;
        bool conflict = false;
        for (const auto* a : *attrs) {
            try {
                auto s = extract_strength(a->atv);
                if (chosen && !(*chosen == s)) conflict = true;
                chosen = std::move(s);
            } catch (const UnparseableStrength& e) {
                report.unparseable_values.push_back(e.atv());
                bad = true;
            }
        }
        if (bad) {
            ++report.strength_unparseable;
        } else if (conflict) {
            ++report.strength_conflicting;
        } else if (chosen->dose_amt.is_zero()) {
            ++report.strength_zero;
        } else {
            strengths.emplace(atom.rxaui, std::move(*chosen));
            usable.push_back(atom);
        }
    }

    detail::AtomIndex atoms(usable);
    auto links = detail::ingredient_links(atoms, relationships, options);
    auto groups = detail::group_names(atoms, links);

    std::vector<MedListEntry> med_list;
    std::unordered_map<std::string, MedListId> id_of;
    MedListId next = 1;
    for (const auto& [folded, group] : groups) {
        med_list.push_back(detail::make_entry(next, atoms[group.atom], options));
        id_of.emplace(folded, next++);
    }

    std::set<std::size_t> linked_forms;
    std::set<std::pair<MedListId, std::string>> seen_forms;
    std::set<std::pair<MedListId, std::string>> units;
    std::vector<CommonFormEntry> common;
    // File order of form atoms decides which duplicate wins.
    auto ordered = links;
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [form, name] : ordered) {
        linked_forms.insert(form);
        const auto& atom = atoms[form];
        auto id = id_of.at(text::fold(text::trim(atoms[name].str)));
        if (!seen_forms.emplace(id, atom.str).second) {
            ++report.duplicate_forms;
            continue;
        }
        const auto& s = strengths.at(atom.rxaui);
        common.push_back({id, atom.str, s.dose_amt, s.dose_units, atom.rxcui, atom.rxaui});
        units.emplace(id, s.dose_units);
    }
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if (options.form_ttys.contains(atoms[i].tty) && !linked_forms.contains(i)) ++report.unlinked_forms;

    auto tradenames = resolve_tradenames(usable, relationships, options);
    for (auto& entry : med_list) {
        if (!entry.is_brand) continue;
        if (auto it = tradenames.find(entry.rxaui); it != tradenames.end()) {
            entry.generic_rxaui = it->second;
            ++report.tradenames_mapped;
        } else {
            ++report.brands_without_generic;
        }
    }

    std::vector<DoseUnitEntry> dose;
    for (const auto& [id, unit] : units) dose.push_back({id, unit});

    report.med_names = med_list.size();
    report.common_forms = common.size();
    report.dose_units = dose.size();

    if (options.require_common_forms && common.empty())
        throw CompileError("select_common_forms", "0 common forms (" + std::to_string(report.concepts_in) +
                                                      " concepts in, " + std::to_string(report.form_atoms) +
                                                      " form atoms, " + std::to_string(report.suppressed.total()) +
                                                      " suppressed)");

    try {
        return {CompiledTerminology(std::move(med_list), std::move(common), std::move(dose), options.version_tag),
                std::move(report)};
    } catch (const DataError& e) {
        throw CompileError("assemble_tables", e.what());
    }
}

}  // namespace medlist::compiler
