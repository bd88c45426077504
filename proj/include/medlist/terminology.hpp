#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "medlist/decimal.hpp"
#include "medlist/errors.hpp"
#include "medlist/text.hpp"

namespace medlist {

using MedListId = std::int64_t;

/// One concise medication name (generic ingredient or brand).
struct MedListEntry {
    MedListId med_list_id = 0;
    std::string med_name;
    std::string rxcui;
    std::string rxaui;
    bool is_brand = false;
    std::optional<std::string> generic_rxaui;

    friend bool operator==(const MedListEntry&, const MedListEntry&) = default;
};

/// A commonly prescribed dosage, e.g. "aripiprazole 10 MG [Abilify]".
struct CommonFormEntry {
    MedListId med_list_id = 0;
    std::string common_form;
    Decimal dose_amt;
    std::string dose_units;
    std::string rxcui;
    std::string rxaui;

    friend bool operator==(const CommonFormEntry&, const CommonFormEntry&) = default;
};

struct DoseUnitEntry {
    MedListId med_list_id = 0;
    std::string dose_units;

    friend bool operator==(const DoseUnitEntry&, const DoseUnitEntry&) = default;
};

/// Modal ordering: dose units, then amount, then the display string as a tiebreak.
inline bool modal_order(const CommonFormEntry& a, const CommonFormEntry& b) {
    return std::tie(a.med_list_id, a.dose_units, a.dose_amt, a.common_form) <
           std::tie(b.med_list_id, b.dose_units, b.dose_amt, b.common_form);
}

/// The three production tables. Validated on construction and immutable after.
class CompiledTerminology {
public:
    CompiledTerminology() = default;

    /// Throws DataError if any table invariant or foreign key fails.
    CompiledTerminology(std::vector<MedListEntry> med_list, std::vector<CommonFormEntry> med_list_common,
                        std::vector<DoseUnitEntry> med_list_dose, std::string version_tag)
        : med_list_(std::move(med_list)),
          common_(std::move(med_list_common)),
          dose_(std::move(med_list_dose)),
          version_tag_(std::move(version_tag)) {
        std::sort(med_list_.begin(), med_list_.end(),
                  [](const auto& a, const auto& b) { return a.med_list_id < b.med_list_id; });
        std::sort(common_.begin(), common_.end(), modal_order);
        std::sort(dose_.begin(), dose_.end(), [](const auto& a, const auto& b) {
            return std::tie(a.med_list_id, a.dose_units) < std::tie(b.med_list_id, b.dose_units);
        });
        validate();
    }

    std::span<const MedListEntry> med_list() const noexcept { return med_list_; }
    std::span<const CommonFormEntry> med_list_common() const noexcept { return common_; }
    std::span<const DoseUnitEntry> med_list_dose() const noexcept { return dose_; }
    const std::string& version_tag() const noexcept { return version_tag_; }

    bool empty() const noexcept { return med_list_.empty(); }

    const MedListEntry* find(MedListId id) const noexcept {
        auto it = std::lower_bound(med_list_.begin(), med_list_.end(), id,
                                   [](const MedListEntry& e, MedListId v) { return e.med_list_id < v; });
        return (it != med_list_.end() && it->med_list_id == id) ? &*it : nullptr;
    }

    /// Forms for one medication in modal order (units, then amount).
    std::span<const CommonFormEntry> forms_of(MedListId id) const noexcept { return range_of(common_, id); }

    /// Distinct units for one medication, ascending.
    std::span<const DoseUnitEntry> units_of(MedListId id) const noexcept { return range_of(dose_, id); }

private:
    template <class Row>
    static std::span<const Row> range_of(const std::vector<Row>& rows, MedListId id) noexcept {
        auto lo = std::lower_bound(rows.begin(), rows.end(), id,
                                   [](const Row& r, MedListId v) { return r.med_list_id < v; });
        auto hi = std::upper_bound(lo, rows.end(), id, [](MedListId v, const Row& r) { return v < r.med_list_id; });
        return {rows.data() + (lo - rows.begin()), static_cast<std::size_t>(hi - lo)};
    }

    void validate() const {
        auto fail = [](const std::string& what) { throw DataError("terminology invariant violated: " + what); };

        std::set<std::string> names;
        for (std::size_t i = 0; i < med_list_.size(); ++i) {
            const auto& m = med_list_[i];
            if (i > 0 && med_list_[i - 1].med_list_id == m.med_list_id)
                fail("duplicate med_list_id " + std::to_string(m.med_list_id));
            if (text::trim(m.med_name).empty()) fail("empty med_name for id " + std::to_string(m.med_list_id));
            if (!names.insert(text::fold(m.med_name)).second) fail("duplicate med_name '" + m.med_name + "'");
            if (m.generic_rxaui && !m.is_brand) fail("generic_rxaui set on non-brand '" + m.med_name + "'");
        }

        for (std::size_t i = 0; i < dose_.size(); ++i) {
            const auto& d = dose_[i];
            if (!find(d.med_list_id)) fail("med_list_dose references unknown id " + std::to_string(d.med_list_id));
            if (d.dose_units.empty()) fail("empty dose unit for id " + std::to_string(d.med_list_id));
            if (i > 0 && dose_[i - 1].med_list_id == d.med_list_id && dose_[i - 1].dose_units == d.dose_units)
                fail("duplicate dose unit '" + d.dose_units + "' for id " + std::to_string(d.med_list_id));
        }

        std::set<std::pair<MedListId, std::string>> seen;
        for (const auto& c : common_) {
            auto id = std::to_string(c.med_list_id);
            if (!find(c.med_list_id)) fail("med_list_common references unknown id " + id);
            if (c.dose_amt.is_zero()) fail("non-positive dose_amt in '" + c.common_form + "'");
            if (!seen.emplace(c.med_list_id, c.common_form).second)
                fail("duplicate common form '" + c.common_form + "' for id " + id);
            auto units = units_of(c.med_list_id);
            bool known = std::any_of(units.begin(), units.end(),
                                     [&](const DoseUnitEntry& d) { return d.dose_units == c.dose_units; });
            if (!known) fail("dose unit '" + c.dose_units + "' of '" + c.common_form + "' missing from med_list_dose");
        }
    }

    std::vector<MedListEntry> med_list_;
    std::vector<CommonFormEntry> common_;
    std::vector<DoseUnitEntry> dose_;
    std::string version_tag_;
};

}  // namespace medlist
