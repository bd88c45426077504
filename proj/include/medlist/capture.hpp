#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medlist/json.hpp"

#include "medlist/decimal.hpp"
#include "medlist/terminology.hpp"
#include "medlist/text.hpp"

namespace medlist::capture {

/// Month-granularity date, written "mm/yyyy".
struct YearMonth {
    int year = 0;
    int month = 0;

    static std::optional<YearMonth> parse(std::string_view s) {
        s = text::trim(s);
        if (s.size() != 7 || s[2] != '/') return std::nullopt;
        auto digits = [](std::string_view d, int& out) {
            out = 0;
            for (char c : d) {
                if (c < '0' || c > '9') return false;
                out = out * 10 + (c - '0');
            }
            return true;
        };
        YearMonth ym;
        if (!digits(s.substr(0, 2), ym.month) || !digits(s.substr(3), ym.year)) return std::nullopt;
        if (ym.month < 1 || ym.month > 12 || ym.year < 1) return std::nullopt;
        return ym;
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d/%04d", month, year);
        return buf;
    }

    friend auto operator<=>(const YearMonth& a, const YearMonth& b) {
        if (auto c = a.year <=> b.year; c != 0) return c;
        return a.month <=> b.month;
    }
    friend bool operator==(const YearMonth&, const YearMonth&) = default;
};

/// One row of the medication-history screen, with free-form inputs kept as entered.
struct MedicationHistoryEntry {
    std::string patient_ref;
    std::optional<MedListId> med_list_id;
    std::string med_name;
    std::optional<std::string> dose_amt;
    std::optional<std::string> dose_units;
    std::optional<std::string> frequency_code;
    std::optional<std::string> begin_date;
    bool current = false;
    std::optional<std::string> end_date;
    std::optional<std::string> prescriber_note;
    std::optional<std::string> effectiveness_note;
    bool none_reported = false;

    /// Parsed dose amount, if present and well-formed.
    std::optional<Decimal> dose_amount() const {
        return dose_amt ? Decimal::parse(text::trim(*dose_amt)) : std::nullopt;
    }

    friend bool operator==(const MedicationHistoryEntry&, const MedicationHistoryEntry&) = default;
};

struct DoseFrequencyTerm {
    std::string code;
    std::string display;

    friend bool operator==(const DoseFrequencyTerm&, const DoseFrequencyTerm&) = default;
};

/// The ten default sigla in display order, followed by any configured extras.
inline std::vector<DoseFrequencyTerm> frequency_vocabulary(std::span<const DoseFrequencyTerm> extra = {}) {
    std::vector<DoseFrequencyTerm> terms{
        {"qd", "once a day"},
        {"qam", "Once a day, in the morning"},
        {"qpm", "Once a day, in the evening"},
        {"qhs", "Once a day, before bed"},
        {"bid", "Twice Daily"},
        {"tid", "Three times daily"},
        {"qid", "Four times daily"},
        {"qod", "Every other day"},
        {"prn", "As Required"},
        {"mdu", "As Directed"},
    };
    terms.insert(terms.end(), extra.begin(), extra.end());
    return terms;
}

struct FieldViolation {
    std::string field;
    std::string rule;

    friend bool operator==(const FieldViolation&, const FieldViolation&) = default;
};

/// Every rule of the entry screen; an empty result means the entry is valid.
inline std::vector<FieldViolation> validate_entry(const MedicationHistoryEntry& e,
                                                  std::span<const DoseFrequencyTerm> vocabulary) {
    std::vector<FieldViolation> v;
    auto add = [&](const char* field, const char* rule) { v.push_back({field, rule}); };

    if (text::trim(e.patient_ref).empty()) add("patient_ref", "required");

    if (e.none_reported) {
        const char* rule = "must be empty when none is reported";
        if (e.med_list_id) add("med_list_id", rule);
        if (!text::trim(e.med_name).empty()) add("med_name", rule);
        if (e.dose_amt) add("dose_amt", rule);
        if (e.dose_units) add("dose_units", rule);
        if (e.frequency_code) add("frequency_code", rule);
        if (e.begin_date) add("begin_date", rule);
        if (e.current) add("current", rule);
        if (e.end_date) add("end_date", rule);
        if (e.prescriber_note) add("prescriber_note", rule);
        if (e.effectiveness_note) add("effectiveness_note", rule);
        return v;
    }

    if (e.med_list_id && *e.med_list_id <= 0) add("med_list_id", "must be a positive id");
    if (text::trim(e.med_name).empty()) add("med_name", "required");

    std::optional<YearMonth> begin;
    if (!e.begin_date) {
        add("begin_date", "required");
    } else if (!(begin = YearMonth::parse(*e.begin_date))) {
        add("begin_date", "must be mm/yyyy");
    }

    if (e.end_date) {
        if (e.current) {
            add("end_date", "must be empty for a current medication");
        } else if (auto end = YearMonth::parse(*e.end_date); !end) {
            add("end_date", "must be mm/yyyy");
        } else if (begin && *end < *begin) {
            add("end_date", "must not precede begin_date");
        }
    }

    if (e.dose_amt) {
        auto amount = e.dose_amount();
        if (!amount) {
            add("dose_amt", "must be an integer or decimal value");
        } else if (amount->is_zero()) {
            add("dose_amt", "must be positive");
        }
    }
    if (e.dose_units && text::trim(*e.dose_units).empty()) add("dose_units", "must not be blank");

    if (e.frequency_code) {
        bool known = std::any_of(vocabulary.begin(), vocabulary.end(),
                                 [&](const DoseFrequencyTerm& t) { return t.code == *e.frequency_code; });
        if (!known) add("frequency_code", "unknown frequency code");
    }
    return v;
}

inline std::vector<FieldViolation> validate_entry(const MedicationHistoryEntry& e) {
    auto vocabulary = frequency_vocabulary();
    return validate_entry(e, vocabulary);
}

/// Ordered from least to most detail.
enum class MappingLevel { unmapped = 0, name_only = 1, full_form = 2 };

inline const char* to_string(MappingLevel level) noexcept {
    switch (level) {
        case MappingLevel::full_form: return "FULL_FORM";
        case MappingLevel::name_only: return "NAME_ONLY";
        case MappingLevel::unmapped: break;
    }
    return "UNMAPPED";
}

inline std::optional<MappingLevel> parse_mapping_level(std::string_view s) {
    if (s == "FULL_FORM") return MappingLevel::full_form;
    if (s == "NAME_ONLY") return MappingLevel::name_only;
    if (s == "UNMAPPED") return MappingLevel::unmapped;
    return std::nullopt;
}

struct Mapping {
    MappingLevel level = MappingLevel::unmapped;
    std::optional<std::string> matched_rxcui;
    std::optional<std::string> matched_rxaui;

    friend bool operator==(const Mapping&, const Mapping&) = default;
};

/// Best mapping back to the terminology: the exact common form when id, amount
/// and units all match one, otherwise the medication itself, otherwise nothing.
inline Mapping reconstruct_common_form(const MedicationHistoryEntry& entry, const CompiledTerminology& terminology) {
    if (!entry.med_list_id) return {};
    const auto* med = terminology.find(*entry.med_list_id);
    if (!med) return {};

    auto amount = entry.dose_amount();
    if (amount && entry.dose_units) {
        auto units = text::fold(text::trim(*entry.dose_units));
        for (const auto& form : terminology.forms_of(med->med_list_id))
            if (form.dose_amt == *amount && form.dose_units == units)
                return {MappingLevel::full_form, form.rxcui, form.rxaui};
    }
    return {MappingLevel::name_only, med->rxcui, med->rxaui};
}

// JSON wire form. Empty strings read as absent for the optional text fields.

inline Json to_json(const MedicationHistoryEntry& e) {
    auto opt = [](const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); };
    return Json{
        {"patient_ref", e.patient_ref},
        {"med_list_id", e.med_list_id ? Json(*e.med_list_id) : Json(nullptr)},
        {"med_name", e.med_name},
        {"dose_amt", opt(e.dose_amt)},
        {"dose_units", opt(e.dose_units)},
        {"frequency_code", opt(e.frequency_code)},
        {"begin_date", opt(e.begin_date)},
        {"current", e.current},
        {"end_date", opt(e.end_date)},
        {"prescriber_note", opt(e.prescriber_note)},
        {"effectiveness_note", opt(e.effectiveness_note)},
        {"none_reported", e.none_reported},
    };
}

/// Throws nlohmann::json::exception on wrong field types.
inline MedicationHistoryEntry entry_from_json(const Json& j) {
    if (!j.is_object()) throw nlohmann::json::type_error::create(302, "entry must be a JSON object", &j);
    auto text_field = [&](const char* key) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return std::nullopt;
        std::string s;
        if (it->is_number_integer() || it->is_number_unsigned() || it->is_number_float()) {
            s = it->dump();
        } else {
            s = it->get<std::string>();
        }
        if (text::trim(s).empty()) return std::nullopt;
        return s;
    };
    MedicationHistoryEntry e;
    e.patient_ref = j.value("patient_ref", std::string());
    if (auto it = j.find("med_list_id"); it != j.end() && !it->is_null()) e.med_list_id = it->get<MedListId>();
    e.med_name = text_field("med_name").value_or("");
    e.dose_amt = text_field("dose_amt");
    e.dose_units = text_field("dose_units");
    e.frequency_code = text_field("frequency_code");
    e.begin_date = text_field("begin_date");
    e.current = j.value("current", false);
    e.end_date = text_field("end_date");
    e.prescriber_note = text_field("prescriber_note");
    e.effectiveness_note = text_field("effectiveness_note");
    e.none_reported = j.value("none_reported", false);
    return e;
}

inline Json to_json(const Mapping& m) {
    auto opt = [](const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); };
    return Json{
        {"level", to_string(m.level)}, {"rxcui", opt(m.matched_rxcui)}, {"rxaui", opt(m.matched_rxaui)}};
}

inline Mapping mapping_from_json(const Json& j) {
    Mapping m;
    auto level = parse_mapping_level(j.at("level").get<std::string>());
    if (!level) throw nlohmann::json::other_error::create(501, "unknown mapping level", &j);
    m.level = *level;
    if (!j.at("rxcui").is_null()) m.matched_rxcui = j.at("rxcui").get<std::string>();
    if (!j.at("rxaui").is_null()) m.matched_rxaui = j.at("rxaui").get<std::string>();
    return m;
}

}  // namespace medlist::capture
