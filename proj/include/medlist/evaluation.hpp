#pragma once

// Four-factor evaluation: flexibility, speed, data integrity, coverage.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "medlist/capture.hpp"
#include "medlist/errors.hpp"
#include "medlist/json.hpp"
#include "medlist/terminology.hpp"
#include "medlist/text.hpp"

namespace medlist::eval {

// ---- coverage ---------------------------------------------------------------

enum class NonMatchClass { naming_variation, supplement_or_otc, other };

inline const char* to_string(NonMatchClass c) noexcept {
    switch (c) {
        case NonMatchClass::naming_variation: return "NAMING_VARIATION";
        case NonMatchClass::supplement_or_otc: return "SUPPLEMENT_OR_OTC";
        case NonMatchClass::other: break;
    }
    return "OTHER";
}

struct NonMatch {
    std::string name;
    NonMatchClass kind = NonMatchClass::other;

    friend bool operator==(const NonMatch&, const NonMatch&) = default;
};

struct CoverageReport {
    std::size_t total = 0;
    std::size_t matched = 0;
    double rate = 0.0;
    std::vector<NonMatch> non_matches;
};

inline std::vector<std::string> default_supplement_patterns() {
    return {"omega-3", "fatty acid", "vitamin", "nicotine", "supplement", "fish oil", "probiotic", "herbal"};
}

/// Comparison key: trimmed and case-folded.
inline std::string match_key(std::string_view name) { return text::fold(text::trim(name)); }

/// Straight name match ignoring capitalization; misses are classified as naming
/// variations (one name is a prefix of the other), supplements/OTC (pattern
/// list), or other.
inline CoverageReport match_coverage(std::span<const std::string> legacy_names, const CompiledTerminology& terminology,
                                     std::span<const std::string> supplement_patterns) {
    std::vector<std::string> names;
    for (const auto& m : terminology.med_list()) names.push_back(match_key(m.med_name));
    std::sort(names.begin(), names.end());
    std::unordered_set<std::string> exact(names.begin(), names.end());

    std::vector<std::string> patterns;
    for (const auto& p : supplement_patterns)
        if (!text::trim(p).empty()) patterns.push_back(match_key(p));

    CoverageReport report;
    report.total = legacy_names.size();
    for (const auto& legacy : legacy_names) {
        auto key = match_key(legacy);
        if (exact.contains(key)) {
            ++report.matched;
            continue;
        }
        // A known name that prefixes this one, or a known name this one prefixes.
        bool variation = false;
        for (std::size_t len = 1; len < key.size() && !variation; ++len) variation = exact.contains(key.substr(0, len));
        if (!variation && !key.empty()) {
            auto it = std::lower_bound(names.begin(), names.end(), key);
            variation = it != names.end() && it->starts_with(key);
        }
        NonMatchClass kind = NonMatchClass::other;
        if (variation) {
            kind = NonMatchClass::naming_variation;
        } else if (std::any_of(patterns.begin(), patterns.end(),
                               [&](const std::string& p) { return key.find(p) != std::string::npos; })) {
            kind = NonMatchClass::supplement_or_otc;
        }
        report.non_matches.push_back({legacy, kind});
    }
    report.rate = report.total == 0 ? 0.0 : static_cast<double>(report.matched) / static_cast<double>(report.total);
    return report;
}

inline CoverageReport match_coverage(std::span<const std::string> legacy_names, const CompiledTerminology& terminology) {
    auto patterns = default_supplement_patterns();
    return match_coverage(legacy_names, terminology, patterns);
}

// ---- structure --------------------------------------------------------------

struct BranchingFactors {
    double forms = 0.0;
    double units = 0.0;
};

/// Mean common forms and mean distinct units per medication. Throws EmptyTerminology.
inline BranchingFactors branching_factors(const CompiledTerminology& terminology) {
    if (terminology.med_list().empty()) throw EmptyTerminology();
    auto n = static_cast<double>(terminology.med_list().size());
    return {static_cast<double>(terminology.med_list_common().size()) / n,
            static_cast<double>(terminology.med_list_dose().size()) / n};
}

/// 1 - medications / common forms. Throws EmptyTerminology.
inline double cache_reduction(std::size_t n_medications, std::size_t n_common_forms) {
    if (n_common_forms == 0) throw EmptyTerminology();
    return 1.0 - static_cast<double>(n_medications) / static_cast<double>(n_common_forms);
}

inline double cache_reduction(const CompiledTerminology& terminology) {
    return cache_reduction(terminology.med_list().size(), terminology.med_list_common().size());
}

/// Shannon entropy -sum p log_b p with 0 log 0 = 0.
/// Throws InvalidDistribution unless probabilities are non-negative and sum to 1 within 1e-9.
inline double entropy_bits(std::span<const double> distribution, double base = 2.0) {
    if (!(base > 0.0) || base == 1.0) throw InvalidDistribution("logarithm base must be positive and not 1");
    double sum = 0.0;
    double carry = 0.0;  // Kahan
    for (double p : distribution) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidDistribution("probabilities must be finite and non-negative");
        double y = p - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidDistribution("probabilities sum to " + std::to_string(sum));
    double h = 0.0;
    for (double p : distribution)
        if (p > 0.0) h -= p * std::log(p);
    return h / std::log(base);
}

struct EntropyComparison {
    double flat_bits = 0.0;
    double factored_bits = 0.0;
};

/// Flat: uniform over every common form. Factored: search size times the two
/// branching factors, each treated as a uniform choice.
inline EntropyComparison entropy_comparison(std::size_t n_medications, std::size_t n_common_forms, double bf_forms,
                                            double bf_units, double base = 2.0) {
    if (n_medications == 0 || n_common_forms == 0 || !(bf_forms > 0.0) || !(bf_units > 0.0)) throw EmptyTerminology();
    auto log_b = [base](double x) { return std::log(x) / std::log(base); };
    return {log_b(static_cast<double>(n_common_forms)),
            log_b(static_cast<double>(n_medications)) + log_b(bf_forms) + log_b(bf_units)};
}

inline EntropyComparison entropy_comparison(const CompiledTerminology& terminology, double base = 2.0) {
    auto bf = branching_factors(terminology);
    return entropy_comparison(terminology.med_list().size(), terminology.med_list_common().size(), bf.forms, bf.units,
                              base);
}

struct StructureMetrics {
    std::size_t n_medications = 0;
    std::size_t n_common_forms = 0;
    double bf_forms = 0.0;
    double bf_units = 0.0;
    double cache_reduction = 0.0;
    double entropy_flat_bits = 0.0;
    double entropy_factored_bits = 0.0;
};

/// nullopt when the terminology has no medications or no forms.
inline std::optional<StructureMetrics> structure_metrics(const CompiledTerminology& t) {
    if (t.med_list().empty() || t.med_list_common().empty()) return std::nullopt;
    auto bf = branching_factors(t);
    auto h = entropy_comparison(t);
    return StructureMetrics{t.med_list().size(), t.med_list_common().size(), bf.forms, bf.units, cache_reduction(t),
                            h.flat_bits, h.factored_bits};
}

// ---- speed ------------------------------------------------------------------

/// Value at sorted index min(N-1, floor(pct * N / 100)).
inline double percentile(std::vector<double> samples, unsigned pct) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    auto idx = std::min<std::size_t>(samples.size() - 1, samples.size() * pct / 100);
    return samples[idx];
}

struct LatencySummary {
    std::size_t samples = 0;
    double p50_ms = 0.0;
    double p90_ms = 0.0;
    double p99_ms = 0.0;
    double max_ms = 0.0;
};

inline LatencySummary summarize_latency(std::span<const double> samples_ms) {
    std::vector<double> s(samples_ms.begin(), samples_ms.end());
    LatencySummary out;
    out.samples = s.size();
    if (s.empty()) return out;
    out.p50_ms = percentile(s, 50);
    out.p90_ms = percentile(s, 90);
    out.p99_ms = percentile(s, 99);
    out.max_ms = *std::max_element(s.begin(), s.end());
    return out;
}

// ---- integrity and flexibility ----------------------------------------------

struct IntegrityReport {
    std::size_t forms_checked = 0;
    std::size_t forms_reconstructed = 0;
    double round_trip_rate = 0.0;
};

/// Rebuilds an entry from every common form's components and checks it maps
/// back to that exact form.
inline IntegrityReport integrity_check(const CompiledTerminology& terminology) {
    IntegrityReport out;
    for (const auto& form : terminology.med_list_common()) {
        ++out.forms_checked;
        capture::MedicationHistoryEntry e;
        e.med_list_id = form.med_list_id;
        e.med_name = terminology.find(form.med_list_id)->med_name;
        e.dose_amt = form.dose_amt.to_string();
        e.dose_units = form.dose_units;
        auto m = capture::reconstruct_common_form(e, terminology);
        if (m.level == capture::MappingLevel::full_form && m.matched_rxcui == form.rxcui && m.matched_rxaui == form.rxaui)
            ++out.forms_reconstructed;
    }
    out.round_trip_rate = out.forms_checked == 0 ? 0.0
                                                 : static_cast<double>(out.forms_reconstructed) /
                                                       static_cast<double>(out.forms_checked);
    return out;
}

struct FlexibilityReport {
    std::size_t entries = 0;
    std::size_t none_reported = 0;
    std::map<std::string, std::size_t> levels{{"FULL_FORM", 0}, {"NAME_ONLY", 0}, {"UNMAPPED", 0}};
};

inline FlexibilityReport flexibility(std::span<const capture::MedicationHistoryEntry> entries,
                                     const CompiledTerminology& terminology) {
    FlexibilityReport out;
    for (const auto& e : entries) {
        ++out.entries;
        if (e.none_reported) {
            ++out.none_reported;
            continue;
        }
        ++out.levels[capture::to_string(capture::reconstruct_common_form(e, terminology).level)];
    }
    return out;
}

// ---- report -----------------------------------------------------------------

struct FourFactorReport {
    std::string version_tag;
    FlexibilityReport flexibility;
    std::optional<StructureMetrics> structure;
    LatencySummary latency;
    IntegrityReport integrity;
    CoverageReport coverage;
};

inline FourFactorReport build_report(const CompiledTerminology& terminology,
                                     std::span<const capture::MedicationHistoryEntry> captured,
                                     std::span<const std::string> legacy_names, std::span<const double> latency_ms) {
    return {terminology.version_tag(),          eval::flexibility(captured, terminology),
            structure_metrics(terminology),     summarize_latency(latency_ms),
            integrity_check(terminology),       match_coverage(legacy_names, terminology)};
}

inline std::string percent(double fraction) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(1);
    s << fraction * 100.0 << '%';
    return s.str();
}

inline Json to_json(const FourFactorReport& r) {
    Json flex{{"entries", r.flexibility.entries}, {"none_reported", r.flexibility.none_reported}, {"levels", Json::object()}};
    for (const auto& [level, n] : r.flexibility.levels) flex["levels"][level] = n;

    Json structure = nullptr;
    if (r.structure) {
        const auto& s = *r.structure;
        structure = Json{{"n_medications", s.n_medications},
                         {"n_common_forms", s.n_common_forms},
                         {"bf_forms", s.bf_forms},
                         {"bf_units", s.bf_units},
                         {"cache_reduction", s.cache_reduction},
                         {"entropy_flat_bits", s.entropy_flat_bits},
                         {"entropy_factored_bits", s.entropy_factored_bits}};
    }
    Json non_matches = Json::array();
    for (const auto& n : r.coverage.non_matches) non_matches.push_back({{"name", n.name}, {"class", to_string(n.kind)}});

    return Json{
        {"version_tag", r.version_tag},
        {"flexibility", flex},
        {"speed",
         {{"structure", structure},
          {"suggest_latency_ms",
           {{"samples", r.latency.samples},
            {"p50", r.latency.p50_ms},
            {"p90", r.latency.p90_ms},
            {"p99", r.latency.p99_ms},
            {"max", r.latency.max_ms}}}}},
        {"integrity",
         {{"forms_checked", r.integrity.forms_checked},
          {"forms_reconstructed", r.integrity.forms_reconstructed},
          {"round_trip_rate", r.integrity.round_trip_rate}}},
        {"coverage",
         {{"total", r.coverage.total},
          {"matched", r.coverage.matched},
          {"rate", r.coverage.rate},
          {"non_matches", non_matches}}},
    };
}

inline std::string to_text(const FourFactorReport& r) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(3);
    out << "Four-factor evaluation";
    if (!r.version_tag.empty()) out << " (" << r.version_tag << ")";
    out << "\n\n1) Flexibility\n";
    out << "  captured entries: " << r.flexibility.entries << " (none reported: " << r.flexibility.none_reported << ")\n";
    for (const auto& [level, n] : r.flexibility.levels) out << "  " << level << ": " << n << "\n";

    out << "\n2) Speed\n";
    if (r.structure) {
        const auto& s = *r.structure;
        out << "  medications: " << s.n_medications << ", common forms: " << s.n_common_forms << "\n";
        out << "  branching factor (forms): " << s.bf_forms << "\n";
        out << "  branching factor (units): " << s.bf_units << "\n";
        out << "  cache reduction: " << percent(s.cache_reduction) << "\n";
        out << "  entropy flat: " << s.entropy_flat_bits << " bits, factored: " << s.entropy_factored_bits << " bits\n";
    } else {
        out << "  structure: n/a (empty terminology)\n";
    }
    out << "  suggest latency (" << r.latency.samples << " samples): p50 " << r.latency.p50_ms << " ms, p90 "
        << r.latency.p90_ms << " ms, p99 " << r.latency.p99_ms << " ms, max " << r.latency.max_ms << " ms\n";
    out << "  reference, networked deployment: ~200 ms per database round trip, ~500 ms worst case\n";

    out << "\n3) Data integrity\n";
    out << "  common forms reconstructed: " << r.integrity.forms_reconstructed << "/" << r.integrity.forms_checked << " ("
        << percent(r.integrity.round_trip_rate) << ")\n";

    out << "\n4) Coverage\n";
    out << "  matched: " << r.coverage.matched << "/" << r.coverage.total << " (" << percent(r.coverage.rate) << ")\n";
    std::map<std::string, std::size_t> by_class;
    for (const auto& n : r.coverage.non_matches) ++by_class[to_string(n.kind)];
    for (const auto& [k, n] : by_class) out << "  " << k << ": " << n << "\n";
    return out.str();
}

}  // namespace medlist::eval
