#pragma once

// Server-side caches in front of the compiled tables.
//
// One search cache holds the whole medication-name index; per-medication
// caches hold the modal options and dose units together. Every miss is one
// fetch from the backing store and bumps the trip counter, so a cold session
// entering n distinct medications costs 1 (search cache) + n (modal fetches).

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "medlist/errors.hpp"
#include "medlist/search.hpp"
#include "medlist/terminology.hpp"

namespace medlist::cache {

using Clock = std::chrono::steady_clock;
using ClockFn = std::function<Clock::time_point()>;

inline constexpr Clock::duration default_ttl = std::chrono::hours(2);
inline constexpr std::string_view unknown_option = "unknown";
inline constexpr std::string_view other_units = "Other Units";

/// Test clock that only moves when told to.
class ManualClock {
public:
    Clock::time_point now() const noexcept { return now_; }
    void advance(Clock::duration d) noexcept { now_ += d; }
    ClockFn fn() {
        return [this] { return now_; };
    }

private:
    Clock::time_point now_{};
};

/// What the dosage modal shows: the forms in modal order, then the "unknown" choice.
struct ModalOptions {
    MedListId med_list_id = 0;
    std::string med_name;
    std::vector<CommonFormEntry> forms;
    std::string unknown_option{cache::unknown_option};

    friend bool operator==(const ModalOptions&, const ModalOptions&) = default;
};

/// Backing-store round trips for a cold-cache session entering n distinct medications.
constexpr std::uint64_t trips_for_session(std::uint64_t n) noexcept { return n == 0 ? 0 : 2 + (n - 1); }

class CacheState {
public:
    explicit CacheState(Clock::duration ttl = default_ttl, ClockFn clock = [] { return Clock::now(); })
        : ttl_(ttl), clock_(std::move(clock)) {}

    CacheState(const CacheState&) = delete;
    CacheState& operator=(const CacheState&) = delete;

    /// The cached search index, rebuilt from the terminology when absent or expired.
    std::shared_ptr<const search::SearchIndex> search_index(const CompiledTerminology& terminology) {
        std::lock_guard lock(mu_);
        auto now = clock_();
        if (!index_ || expired(index_fetched_at_, now)) {
            index_ = std::make_shared<const search::SearchIndex>(search::build_index(terminology));
            index_fetched_at_ = now;
            ++trips_;
        }
        return index_;
    }

    std::vector<search::Suggestion> suggest(const CompiledTerminology& terminology, std::string_view query,
                                            std::size_t limit = search::default_suggest_limit) {
        return search_index(terminology)->suggest(query, limit);
    }

    /// Throws UnknownMedication.
    ModalOptions common_forms_for(const CompiledTerminology& terminology, MedListId id) {
        return medication(terminology, id)->modal;
    }

    /// Distinct units ascending with "Other Units" appended. Throws UnknownMedication.
    std::vector<std::string> dose_units_for(const CompiledTerminology& terminology, MedListId id) {
        return medication(terminology, id)->units;
    }

    std::uint64_t trip_counter() const {
        std::lock_guard lock(mu_);
        return trips_;
    }

    Clock::duration ttl() const noexcept { return ttl_; }

    /// Drops every cached entry; the trip counter is kept.
    void clear() {
        std::lock_guard lock(mu_);
        index_.reset();
        meds_.clear();
    }

private:
    struct MedicationData {
        ModalOptions modal;
        std::vector<std::string> units;
    };

    struct Slot {
        std::shared_ptr<const MedicationData> data;
        Clock::time_point fetched_at;
    };

    bool expired(Clock::time_point fetched_at, Clock::time_point now) const noexcept { return now - fetched_at > ttl_; }

    std::shared_ptr<const MedicationData> medication(const CompiledTerminology& terminology, MedListId id) {
        std::lock_guard lock(mu_);
        auto now = clock_();
        if (auto it = meds_.find(id); it != meds_.end() && !expired(it->second.fetched_at, now)) return it->second.data;

        const auto* med = terminology.find(id);
        if (!med) throw UnknownMedication(id);
        auto data = std::make_shared<MedicationData>();
        data->modal.med_list_id = id;
        data->modal.med_name = med->med_name;
        auto forms = terminology.forms_of(id);
        data->modal.forms.assign(forms.begin(), forms.end());
        for (const auto& u : terminology.units_of(id)) data->units.push_back(u.dose_units);
        data->units.emplace_back(other_units);
        ++trips_;
        meds_[id] = Slot{data, now};
        return data;
    }

    Clock::duration ttl_;
    ClockFn clock_;
    mutable std::mutex mu_;
    std::shared_ptr<const search::SearchIndex> index_;
    Clock::time_point index_fetched_at_{};
    std::map<MedListId, Slot> meds_;
    std::uint64_t trips_ = 0;
};

}  // namespace medlist::cache
