#pragma once

// Append-only medication-history journal: one JSON record per line.
//
//   {"record_id": "1", "recorded_at": "2026-01-31T12:00:00Z",
//    "mapping": {"level": "FULL_FORM", "rxcui": "...", "rxaui": "..."},
//    "entry": {...MedicationHistoryEntry...}}
//
// Lines are only ever appended and each append is fsync'ed. A truncated final
// line (a crash mid-append) is skipped on load; any other unreadable line is
// an error.

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "medlist/capture.hpp"
#include "medlist/errors.hpp"
#include "medlist/json.hpp"

namespace medlist::journal {

struct StoredEntryRecord {
    std::string record_id;
    std::string recorded_at;
    capture::Mapping mapping;
    capture::MedicationHistoryEntry entry;

    friend bool operator==(const StoredEntryRecord&, const StoredEntryRecord&) = default;
};

inline Json to_json(const StoredEntryRecord& r) {
    return Json{{"record_id", r.record_id},
                {"recorded_at", r.recorded_at},
                {"mapping", capture::to_json(r.mapping)},
                {"entry", capture::to_json(r.entry)}};
}

inline StoredEntryRecord record_from_json(const Json& j) {
    return {j.at("record_id").get<std::string>(), j.at("recorded_at").get<std::string>(),
            capture::mapping_from_json(j.at("mapping")), capture::entry_from_json(j.at("entry"))};
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
    auto secs = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Journal {
public:
    /// Opens (creating if needed) and replays the journal at `path`.
    explicit Journal(std::filesystem::path path) : path_(std::move(path)) {
        bool needs_newline = load();
        fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) throw IoError("cannot open journal " + path_.string() + ": " + std::strerror(errno));
        if (needs_newline) write_all("\n");
    }

    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    ~Journal() {
        if (fd_ >= 0) ::close(fd_);
    }

    /// Durably appends one record and returns it with its assigned id.
    StoredEntryRecord append(capture::MedicationHistoryEntry entry, capture::Mapping mapping) {
        std::lock_guard lock(mu_);
        StoredEntryRecord r{std::to_string(records_.size() + 1), utc_timestamp(), std::move(mapping), std::move(entry)};
        write_all(to_json(r).dump() + "\n");
        if (::fsync(fd_) != 0) throw IoError("fsync failed on " + path_.string() + ": " + std::strerror(errno));
        index(r);
        return r;
    }

    std::vector<StoredEntryRecord> for_patient(const std::string& patient_ref) const {
        std::lock_guard lock(mu_);
        std::vector<StoredEntryRecord> out;
        if (auto it = by_patient_.find(patient_ref); it != by_patient_.end())
            for (auto i : it->second) out.push_back(records_[i]);
        return out;
    }

    std::vector<StoredEntryRecord> all() const {
        std::lock_guard lock(mu_);
        return records_;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return records_.size();
    }

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    // Returns true when the file ends without a newline and the next append must start a new line.
    bool load() {
        std::ifstream in(path_, std::ios::binary);
        if (!in) return false;
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::size_t start = 0;
        std::size_t line_no = 0;
        while (start < content.size()) {
            auto end = content.find('\n', start);
            bool last = end == std::string::npos;
            std::string line = content.substr(start, last ? std::string::npos : end - start);
            ++line_no;
            auto line_start = start;
            start = last ? content.size() : end + 1;
            if (line.empty()) continue;
            try {
                index(record_from_json(Json::parse(line)));
            } catch (const nlohmann::json::exception& e) {
                if (last) {
                    // Torn tail write: drop it so later appends stay line-aligned.
                    std::error_code ec;
                    std::filesystem::resize_file(path_, line_start, ec);
                    if (ec) throw IoError("cannot truncate journal " + path_.string() + ": " + ec.message());
                    return false;
                }
                throw DataError(path_.string() + ":" + std::to_string(line_no) + ": unreadable journal record: " +
                                e.what());
            }
        }
        return !content.empty() && content.back() != '\n';
    }

    void index(StoredEntryRecord r) {
        by_patient_[r.entry.patient_ref].push_back(records_.size());
        records_.push_back(std::move(r));
    }

    void write_all(const std::string& data) {
        const char* p = data.data();
        std::size_t left = data.size();
        while (left > 0) {
            auto n = ::write(fd_, p, left);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw IoError("write failed on " + path_.string() + ": " + std::strerror(errno));
            }
            p += n;
            left -= static_cast<std::size_t>(n);
        }
    }

    std::filesystem::path path_;
    int fd_ = -1;
    mutable std::mutex mu_;
    std::vector<StoredEntryRecord> records_;
    std::map<std::string, std::vector<std::size_t>> by_patient_;
};

}  // namespace medlist::journal
