#pragma once

// HTTP/JSON front end over the compiled tables.
//
//   GET  /medications?q=                         [{med_list_id, med_name}]
//   GET  /medications/{id}/common-forms          {med_list_id, med_name, forms: [...], unknown_option}
//   GET  /medications/{id}/dose-units            ["MG", ..., "Other Units"]
//   GET  /frequencies                            [{code, display}]
//   POST /patients/{ref}/medication-history      201 {record_id, mapping}
//   GET  /patients/{ref}/medication-history      [StoredEntryRecord]
//
// MedicationService holds the handlers as plain functions returning a status
// and body; HttpServer binds them to cpp-httplib.

#include <charconv>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>

#include "medlist/cache.hpp"
#include "medlist/capture.hpp"
#include "medlist/journal.hpp"
#include "medlist/json.hpp"
#include "medlist/search.hpp"
#include "medlist/table_io.hpp"
#include "medlist/terminology.hpp"

namespace medlist::service {

inline constexpr int default_port = 8080;
inline constexpr std::string_view journal_file = "medication_history.jsonl";

struct ApiConfig {
    std::filesystem::path data_dir;
    int listen_port = default_port;
    cache::Clock::duration cache_ttl = cache::default_ttl;
    std::size_t suggest_limit = search::default_suggest_limit;
    /// Defaults to <data_dir>/medication_history.jsonl.
    std::filesystem::path journal_path;
    std::vector<capture::DoseFrequencyTerm> extra_frequencies;
};

// Wire encodings shared by the handlers and by anything comparing against them.

inline Json to_json(const search::Suggestion& s) { return Json{{"med_list_id", s.med_list_id}, {"med_name", s.med_name}}; }

inline Json to_json(std::span<const search::Suggestion> list) {
    auto out = Json::array();
    for (const auto& s : list) out.push_back(to_json(s));
    return out;
}

inline Json decimal_json(const Decimal& d) {
    if (d.is_integer()) return Json(d.mantissa());
    return Json(d.to_double());
}

inline Json to_json(const cache::ModalOptions& m) {
    auto forms = Json::array();
    for (const auto& f : m.forms)
        forms.push_back(Json{{"med_list_id", f.med_list_id},
                             {"med_name", m.med_name},
                             {"common_form", f.common_form},
                             {"dose_amt", decimal_json(f.dose_amt)},
                             {"dose_units", f.dose_units},
                             {"rxcui", f.rxcui},
                             {"rxaui", f.rxaui}});
    return Json{{"med_list_id", m.med_list_id},
                {"med_name", m.med_name},
                {"forms", std::move(forms)},
                {"unknown_option", m.unknown_option}};
}

inline Json to_json(std::span<const std::string> units) { return Json(std::vector<std::string>(units.begin(), units.end())); }

inline Json to_json(std::span<const capture::DoseFrequencyTerm> terms) {
    auto out = Json::array();
    for (const auto& t : terms) out.push_back(Json{{"code", t.code}, {"display", t.display}});
    return out;
}

struct Response {
    int status = 200;
    Json body;
};

inline Response error(int status, std::string message) { return {status, Json{{"error", std::move(message)}}}; }

class MedicationService {
public:
    MedicationService(std::shared_ptr<const CompiledTerminology> terminology, ApiConfig config,
                      cache::ClockFn clock = [] { return cache::Clock::now(); })
        : config_(std::move(config)),
          terminology_(std::move(terminology)),
          cache_(config_.cache_ttl, std::move(clock)),
          journal_(config_.journal_path.empty() ? config_.data_dir / journal_file : config_.journal_path),
          frequencies_(capture::frequency_vocabulary(config_.extra_frequencies)) {}

    /// Loads the compiled tables from config.data_dir. Throws DataError.
    static std::unique_ptr<MedicationService> open(ApiConfig config) {
        auto t = std::make_shared<const CompiledTerminology>(table_io::read_tables(config.data_dir));
        return std::make_unique<MedicationService>(std::move(t), std::move(config));
    }

    Response get_suggestions(const std::optional<std::string>& q) {
        if (!q) return error(400, "missing query parameter 'q'");
        auto results = cache_.suggest(*terminology_, *q, config_.suggest_limit);
        return {200, to_json(results)};
    }

    Response get_common_forms(std::string_view id_text) {
        return with_medication(id_text, [&](MedListId id) { return to_json(cache_.common_forms_for(*terminology_, id)); });
    }

    Response get_dose_units(std::string_view id_text) {
        return with_medication(id_text, [&](MedListId id) { return to_json(cache_.dose_units_for(*terminology_, id)); });
    }

    Response get_frequencies() const { return {200, to_json(frequencies_)}; }

    Response post_history_entry(std::string_view patient_ref, std::string_view body) {
        capture::MedicationHistoryEntry entry;
        try {
            entry = capture::entry_from_json(Json::parse(body));
        } catch (const nlohmann::json::exception& e) {
            return error(400, std::string("unparseable entry: ") + e.what());
        }
        entry.patient_ref = std::string(patient_ref);
        auto violations = capture::validate_entry(entry, frequencies_);
        if (!violations.empty()) {
            auto list = Json::array();
            for (const auto& v : violations) list.push_back(Json{{"field", v.field}, {"rule", v.rule}});
            return {422, Json{{"error", "validation failed"}, {"violations", std::move(list)}}};
        }
        auto mapping = capture::reconstruct_common_form(entry, *terminology_);
        auto record = journal_.append(std::move(entry), std::move(mapping));
        return {201, Json{{"record_id", record.record_id}, {"mapping", capture::to_json(record.mapping)}}};
    }

    Response list_history(std::string_view patient_ref) const {
        auto out = Json::array();
        for (const auto& r : journal_.for_patient(std::string(patient_ref))) out.push_back(journal::to_json(r));
        return {200, std::move(out)};
    }

    const CompiledTerminology& terminology() const noexcept { return *terminology_; }
    cache::CacheState& cache() noexcept { return cache_; }
    const journal::Journal& journal() const noexcept { return journal_; }
    std::span<const capture::DoseFrequencyTerm> frequencies() const noexcept { return frequencies_; }
    const ApiConfig& config() const noexcept { return config_; }

private:
    template <class Fn>
    Response with_medication(std::string_view id_text, Fn&& fn) {
        MedListId id = 0;
        auto [p, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
        if (ec != std::errc{} || p != id_text.data() + id_text.size())
            return error(404, "unknown medication '" + std::string(id_text) + "'");
        try {
            return {200, fn(id)};
        } catch (const UnknownMedication& e) {
            return error(404, e.what());
        }
    }

    ApiConfig config_;
    std::shared_ptr<const CompiledTerminology> terminology_;
    cache::CacheState cache_;
    journal::Journal journal_;
    std::vector<capture::DoseFrequencyTerm> frequencies_;
};

/// Binds MedicationService to an httplib server. Logs one line per request to `log` when set.
class HttpServer {
public:
    explicit HttpServer(MedicationService& service, std::ostream* log = nullptr) : service_(service) {
        // No SO_REUSEPORT: a second server on a busy port must fail to bind.
        server_.set_socket_options([](socket_t sock) {
            int yes = 1;
            ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
        });
        auto reply = [](httplib::Response& res, const Response& r) {
            res.status = r.status;
            res.set_content(r.body.dump(), "application/json; charset=utf-8");
        };
        server_.Get("/medications", [this, reply](const httplib::Request& req, httplib::Response& res) {
            std::optional<std::string> q;
            if (req.has_param("q")) q = req.get_param_value("q");
            reply(res, service_.get_suggestions(q));
        });
        server_.Get(R"(/medications/([^/]+)/common-forms)", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, service_.get_common_forms(req.matches[1].str()));
        });
        server_.Get(R"(/medications/([^/]+)/dose-units)", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, service_.get_dose_units(req.matches[1].str()));
        });
        server_.Get("/frequencies", [this, reply](const httplib::Request&, httplib::Response& res) {
            reply(res, service_.get_frequencies());
        });
        server_.Post(R"(/patients/([^/]+)/medication-history)",
                     [this, reply](const httplib::Request& req, httplib::Response& res) {
                         reply(res, service_.post_history_entry(req.matches[1].str(), req.body));
                     });
        server_.Get(R"(/patients/([^/]+)/medication-history)",
                    [this, reply](const httplib::Request& req, httplib::Response& res) {
                        reply(res, service_.list_history(req.matches[1].str()));
                    });
        server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty())
                res.set_content(Json{{"error", httplib::status_message(res.status)}}.dump(), "application/json; charset=utf-8");
        });
        server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            res.status = 500;
            res.set_content(Json{{"error", what}}.dump(), "application/json; charset=utf-8");
        });
        if (log) {
            server_.set_logger([log](const httplib::Request& req, const httplib::Response& res) {
                *log << req.method << ' ' << req.path << ' ' << res.status << '\n' << std::flush;
            });
        }
    }

    /// False when the address cannot be bound (e.g. port in use).
    bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }

    /// Binds an ephemeral port and returns it, or -1.
    int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }

    /// Blocks serving requests until stop().
    bool listen() { return server_.listen_after_bind(); }

    void stop() { server_.stop(); }
    void wait_until_ready() const { server_.wait_until_ready(); }

private:
    MedicationService& service_;
    httplib::Server server_;
};

}  // namespace medlist::service
