// medlist: compile RxNorm release files, serve the capture API, evaluate, search.
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <pthread.h>
#include <signal.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "medlist/medlist.hpp"

namespace fs = std::filesystem;
using namespace medlist;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;

struct CompileArgs {
    std::string conso, rel, sat, dialect, deny_list, out, version_tag;
};

struct ServeArgs {
    std::string data, journal, host = "0.0.0.0";
    int port = service::default_port;
};

struct EvaluateArgs {
    std::string data, legacy, entries, out;
};

struct SuggestArgs {
    std::string data, query;
};

int default_port() {
    if (const char* env = std::getenv("MEDLIST_PORT")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring invalid MEDLIST_PORT '" << env << "'\n";
        }
    }
    return service::default_port;
}

template <class Row>
std::vector<Row> parse_file(const std::string& path, rrf::SourceDialect dialect, const char* label,
                            std::size_t& malformed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(std::string("cannot open ") + label + " file " + path);
    auto result = rrf::parse_rows<Row>(in, dialect);
    malformed += result.report.malformed.size();
    std::size_t shown = 0;
    for (const auto& m : result.report.malformed) {
        if (shown++ == 5) {
            std::cerr << "  ... " << result.report.malformed.size() - 5 << " more\n";
            break;
        }
        std::cerr << path << ":" << m.line_number << ": " << m.reason << "\n";
    }
    return std::move(result.rows);
}

int cmd_compile(const CompileArgs& a) {
    auto dialect = rrf::parse_dialect(a.dialect);
    if (!dialect) {
        std::cerr << "error: --dialect must be UMLS or RXNORM\n";
        return exit_usage;
    }
    try {
        std::size_t malformed = 0;
        auto concepts = parse_file<rrf::ConceptRow>(a.conso, *dialect, "concepts", malformed);
        auto rels = parse_file<rrf::RelationshipRow>(a.rel, *dialect, "relationships", malformed);
        auto attrs = parse_file<rrf::AttributeRow>(a.sat, *dialect, "attributes", malformed);

        compiler::DenyList deny;
        if (!a.deny_list.empty()) {
            std::ifstream in(a.deny_list);
            if (!in) throw IoError("cannot open deny list " + a.deny_list);
            deny = compiler::DenyList::parse(in);
        }
        compiler::CompileOptions options;
        options.version_tag = a.version_tag;
        options.require_common_forms = true;

        std::cout << "concepts=" << concepts.size() << "\nrelationships=" << rels.size() << "\nattributes=" << attrs.size()
                  << "\nmalformed_lines=" << malformed << "\n";
        auto [terminology, report] = compiler::compile(concepts, rels, attrs, deny, options);
        table_io::write_tables(terminology, a.out);

        const auto& s = report.suppressed;
        std::cout << "suppressed_other_source=" << s.other_source << "\nsuppressed_brand_of=" << s.brand_of
                  << "\nsuppressed_flag=" << s.suppress_flag << "\nsuppressed_deny_list=" << s.deny_listed
                  << "\nstrength_missing=" << report.strength_missing
                  << "\nstrength_unparseable=" << report.strength_unparseable
                  << "\nstrength_conflicting=" << report.strength_conflicting
                  << "\nunlinked_forms=" << report.unlinked_forms << "\ntradenames_mapped=" << report.tradenames_mapped
                  << "\nmed_list=" << report.med_names << "\nmed_list_common=" << report.common_forms
                  << "\nmed_list_dose=" << report.dose_units << "\n";
        for (const auto& v : report.unparseable_values) std::cerr << "unparseable strength: '" << v << "'\n";
        return exit_ok;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    }
}

int cmd_serve(const ServeArgs& a) {
    std::unique_ptr<service::MedicationService> svc;
    try {
        service::ApiConfig config;
        config.data_dir = a.data;
        config.listen_port = a.port;
        if (!a.journal.empty()) config.journal_path = a.journal;
        svc = service::MedicationService::open(std::move(config));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    }

    // Route SIGINT/SIGTERM to a waiter thread so the server can shut down cleanly.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    service::HttpServer server(*svc, &std::cerr);
    if (!server.bind(a.host, a.port)) {
        std::cerr << "error: cannot bind " << a.host << ":" << a.port << " (port already in use?)\n";
        return exit_data;
    }
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    std::cout << "listening on http://" << a.host << ":" << a.port << " (" << svc->terminology().med_list().size()
              << " medications)" << std::endl;
    server.listen();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return exit_ok;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto t = text::trim(line);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

// Each line is either a journal record or a bare entry object.
std::vector<capture::MedicationHistoryEntry> read_entries(const std::string& path) {
    std::vector<capture::MedicationHistoryEntry> out;
    std::size_t n = 0;
    for (const auto& line : read_lines(path)) {
        ++n;
        try {
            auto j = Json::parse(line);
            out.push_back(capture::entry_from_json(j.contains("entry") ? j.at("entry") : j));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ": record " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

// Suggest latency over prefix and infix queries drawn from the medication names.
std::vector<double> measure_latency(const search::SearchIndex& index) {
    std::vector<std::string> queries;
    auto entries = index.entries();
    std::size_t stride = entries.size() > 2000 ? entries.size() / 2000 : 1;
    for (std::size_t i = 0; i < entries.size(); i += stride) {
        const auto& name = entries[i].folded;
        for (std::size_t len = 2; len <= 4 && len <= name.size(); ++len) queries.push_back(name.substr(0, len));
        if (name.size() >= 5) queries.push_back(name.substr(name.size() / 2 - 1, 3));
    }
    std::vector<double> samples;
    samples.reserve(queries.size());
    for (const auto& q : queries) {
        auto t0 = std::chrono::steady_clock::now();
        auto r = index.suggest(q);
        auto t1 = std::chrono::steady_clock::now();
        if (r.size() > search::default_suggest_limit) std::abort();
        samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return samples;
}

int cmd_evaluate(const EvaluateArgs& a) {
    try {
        auto terminology = table_io::read_tables(a.data);
        auto legacy = read_lines(a.legacy);
        std::vector<capture::MedicationHistoryEntry> entries;
        if (!a.entries.empty()) entries = read_entries(a.entries);
        auto latency = measure_latency(search::build_index(terminology));

        auto report = eval::build_report(terminology, entries, legacy, latency);
        fs::create_directories(a.out);
        {
            std::ofstream out(fs::path(a.out) / "report.txt");
            out << eval::to_text(report);
            if (!out) throw IoError("cannot write report.txt");
        }
        {
            std::ofstream out(fs::path(a.out) / "report.json");
            out << eval::to_json(report).dump(2) << "\n";
            if (!out) throw IoError("cannot write report.json");
        }
        std::cout << "coverage: " << eval::percent(report.coverage.rate) << " (" << report.coverage.matched << "/"
                  << report.coverage.total << ")\n";
        std::cout << "integrity: " << eval::percent(report.integrity.round_trip_rate) << "\n";
        std::cout << "report: " << (fs::path(a.out) / "report.txt").string() << "\n";
        return exit_ok;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    }
}

int cmd_suggest(const SuggestArgs& a) {
    try {
        auto terminology = table_io::read_tables(a.data);
        auto index = search::build_index(terminology);
        auto t0 = std::chrono::steady_clock::now();
        auto results = index.suggest(a.query);
        auto t1 = std::chrono::steady_clock::now();
        for (const auto& s : results) std::cout << s.med_name << "\n";
        std::cerr << "elapsed_us=" << std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() << "\n";
        return exit_ok;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Medication terminology compiler and capture service"};
    app.require_subcommand(1);

    CompileArgs compile_args;
    auto* compile = app.add_subcommand("compile", "Compile RRF release files into the three production tables");
    compile->add_option("--conso", compile_args.conso, "Concepts file (MRCONSO.RRF / RXNCONSO.RRF)")->required()->check(CLI::ExistingFile);
    compile->add_option("--rel", compile_args.rel, "Relationships file (MRREL.RRF / RXNREL.RRF)")->required()->check(CLI::ExistingFile);
    compile->add_option("--sat", compile_args.sat, "Attributes file (MRSAT.RRF / RXNSAT.RRF)")->required()->check(CLI::ExistingFile);
    compile->add_option("--dialect", compile_args.dialect, "UMLS or RXNORM")->required();
    compile->add_option("--deny-list", compile_args.deny_list, "Name patterns to suppress, one per line")->check(CLI::ExistingFile);
    compile->add_option("--out", compile_args.out, "Output directory")->required();
    compile->add_option("--version-tag", compile_args.version_tag, "Release label recorded in the manifest");

    ServeArgs serve_args;
    serve_args.port = default_port();
    auto* serve = app.add_subcommand("serve", "Serve the HTTP/JSON API");
    serve->add_option("--data", serve_args.data, "Compiled data directory")->required();
    serve->add_option("--port", serve_args.port, "TCP port (default $MEDLIST_PORT or 8080)")->check(CLI::Range(1, 65535));
    serve->add_option("--host", serve_args.host, "Bind address");
    serve->add_option("--journal", serve_args.journal, "History journal (default <data>/medication_history.jsonl)");

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "Write the four-factor evaluation report");
    evaluate->add_option("--data", eval_args.data, "Compiled data directory")->required();
    evaluate->add_option("--legacy", eval_args.legacy, "Legacy medication names, one per line")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--entries", eval_args.entries, "Captured entries (journal or JSON lines)")->check(CLI::ExistingFile);
    evaluate->add_option("--out", eval_args.out, "Report directory")->required();

    SuggestArgs suggest_args;
    auto* suggest = app.add_subcommand("suggest", "Print auto-complete suggestions for a query");
    suggest->add_option("--data", suggest_args.data, "Compiled data directory")->required();
    suggest->add_option("query", suggest_args.query, "Search text")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (*compile) return cmd_compile(compile_args);
    if (*serve) return cmd_serve(serve_args);
    if (*evaluate) return cmd_evaluate(eval_args);
    return cmd_suggest(suggest_args);
}
