#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sheetaudit/areas.hpp"
#include "sheetaudit/equivalence.hpp"
#include "sheetaudit/errors.hpp"
#include "sheetaudit/fixture.hpp"
#include "sheetaudit/graph.hpp"
#include "sheetaudit/report.hpp"
#include "sheetaudit/service.hpp"
#include "sheetaudit/workbook.hpp"

namespace fs = std::filesystem;
using namespace sheetaudit;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitError = 2;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + path.string());
    out << text;
}

Level level_from(const std::string& text) {
    auto level = parse_level(text);
    if (!level) throw UsageError("unknown level '" + text + "'");
    return *level;
}

struct AuditOptions {
    std::vector<std::string> inputs;
    std::string level = "copy";
    int min_flank = 2;
    int max_gap = 1;
    std::string format = "text";
    std::string findings_log;
    std::string report;
    std::string hierarchy;
    std::string areas;
    std::string bind = "127.0.0.1:8080";
    std::string out_dir = ".";

    DetectorConfig detector() const {
        DetectorConfig c;
        c.min_flank = min_flank;
        c.max_gap = max_gap;
        return c;
    }
};

std::vector<fs::path> paths(const std::vector<std::string>& inputs) { return {inputs.begin(), inputs.end()}; }

std::string areas_json(const ClassHierarchy& h, Level level) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& area : logical_areas(h, level)) {
        nlohmann::ordered_json j;
        j["class"] = area.class_id;
        j["sheet"] = area.sheet;
        j["regions"] = nlohmann::ordered_json::array();
        for (const auto& r : area.regions) j["regions"].push_back(r.to_a1());
        doc.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

int cmd_audit(const AuditOptions& o) {
    Level level = level_from(o.level);
    Workbook wb = load_workbook(paths(o.inputs));
    ClassHierarchy h = partition(wb);
    std::vector<Finding> findings = detect_all(h, wb, o.detector());

    FindingStore store;
    store.add(findings);
    AuditMetrics metrics = compute_metrics(wb, h);
    ErrorStatistics stats = compute_error_statistics(store.errors(), h, metrics);
    std::string report = emit_report(metrics, stats, store.findings(), o.format);

    if (o.report.empty()) {
        std::cout << report;
    } else {
        write_file(o.report, report);
    }
    if (!o.hierarchy.empty()) write_file(o.hierarchy, h.to_json());
    if (!o.areas.empty()) write_file(o.areas, areas_json(h, level));
    if (!o.findings_log.empty()) write_file(o.findings_log, store.log_text());
    return findings.empty() ? kExitClean : kExitFindings;
}

int cmd_export_dot(const AuditOptions& o) {
    Level level = level_from(o.level);
    Workbook wb = load_workbook(paths(o.inputs));
    ClassHierarchy h = partition(wb);
    CellGraph cg = cell_graph(wb);
    AreaGraph ag = aggregate(cg, h, visible_at_level(h, level));
    fs::path dir(o.out_dir);
    write_file(dir / "cells.dot", export_dot(cg));
    write_file(dir / ("classes-" + std::string(to_string(level)) + ".dot"), export_dot(ag));
    return kExitClean;
}

int cmd_serve(const AuditOptions& o) {
    std::size_t colon = o.bind.rfind(':');
    if (colon == std::string::npos) throw UsageError("--bind expects host:port");
    std::string host = o.bind.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(o.bind.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("--bind expects host:port");
    }

    Workbook wb = load_workbook(paths(o.inputs));
    std::optional<fs::path> log;
    if (!o.findings_log.empty()) log = o.findings_log;
    AuditService service(std::move(wb), o.detector(), log);
    HttpServer server(service);
    if (!server.bind(host, port)) {
        std::cerr << "sheetaudit: cannot bind " << o.bind << "\n";
        return kExitError;
    }
    std::cerr << "listening on " << host << ":" << server.port() << std::endl;

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::thread watcher([&server] {
        while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.stop();
    });
    server.listen();
    g_interrupted = true;
    watcher.join();
    return kExitClean;
}

int cmd_tables(const std::string& counts, const std::string& format) {
    InjectedStudy study = inject_counts(read_file(counts));
    std::cout << emit_report(study.metrics, study.errors, {}, format);
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spreadsheet auditing by formula equivalence classes"};
    app.require_subcommand(1);

    AuditOptions o;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("inputs", o.inputs, "FGJ workbook (.json) or CSV sheets (.csv)")->required();
        cmd->add_option("--level", o.level, "copy, logical or structural")->capture_default_str();
    };
    auto add_detector = [&](CLI::App* cmd) {
        cmd->add_option("--min-flank", o.min_flank, "run cells required on each side of an interruption")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--max-gap", o.max_gap, "longest interruption considered")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--findings-log", o.findings_log, "JSON-lines findings log");
    };

    auto* audit = app.add_subcommand("audit", "analyze a workbook and report findings");
    add_common(audit);
    add_detector(audit);
    audit->add_option("--format", o.format, "text or json")->capture_default_str();
    audit->add_option("--report", o.report, "write the report here instead of stdout");
    audit->add_option("--hierarchy", o.hierarchy, "write the class hierarchy as JSON");
    audit->add_option("--areas", o.areas, "write logical areas at --level as JSON");

    auto* dot = app.add_subcommand("export-dot", "write cell-level and class-level DOT graphs");
    add_common(dot);
    dot->add_option("-o,--out-dir", o.out_dir, "output directory")->capture_default_str();

    FixtureOptions fx;
    std::string kind = "regular";
    std::string fixture_out;
    auto* fixture = app.add_subcommand("fixture", "generate a workbook with seeded anomalies");
    fixture->add_option("--kind", kind, "regular, interrupted, copied-too-far, empty-ref or mixed")
        ->capture_default_str();
    fixture->add_option("--seed", fx.seed)->capture_default_str();
    fixture->add_option("--rows", fx.rows)->check(CLI::PositiveNumber)->capture_default_str();
    fixture->add_option("--cols", fx.cols)->check(CLI::Range(2, 1000))->capture_default_str();
    fixture->add_option("--anomalies", fx.anomalies)->check(CLI::NonNegativeNumber)->capture_default_str();
    fixture->add_option("-o,--out", fixture_out, "workbook path; the sidecar goes next to it as <stem>.truth.json")
        ->required();

    auto* serve = app.add_subcommand("serve", "serve the audit over HTTP");
    add_common(serve);
    add_detector(serve);
    serve->add_option("--bind", o.bind, "host:port")->capture_default_str();

    std::string counts;
    std::string tables_format = "text";
    auto* tables = app.add_subcommand("tables", "render the report tables from raw counts");
    tables->add_option("counts", counts, "counts JSON")->required()->check(CLI::ExistingFile);
    tables->add_option("--format", tables_format, "text or json")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitClean : kExitError;
    }

    try {
        if (*audit) return cmd_audit(o);
        if (*dot) return cmd_export_dot(o);
        if (*serve) return cmd_serve(o);
        if (*tables) return cmd_tables(counts, tables_format);
        if (*fixture) {
            auto k = parse_fixture_kind(kind);
            if (!k) throw UsageError("unknown fixture kind '" + kind + "'");
            fx.kind = *k;
            Fixture f = generate_fixture(fx);
            fs::path out(fixture_out);
            write_file(out, to_fgj(f.workbook));
            write_file(fs::path(out).replace_extension(".truth.json"), f.truth_json());
            return kExitClean;
        }
    } catch (const LoadError& e) {
        std::cerr << "sheetaudit: " << e.what();
        if (!e.sheet().empty() || !e.cell().empty()) std::cerr << " (" << e.sheet() << "!" << e.cell() << ")";
        std::cerr << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "sheetaudit: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
