#pragma once

#include <filesystem>
#include <memory>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "sheetaudit/areas.hpp"
#include "sheetaudit/equivalence.hpp"
#include "sheetaudit/graph.hpp"
#include "sheetaudit/report.hpp"
#include "sheetaudit/workbook.hpp"

namespace sheetaudit {

struct Response {
    int status = 200;
    std::string body;  // JSON
};

/// Transport-independent audit service. Reads run concurrently against the
/// immutable analysis; verdicts are serialized and appended to the findings log.
///
///   GET  /workbook[?sheet=S[&range=A1:D20]]
///   GET  /hierarchy
///   GET  /class/{id}
///   GET  /graph?visible=id,id,...   (or ?level=copy|logical|structural)
///   GET  /findings
///   GET  /statistics
///   POST /findings/{id}/verdict     {"action": "confirm"|"dismiss", "impact": ..., "note": ...}
///
/// Errors: {"error": code, "message": ..., "cell"?: ...} with 400, 404 or 409.
class AuditService {
public:
    /// Runs the analysis. With a log path, an existing non-empty log is
    /// replayed instead of re-detecting; otherwise detection results are
    /// written to it.
    AuditService(Workbook workbook, DetectorConfig config, std::optional<std::filesystem::path> log_path = {});

    Response handle(std::string_view method, std::string_view path,
                    const std::map<std::string, std::string>& query, std::string_view body);

    const Workbook& workbook() const { return workbook_; }
    const ClassHierarchy& hierarchy() const { return hierarchy_; }

private:
    Response get_workbook(const std::map<std::string, std::string>& query) const;
    Response get_class(std::string_view id) const;
    Response get_graph(const std::map<std::string, std::string>& query) const;
    Response get_findings() const;
    Response get_statistics() const;
    Response post_verdict(std::string_view id, std::string_view body);

    Workbook workbook_;
    ClassHierarchy hierarchy_;
    CellGraph cells_;
    AuditMetrics metrics_;
    FindingStore store_;
    std::optional<std::filesystem::path> log_path_;
    mutable std::shared_mutex mutex_;
};

/// HTTP front end over an AuditService.
class HttpServer {
public:
    explicit HttpServer(AuditService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free port. Returns false on failure.
    bool bind(const std::string& host, int port);
    int port() const { return port_; }

    /// Serves until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace sheetaudit
