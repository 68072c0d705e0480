#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "sheetaudit/errors.hpp"
#include "sheetaudit/service.hpp"

namespace sheetaudit {

namespace {

using ojson = nlohmann::ordered_json;

Response json_response(int status, const ojson& body) { return {status, body.dump(2) + "\n"}; }

Response error_response(int status, std::string_view code, std::string_view message, std::string_view cell = {}) {
    ojson j;
    j["error"] = code;
    j["message"] = message;
    if (!cell.empty()) j["cell"] = cell;
    return json_response(status, j);
}

ojson finding_json(const Finding& f) {
    ojson j;
    j["id"] = f.id;
    j["category"] = to_string(f.category);
    j["location"] = f.location.to_a1();
    j["class_ids"] = f.class_ids;
    j["run"] = f.run;
    j["description"] = f.description;
    j["status"] = to_string(f.status);
    return j;
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '/') {
            ++i;
            continue;
        }
        std::size_t j = path.find('/', i);
        if (j == std::string_view::npos) j = path.size();
        parts.emplace_back(path.substr(i, j - i));
        i = j;
    }
    return parts;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i <= text.size()) {
        std::size_t j = text.find(',', i);
        if (j == std::string_view::npos) j = text.size();
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j + 1;
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text, bool append) {
    std::ofstream out(path, append ? std::ios::app | std::ios::binary : std::ios::trunc | std::ios::binary);
    if (!out) throw LoadError("cannot write findings log " + path.string());
    out << text;
}

}  // namespace

AuditService::AuditService(Workbook workbook, DetectorConfig config, std::optional<std::filesystem::path> log_path)
    : workbook_(std::move(workbook)),
      hierarchy_(partition(workbook_)),
      cells_(cell_graph(workbook_)),
      metrics_(compute_metrics(workbook_, hierarchy_)),
      log_path_(std::move(log_path)) {
    if (log_path_ && std::filesystem::exists(*log_path_) && std::filesystem::file_size(*log_path_) > 0) {
        std::ifstream in(*log_path_, std::ios::binary);
        std::stringstream text;
        text << in.rdbuf();
        store_ = FindingStore::replay(text.str());
        return;
    }
    store_.add(detect_all(hierarchy_, workbook_, config));
    if (log_path_) write_file(*log_path_, store_.log_text(), false);
}

Response AuditService::handle(std::string_view method, std::string_view path,
                              const std::map<std::string, std::string>& query, std::string_view body) {
    const auto parts = split_path(path);
    try {
        if (method == "GET") {
            std::shared_lock lock(mutex_);
            if (parts.size() == 1 && parts[0] == "workbook") return get_workbook(query);
            if (parts.size() == 1 && parts[0] == "hierarchy") return {200, hierarchy_.to_json()};
            if (parts.size() == 2 && parts[0] == "class") return get_class(parts[1]);
            if (parts.size() == 1 && parts[0] == "graph") return get_graph(query);
            if (parts.size() == 1 && parts[0] == "findings") return get_findings();
            if (parts.size() == 1 && parts[0] == "statistics") return get_statistics();
        } else if (method == "POST") {
            if (parts.size() == 3 && parts[0] == "findings" && parts[2] == "verdict") {
                std::unique_lock lock(mutex_);
                return post_verdict(parts[1], body);
            }
        } else {
            return error_response(405, "method_not_allowed", "unsupported method " + std::string(method));
        }
        return error_response(404, "not_found", "no route for " + std::string(method) + " " + std::string(path));
    } catch (const NotFoundError& e) {
        return error_response(404, "not_found", e.what());
    } catch (const StateError& e) {
        return error_response(409, "state", e.what());
    } catch (const ContractError& e) {
        return error_response(400, "contract", e.what(), e.cell());
    } catch (const AuditError& e) {
        return error_response(400, "bad_request", e.what());
    } catch (const std::invalid_argument& e) {
        return error_response(400, "bad_request", e.what());
    }
}

Response AuditService::get_workbook(const std::map<std::string, std::string>& query) const {
    auto sheet_it = query.find("sheet");
    if (sheet_it == query.end()) {
        ojson j;
        j["workbook"] = workbook_.name();
        j["sheets"] = ojson::array();
        for (const auto& s : workbook_.sheets()) {
            ojson sj;
            sj["name"] = s.name();
            const BoundingBox& b = s.bounds();
            sj["bounds"] = b.empty() ? ojson(nullptr)
                                     : ojson(Rect{b.min_row, b.min_col, b.max_row, b.max_col}.to_a1());
            sj["occupied"] = s.cells().size();
            sj["formulas"] = s.formula_count();
            j["sheets"].push_back(std::move(sj));
        }
        return json_response(200, j);
    }

    const Sheet* sheet = workbook_.find_sheet(sheet_it->second);
    if (!sheet) throw NotFoundError("no sheet named '" + sheet_it->second + "'");
    Rect area;
    if (auto r = query.find("range"); r != query.end()) {
        const std::string& text = r->second;
        std::size_t colon = text.find(':');
        CellAddress a = CellAddress::parse(text.substr(0, colon), sheet->name());
        CellAddress b = colon == std::string::npos ? a : CellAddress::parse(text.substr(colon + 1), sheet->name());
        area = {std::min(a.row, b.row), std::min(a.column, b.column), std::max(a.row, b.row),
                std::max(a.column, b.column)};
    } else {
        const BoundingBox& b = sheet->bounds();
        area = b.empty() ? Rect{1, 1, 1, 1} : Rect{b.min_row, b.min_col, b.max_row, b.max_col};
    }

    std::map<CellAddress, std::vector<std::string>> findings_at;
    for (const auto& f : store_.findings()) findings_at[f.location].push_back(f.id);

    ojson j;
    j["sheet"] = sheet->name();
    j["range"] = area.to_a1();
    j["cells"] = ojson::array();
    for (auto it = sheet->cells().lower_bound({area.row0, area.col0});
         it != sheet->cells().end() && it->first.row <= area.row1; ++it) {
        const auto& [pos, content] = *it;
        if (pos.col < area.col0 || pos.col > area.col1) continue;
        CellAddress addr{sheet->name(), pos.col, pos.row};
        ojson cj;
        cj["addr"] = addr.to_a1(false);
        cj["kind"] = to_string(content.kind);
        cj["raw"] = content.raw;
        if (auto lineage = hierarchy_.lineage(addr)) {
            cj["classes"] = {{"copy", (*lineage)[0]}, {"logical", (*lineage)[1]}, {"structural", (*lineage)[2]}};
        }
        if (auto f = findings_at.find(addr); f != findings_at.end()) cj["findings"] = f->second;
        j["cells"].push_back(std::move(cj));
    }
    return json_response(200, j);
}

Response AuditService::get_class(std::string_view id) const {
    const EquivalenceClass* cls = hierarchy_.find(id);
    if (!cls) throw NotFoundError("no class with id '" + std::string(id) + "'");
    ojson j;
    j["id"] = cls->id;
    j["level"] = to_string(cls->level);
    j["fingerprint"] = cls->fingerprint.key;
    j["parent"] = cls->parent ? ojson(*cls->parent) : ojson(nullptr);
    j["children"] = cls->children;
    j["representative"] = cls->representative().to_a1();
    j["formula"] = workbook_.content(cls->representative()).raw;
    j["members"] = ojson::array();
    for (const auto& m : cls->members) j["members"].push_back(m.to_a1());
    j["areas"] = ojson::array();
    for (const auto& area : logical_areas(hierarchy_, cls->level)) {
        if (area.class_id != cls->id) continue;
        ojson aj;
        aj["sheet"] = area.sheet;
        aj["regions"] = ojson::array();
        for (const auto& r : area.regions) aj["regions"].push_back(r.to_a1());
        j["areas"].push_back(std::move(aj));
    }
    return json_response(200, j);
}

Response AuditService::get_graph(const std::map<std::string, std::string>& query) const {
    std::vector<std::string> visible;
    if (auto v = query.find("visible"); v != query.end()) {
        visible = split_list(v->second);
    } else if (auto l = query.find("level"); l != query.end()) {
        auto level = parse_level(l->second);
        if (!level) throw UsageError("unknown level '" + l->second + "'");
        visible = visible_at_level(hierarchy_, *level);
    } else {
        throw UsageError("graph needs a visible or level parameter");
    }
    return {200, to_json(aggregate(cells_, hierarchy_, visible))};
}

Response AuditService::get_findings() const {
    ojson j;
    j["findings"] = ojson::array();
    for (const auto& f : store_.findings()) j["findings"].push_back(finding_json(f));
    return json_response(200, j);
}

Response AuditService::get_statistics() const {
    ErrorStatistics stats = compute_error_statistics(store_.errors(), hierarchy_, metrics_);
    ojson report = ojson::parse(emit_report(metrics_, stats, {}, "json"));
    ojson j;
    j["metrics"] = report["metrics"];
    j["sheets"] = report["sheets"];
    j["error_statistics"] = report["error_statistics"];
    return json_response(200, j);
}

Response AuditService::post_verdict(std::string_view id, std::string_view body) {
    ojson req;
    try {
        req = ojson::parse(body);
    } catch (const nlohmann::json::exception&) {
        throw UsageError("verdict body is not valid JSON");
    }
    if (!req.is_object() || !req.contains("action") || !req["action"].is_string())
        throw UsageError("verdict needs an \"action\" of confirm or dismiss");
    const std::string action = req["action"].get<std::string>();
    std::string note;
    if (req.contains("note")) {
        if (!req["note"].is_string()) throw UsageError("\"note\" must be a string");
        note = req["note"].get<std::string>();
    }

    Verdict verdict;
    if (action == "confirm") {
        if (!req.contains("impact") || !req["impact"].is_string())
            throw UsageError("confirm needs an \"impact\" of qualitative or quantitative");
        auto impact = parse_impact(req["impact"].get<std::string>());
        if (!impact) throw UsageError("unknown impact '" + req["impact"].get<std::string>() + "'");
        verdict = Verdict::confirm(*impact, note);
    } else if (action == "dismiss") {
        verdict = Verdict::dismiss(note);
    } else {
        throw UsageError("unknown action '" + action + "'");
    }

    const Finding& f = store_.record_verdict(id, verdict);
    if (log_path_) write_file(*log_path_, store_.log().back() + "\n", true);
    return json_response(200, finding_json(f));
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(AuditService& service) : impl_(std::make_unique<Impl>()) {
    auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        Response r = service.handle(req.method, req.path, query, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    impl_->server.Get(R"(/.*)", dispatch);
    impl_->server.Post(R"(/.*)", dispatch);
}

HttpServer::~HttpServer() = default;

bool HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        return port_ > 0;
    }
    if (!impl_->server.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace sheetaudit
