#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "sheetaudit/fixture.hpp"
#include "sheetaudit/service.hpp"

using namespace sheetaudit;
using nlohmann::json;

namespace {

Workbook six_cells() {
    Workbook wb("six");
    wb.add_sheet("Sheet1");
    for (auto [addr, text] : {std::pair{"A1", "1"}, {"A2", "2"}, {"B1", "=A1*2"}, {"B2", "=A2*2"}, {"B3", "=A2*3"},
                              {"C1", "=A1+B1"}}) {
        CellAddress a = CellAddress::parse(addr, "Sheet1");
        wb.sheet(0).set(a.pos(), make_content(text, a));
    }
    return wb;
}

Workbook interrupted() {
    FixtureOptions o;
    o.kind = FixtureKind::Interrupted;
    o.seed = 2;
    o.anomalies = 3;
    return generate_fixture(o).workbook;
}

json get(AuditService& s, std::string_view path, std::map<std::string, std::string> query = {}, int status = 200) {
    Response r = s.handle("GET", path, query, "");
    EXPECT_EQ(r.status, status) << path << ": " << r.body;
    return json::parse(r.body);
}

Response verdict(AuditService& s, const std::string& id, std::string_view body) {
    return s.handle("POST", "/findings/" + id + "/verdict", {}, body);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() /
                ("sheetaudit-svc-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace

TEST(Service, WorkbookSummaryAndWindow) {
    AuditService s(six_cells(), DetectorConfig{});
    json summary = get(s, "/workbook");
    EXPECT_EQ(summary["workbook"], "six");
    ASSERT_EQ(summary["sheets"].size(), 1u);
    EXPECT_EQ(summary["sheets"][0]["bounds"], "A1:C3");
    EXPECT_EQ(summary["sheets"][0]["occupied"], 6);
    EXPECT_EQ(summary["sheets"][0]["formulas"], 4);

    json window = get(s, "/workbook", {{"sheet", "Sheet1"}, {"range", "B1:B3"}});
    ASSERT_EQ(window["cells"].size(), 3u);
    EXPECT_EQ(window["cells"][0]["addr"], "B1");
    EXPECT_EQ(window["cells"][0]["classes"]["copy"], "C1");
    EXPECT_EQ(window["cells"][2]["classes"]["structural"], "S1");
    get(s, "/workbook", {{"sheet", "Nope"}}, 404);
    get(s, "/workbook", {{"sheet", "Sheet1"}, {"range", "??"}}, 400);
}

TEST(Service, HierarchyAndClass) {
    AuditService s(six_cells(), DetectorConfig{});
    json h = get(s, "/hierarchy");
    EXPECT_EQ(h["levels"]["copy"].size(), 3u);
    json c = get(s, "/class/C1");
    EXPECT_EQ(c["level"], "copy");
    EXPECT_EQ(c["parent"], "L1");
    EXPECT_EQ(c["members"], json::array({"Sheet1!B1", "Sheet1!B2"}));
    EXPECT_EQ(c["representative"], "Sheet1!B1");
    EXPECT_EQ(c["formula"], "=A1*2");
    ASSERT_EQ(c["areas"].size(), 1u);
    EXPECT_EQ(c["areas"][0]["regions"], json::array({"B1:B2"}));
    json err = get(s, "/class/C99", {}, 404);
    EXPECT_EQ(err["error"], "not_found");
}

TEST(Service, GraphMatchesDirectAggregation) {
    AuditService s(six_cells(), DetectorConfig{});
    const ClassHierarchy& h = s.hierarchy();
    CellGraph cg = cell_graph(s.workbook());
    for (Level level : {Level::Copy, Level::Logical, Level::Structural}) {
        Response r = s.handle("GET", "/graph", {{"level", std::string(to_string(level))}}, "");
        ASSERT_EQ(r.status, 200);
        EXPECT_EQ(r.body, to_json(aggregate(cg, h, visible_at_level(h, level))));
    }
    Response mixed = s.handle("GET", "/graph", {{"visible", "C1,C2,C3"}}, "");
    EXPECT_EQ(mixed.body, to_json(aggregate(cg, h, {"C1", "C2", "C3"})));

    json bad = get(s, "/graph", {{"visible", "C1,C2"}}, 400);
    EXPECT_EQ(bad["error"], "contract");
    EXPECT_EQ(bad["cell"], "Sheet1!B3");
    get(s, "/graph", {}, 400);
    get(s, "/graph", {{"level", "galactic"}}, 400);
}

TEST(Service, UnknownRoutesAndMethods) {
    AuditService s(six_cells(), DetectorConfig{});
    EXPECT_EQ(s.handle("GET", "/nothing", {}, "").status, 404);
    EXPECT_EQ(s.handle("DELETE", "/findings", {}, "").status, 405);
}

TEST(Service, VerdictFlowAndStatistics) {
    AuditService s(interrupted(), DetectorConfig{});
    json findings = get(s, "/findings")["findings"];
    ASSERT_EQ(findings.size(), 3u);
    const std::string id = findings[0]["id"];
    EXPECT_EQ(findings[0]["status"], "Open");

    Response ok = verdict(s, id, R"({"action":"confirm","impact":"quantitative","note":"typed over"})");
    ASSERT_EQ(ok.status, 200) << ok.body;
    EXPECT_EQ(json::parse(ok.body)["status"], "ConfirmedError");
    EXPECT_EQ(verdict(s, id, R"({"action":"dismiss"})").status, 409);
    EXPECT_EQ(verdict(s, "F999", R"({"action":"dismiss"})").status, 404);

    const std::string other = findings[1]["id"];
    for (const char* body : {"not json", "[]", R"({"action":"maybe"})", R"({"action":"confirm"})",
                             R"({"action":"confirm","impact":"huge"})", R"({"action":"dismiss","note":3})"}) {
        EXPECT_EQ(verdict(s, other, body).status, 400) << body;
    }
    EXPECT_EQ(get(s, "/findings")["findings"][1]["status"], "Open");

    json stats = get(s, "/statistics");
    EXPECT_EQ(stats["error_statistics"]["total"]["errors"], 1);
    EXPECT_EQ(stats["error_statistics"]["total"]["error_classes"], 1);
    EXPECT_TRUE(stats.contains("metrics"));
}

TEST(Service, LogIsWrittenAndReplayed) {
    TempDir dir;
    auto log = dir.path() / "findings.jsonl";
    std::string id;
    {
        AuditService s(interrupted(), DetectorConfig{}, log);
        id = get(s, "/findings")["findings"][0]["id"];
        ASSERT_EQ(verdict(s, id, R"({"action":"dismiss","note":"fine"})").status, 200);
    }
    std::string text = read_file(log);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);

    AuditService again(interrupted(), DetectorConfig{}, log);
    json findings = get(again, "/findings")["findings"];
    EXPECT_EQ(findings[0]["status"], "Dismissed");
    EXPECT_EQ(verdict(again, id, R"({"action":"dismiss"})").status, 409);
    EXPECT_EQ(read_file(log), text);
}

TEST(Service, ConcurrentReadsDuringVerdicts) {
    AuditService s(interrupted(), DetectorConfig{});
    json findings = get(s, "/findings")["findings"];
    std::vector<std::thread> readers;
    std::atomic<int> failures{0};
    for (int t = 0; t < 4; ++t) {
        readers.emplace_back([&] {
            for (int i = 0; i < 50; ++i) {
                if (s.handle("GET", "/statistics", {}, "").status != 200) ++failures;
                if (s.handle("GET", "/findings", {}, "").status != 200) ++failures;
            }
        });
    }
    for (const auto& f : findings) verdict(s, f["id"], R"({"action":"confirm","impact":"qualitative"})");
    for (auto& t : readers) t.join();
    EXPECT_EQ(failures.load(), 0);
    EXPECT_EQ(get(s, "/statistics")["error_statistics"]["total"]["errors"], 3);
}

TEST(Http, ServesOverLocalhost) {
    AuditService s(six_cells(), DetectorConfig{});
    HttpServer server(s);
    ASSERT_TRUE(server.bind("127.0.0.1", 0));
    ASSERT_GT(server.port(), 0);
    std::thread thread([&] { server.listen(); });

    httplib::Client client("127.0.0.1", server.port());
    httplib::Result res;
    for (int i = 0; i < 50 && !(res = client.Get("/hierarchy")); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body)["levels"]["copy"].size(), 3u);

    auto graph = client.Get("/graph?visible=C1,C2,C3");
    ASSERT_TRUE(graph);
    EXPECT_EQ(graph->status, 200);
    EXPECT_EQ(graph->body, s.handle("GET", "/graph", {{"visible", "C1,C2,C3"}}, "").body);

    auto missing = client.Post("/findings/F1/verdict", R"({"action":"dismiss"})", "application/json");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    EXPECT_EQ(missing->get_header_value("Content-Type"), "application/json");

    server.stop();
    thread.join();
}
