#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "sheetaudit/errors.hpp"
#include "sheetaudit/areas.hpp"
#include "sheetaudit/fixture.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr discarded; `args` is passed to the shell verbatim.
Outcome run(const std::string& args) {
    std::string cmd = std::string("'") + SHEETAUDIT_CLI + "' " + args + " 2>/dev/null";
    Outcome r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sheetaudit-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }
    fs::path file(const std::string& name) const { return dir_ / name; }

    std::string six_cells() const {
        write_file(file("six.json"), R"({"workbook":"six","sheets":[{"name":"Sheet1","cells":[
            {"addr":"A1","content":"1"},{"addr":"A2","content":"2"},{"addr":"B1","content":"=A1*2"},
            {"addr":"B2","content":"=A2*2"},{"addr":"B3","content":"=A2*3"},{"addr":"C1","content":"=A1+B1"}]}]})");
        return path("six.json");
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, CleanWorkbookExitsZero) {
    Outcome r = run("audit " + six_cells());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("Findings (0)"), std::string::npos) << r.out;
}

TEST_F(Cli, FindingsExitOneAndLogIsWritten) {
    ASSERT_EQ(run("fixture --kind interrupted --seed 3 --anomalies 4 -o " + path("fx.json")).code, 0);
    ASSERT_TRUE(fs::exists(file("fx.truth.json")));
    Outcome r = run("audit " + path("fx.json") + " --format json --findings-log " + path("log.jsonl") + " --hierarchy " +
                path("h.json") + " --areas " + path("areas.json"));
    EXPECT_EQ(r.code, 1);
    auto report = nlohmann::json::parse(r.out);
    EXPECT_EQ(report["findings"].size(), 4u);

    auto truth = sheetaudit::parse_truth(read_file(file("fx.truth.json")));
    ASSERT_EQ(truth.size(), 4u);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        EXPECT_EQ(report["findings"][i]["location"], truth[i].location.to_a1());
        EXPECT_EQ(report["findings"][i]["category"], std::string(sheetaudit::to_string(truth[i].category)));
    }

    std::string log = read_file(file("log.jsonl"));
    EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 4);
    auto store = sheetaudit::FindingStore::replay(log);
    EXPECT_EQ(store.findings().size(), 4u);
    EXPECT_TRUE(nlohmann::json::parse(read_file(file("h.json"))).contains("levels"));
    EXPECT_TRUE(nlohmann::json::parse(read_file(file("areas.json"))).is_array());
}

TEST_F(Cli, LoadAndUsageErrorsExitTwo) {
    write_file(file("bad.json"), R"({"workbook":"w","sheets":[{"name":"S","cells":[{"addr":"A1","content":"=1+"}]}]})");
    EXPECT_EQ(run("audit " + path("bad.json")).code, 2);
    EXPECT_EQ(run("audit " + path("missing.json")).code, 2);
    EXPECT_EQ(run("audit " + six_cells() + " --level galactic").code, 2);
    EXPECT_EQ(run("audit " + six_cells() + " --format html").code, 2);
    EXPECT_EQ(run("fixture --kind broken -o " + path("x.json")).code, 2);
    EXPECT_EQ(run("fixture --kind interrupted --rows 3 --cols 2 -o " + path("x.json")).code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ReportAndStrippedLogAreDeterministic) {
    ASSERT_EQ(run("fixture --kind mixed --seed 9 -o " + path("fx.json")).code, 0);
    Outcome a = run("audit " + path("fx.json") + " --findings-log " + path("a.jsonl"));
    Outcome b = run("audit " + path("fx.json") + " --findings-log " + path("b.jsonl"));
    EXPECT_EQ(a.code, 1);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(sheetaudit::strip_envelopes(read_file(file("a.jsonl"))),
              sheetaudit::strip_envelopes(read_file(file("b.jsonl"))));
}

TEST_F(Cli, CsvInputs) {
    write_file(file("Prices.csv"), "item,price,tax\nA,10,=B2*0.2\nB,20,=B3*0.2\n");
    Outcome r = run("audit " + path("Prices.csv") + " --format json");
    EXPECT_EQ(r.code, 0);
    auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["sheets"][0]["name"], "Prices");
    EXPECT_EQ(doc["metrics"]["formulas"], 2);
}

TEST_F(Cli, ExportDotWritesBothLevels) {
    ASSERT_EQ(run("export-dot " + six_cells() + " --level logical -o " + path("")).code, 0);
    std::string cells = read_file(file("cells.dot"));
    std::string classes = read_file(file("classes-logical.dot"));
    EXPECT_EQ(cells, read_file(fs::path(SHEETAUDIT_SOURCE_DIR) / "tests/golden/six_cells_cells.dot"));
    EXPECT_NE(classes.find("\"L1\""), std::string::npos) << classes;
    EXPECT_EQ(classes.rfind("digraph", 0), 0u);
}

TEST_F(Cli, TablesFromStudyCounts) {
    std::string counts = std::string("'") + SHEETAUDIT_SOURCE_DIR + "/data/study_counts.json'";
    Outcome text = run("tables " + counts);
    EXPECT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("3.03%"), std::string::npos);
    Outcome json = run("tables " + counts + " --format json");
    EXPECT_EQ(json.code, 0);
    EXPECT_EQ(nlohmann::json::parse(json.out)["metrics"]["formulas"], 36429);
    EXPECT_EQ(run("tables " + path("none.json")).code, 2);
}
