#include <gtest/gtest.h>

#include "sheetaudit/areas.hpp"
#include "sheetaudit/workbook.hpp"

using namespace sheetaudit;

namespace {

class Grid {
public:
    Grid() { wb_.add_sheet("S"); }

    Grid& set(std::string_view a1, const std::string& text) {
        CellAddress a = CellAddress::parse(a1, "S");
        wb_.sheet(0).set(a.pos(), make_content(text, a));
        return *this;
    }

    /// Fills col<first>..col<last> with text built from the row number.
    template <typename F>
    Grid& column(char col, int first, int last, F text) {
        for (int r = first; r <= last; ++r) set(std::string(1, col) + std::to_string(r), text(r));
        return *this;
    }

    const Workbook& wb() const { return wb_; }

private:
    Workbook wb_{"w"};
};

std::string n(int r) { return std::to_string(r); }

std::vector<std::pair<std::string, Category>> summary(const std::vector<Finding>& findings) {
    std::vector<std::pair<std::string, Category>> out;
    for (const auto& f : findings) out.emplace_back(f.location.to_a1(false), f.category);
    return out;
}

using Summary = std::vector<std::pair<std::string, Category>>;

}  // namespace

TEST(Interruptions, ConstantInsteadOfFormula) {
    Grid g;
    g.column('A', 2, 6, [](int r) { return n(r * 10); });
    for (int r : {2, 3, 5, 6}) g.set("B" + n(r), "=A" + n(r) + "*2");
    g.set("B4", "7");
    ClassHierarchy h = partition(g.wb());
    auto findings = detect_interruptions(h, g.wb(), {});
    EXPECT_EQ(summary(findings), (Summary{{"B4", Category::ConstantInsteadOfFormula}}));
    EXPECT_EQ(findings[0].run, "S!B2:B6");
    EXPECT_EQ(findings[0].class_ids, (std::vector<std::string>{"C1"}));
    EXPECT_EQ(findings[0].error_class_key, "cell:S!B4");
    EXPECT_EQ(findings[0].id, "F1");
    EXPECT_EQ(findings[0].status, FindingStatus::Open);
}

TEST(Interruptions, ConstantInsteadOfReference) {
    Grid g;
    g.column('A', 2, 6, [](int r) { return n(r); });
    g.column('C', 2, 6, [](int r) { return n(r + 100); });
    for (int r : {2, 3, 5, 6}) g.set("B" + n(r), "=A" + n(r) + "+C" + n(r));
    g.set("B4", "=A4+2");
    ClassHierarchy h = partition(g.wb());
    ASSERT_EQ(h.class_of({"S", 2, 4}, Level::Structural), h.class_of({"S", 2, 2}, Level::Structural));
    ASSERT_NE(h.class_of({"S", 2, 4}, Level::Logical), h.class_of({"S", 2, 2}, Level::Logical));
    auto findings = detect_interruptions(h, g.wb(), {});
    EXPECT_EQ(summary(findings), (Summary{{"B4", Category::ConstantInsteadOfReference}}));
    EXPECT_NE(findings[0].description.find("heuristic"), std::string::npos);
    EXPECT_EQ(findings[0].error_class_key, copy_fingerprint(*g.wb().content({"S", 2, 4}).ast).key);
}

TEST(Interruptions, UnrelatedFormulaIsOther) {
    Grid g;
    g.column('A', 2, 6, [](int r) { return n(r); });
    for (int r : {2, 3, 5, 6}) g.set("B" + n(r), "=A" + n(r) + "*2");
    g.set("B4", "=SUM(A2:A6)");
    ClassHierarchy h = partition(g.wb());
    EXPECT_EQ(summary(detect_interruptions(h, g.wb(), {})), (Summary{{"B4", Category::Other}}));
}

TEST(Interruptions, LogicalTwinIsOther) {
    Grid g;
    g.column('A', 2, 6, [](int r) { return n(r); });
    for (int r : {2, 3, 5, 6}) g.set("B" + n(r), "=A" + n(r) + "*2");
    g.set("B4", "=A4*3");
    ClassHierarchy h = partition(g.wb());
    EXPECT_EQ(summary(detect_interruptions(h, g.wb(), {})), (Summary{{"B4", Category::Other}}));
}

TEST(Interruptions, UninterruptedRunIsClean) {
    Grid g;
    g.column('A', 2, 11, [](int r) { return n(r); });
    g.column('B', 2, 11, [](int r) { return "=A" + n(r) + "*2"; });
    ClassHierarchy h = partition(g.wb());
    EXPECT_TRUE(detect_interruptions(h, g.wb(), {}).empty());
    EXPECT_TRUE(detect_all(h, g.wb(), {}).empty());
}

TEST(Interruptions, EmptyGapIsNotAnInterruption) {
    Grid g;
    g.column('A', 2, 6, [](int r) { return n(r); });
    for (int r : {2, 3, 5, 6}) g.set("B" + n(r), "=A" + n(r) + "*2");
    ClassHierarchy h = partition(g.wb());
    EXPECT_TRUE(detect_interruptions(h, g.wb(), {}).empty());
}

TEST(Interruptions, Thresholds) {
    Grid g;
    g.column('A', 2, 8, [](int r) { return n(r); });
    for (int r : {2, 3, 6, 7, 8}) g.set("B" + n(r), "=A" + n(r) + "*2");
    g.set("B4", "1").set("B5", "2");
    ClassHierarchy h = partition(g.wb());
    EXPECT_TRUE(detect_interruptions(h, g.wb(), {}).empty());
    DetectorConfig wide;
    wide.max_gap = 2;
    EXPECT_EQ(summary(detect_interruptions(h, g.wb(), wide)),
              (Summary{{"B4", Category::ConstantInsteadOfFormula}, {"B5", Category::ConstantInsteadOfFormula}}));
    wide.min_flank = 3;
    EXPECT_TRUE(detect_interruptions(h, g.wb(), wide).empty());
}

TEST(Interruptions, RowRuns) {
    Grid g;
    for (char c : {'B', 'C', 'D', 'E', 'F'}) g.set(std::string(1, c) + "1", "5");
    for (char c : {'B', 'C', 'E', 'F'}) g.set(std::string(1, c) + "2", "=" + std::string(1, c) + "1*2");
    g.set("D2", "10");
    ClassHierarchy h = partition(g.wb());
    auto findings = detect_interruptions(h, g.wb(), {});
    EXPECT_EQ(summary(findings), (Summary{{"D2", Category::ConstantInsteadOfFormula}}));
    EXPECT_EQ(findings[0].run, "S!B2:F2");
}

TEST(CopiedTooFar, TrailingMembersPastTheData) {
    Grid g;
    g.column('A', 2, 10, [](int r) { return n(r); });
    g.column('B', 2, 12, [](int r) { return "=A" + n(r) + "*2"; });
    ClassHierarchy h = partition(g.wb());
    auto findings = detect_copied_too_far(h, g.wb(), {});
    EXPECT_EQ(summary(findings),
              (Summary{{"B11", Category::FormulaCopiedTooFar}, {"B12", Category::FormulaCopiedTooFar}}));
    EXPECT_EQ(findings[0].run, "S!B2:B12");

    // Oracle: flagged exactly where every precedent is empty.
    for (int r = 2; r <= 12; ++r) {
        CellAddress cell{"S", 2, r};
        Precedents p = referenced_cells(*g.wb().content(cell).ast, cell, g.wb());
        bool all_empty = true;
        for (const auto& c : p.cells) all_empty &= g.wb().content(c).is_empty();
        bool flagged = r >= 11;
        EXPECT_EQ(all_empty, flagged) << r;
    }

    // The merged view keeps copied-too-far over reference-to-empty-cell.
    EXPECT_EQ(summary(detect_all(h, g.wb(), {})),
              (Summary{{"B11", Category::FormulaCopiedTooFar}, {"B12", Category::FormulaCopiedTooFar}}));
}

TEST(CopiedTooFar, LeadingMembersAndCleanRuns) {
    Grid g;
    g.column('A', 4, 10, [](int r) { return n(r); });
    g.column('B', 2, 10, [](int r) { return "=A" + n(r) + "*2"; });
    ClassHierarchy h = partition(g.wb());
    EXPECT_EQ(summary(detect_copied_too_far(h, g.wb(), {})),
              (Summary{{"B2", Category::FormulaCopiedTooFar}, {"B3", Category::FormulaCopiedTooFar}}));

    Grid full;
    full.column('A', 2, 10, [](int r) { return n(r); });
    full.column('B', 2, 10, [](int r) { return "=A" + n(r) + "*2"; });
    ClassHierarchy hf = partition(full.wb());
    EXPECT_TRUE(detect_copied_too_far(hf, full.wb(), {}).empty());
}

TEST(CopiedTooFar, NeedsALiveInterior) {
    Grid g;
    g.column('B', 2, 6, [](int r) { return "=A" + n(r) + "*2"; });
    g.set("D9", "=$A$1");  // absolute-only formulas are never dead
    ClassHierarchy h = partition(g.wb());
    EXPECT_TRUE(detect_copied_too_far(h, g.wb(), {}).empty());

    Grid single;
    single.set("B2", "=A2*2").set("C5", "=1").set("C6", "=2").set("C7", "=3");
    ClassHierarchy hs = partition(single.wb());
    EXPECT_TRUE(detect_copied_too_far(hs, single.wb(), {}).empty());
}

TEST(SmallSheets, RunDetectorsStayQuiet) {
    Grid g;
    g.set("A2", "1");
    g.column('B', 2, 4, [](int r) { return "=A" + n(r) + "*2"; });
    ClassHierarchy h = partition(g.wb());
    EXPECT_TRUE(detect_copied_too_far(h, g.wb(), {}).empty());
    EXPECT_EQ(summary(detect_all(h, g.wb(), {})),
              (Summary{{"B3", Category::ReferenceToEmptyCell}, {"B4", Category::ReferenceToEmptyCell}}));
}

TEST(EmptyReferences, Examples) {
    Grid g;
    g.set("A1", "1").set("B1", "=A1+A2");
    auto findings = detect_empty_references(g.wb());
    EXPECT_EQ(summary(findings), (Summary{{"B1", Category::ReferenceToEmptyCell}}));
    EXPECT_NE(findings[0].description.find("S!A2"), std::string::npos) << findings[0].description;

    Grid full;
    full.column('A', 1, 10, [](int r) { return n(r); });
    full.set("B1", "=SUM(A1:A10)");
    EXPECT_TRUE(detect_empty_references(full.wb()).empty());
}

TEST(EmptyReferences, OutOfGridAndUnknownSheet) {
    Workbook wb = load_fgj(R"({"workbook":"w","sheets":[{"name":"S","cells":[{"addr":"B1","content":"=Nowhere!A1"}]}]})");
    auto findings = detect_empty_references(wb);
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_NE(findings[0].description.find("unknown sheet 'Nowhere'"), std::string::npos);

    // A formula whose relative offset points above row 1, as left behind by a bad copy.
    Workbook off("w");
    off.add_sheet("S");
    CellAddress src{"S", 2, 5};
    CellContent content = make_content("=B4", src);
    content.raw = "=#REF!";
    off.sheet(0).set({1, 2}, std::move(content));
    findings = detect_empty_references(off);
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_EQ(findings[0].location, (CellAddress{"S", 2, 1}));
    EXPECT_NE(findings[0].description.find("out-of-grid"), std::string::npos);
}

TEST(EmptyReferences, DescriptionListsAtMostFive) {
    Grid g;
    g.set("B1", "=SUM(A1:A9)");
    auto findings = detect_empty_references(g.wb());
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_NE(findings[0].description.find("(9 total)"), std::string::npos);
    EXPECT_EQ(findings[0].description.find("S!A6"), std::string::npos);
}

TEST(DetectAll, PrecedenceAndNumbering) {
    Grid g;
    g.column('A', 2, 6, [](int r) { return n(r); });
    for (int r : {2, 3, 5, 6}) g.set("B" + n(r), "=A" + n(r) + "*2");
    g.set("B4", "7");
    g.set("D1", "=C1");
    ClassHierarchy h = partition(g.wb());
    auto findings = detect_all(h, g.wb(), {});
    EXPECT_EQ(summary(findings),
              (Summary{{"D1", Category::ReferenceToEmptyCell}, {"B4", Category::ConstantInsteadOfFormula}}));
    EXPECT_EQ(findings[0].id, "F1");
    EXPECT_EQ(findings[1].id, "F2");
    EXPECT_EQ(findings[0].class_ids, (std::vector<std::string>{h.class_of({"S", 4, 1}, Level::Copy)->id}));
    EXPECT_EQ(detect_all(h, g.wb(), {}), findings);
}

TEST(DetectAll, CategoryRanks) {
    EXPECT_LT(category_rank(Category::ConstantInsteadOfFormula), category_rank(Category::ConstantInsteadOfReference));
    EXPECT_LT(category_rank(Category::ConstantInsteadOfReference), category_rank(Category::FormulaCopiedTooFar));
    EXPECT_LT(category_rank(Category::FormulaCopiedTooFar), category_rank(Category::ReferenceToEmptyCell));
    EXPECT_LT(category_rank(Category::ReferenceToEmptyCell), category_rank(Category::Other));
    for (Category c : kAllCategories) EXPECT_EQ(parse_category(to_string(c)), c);
    EXPECT_EQ(parse_category("typo"), std::nullopt);
}
