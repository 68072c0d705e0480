#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "sheetaudit/areas.hpp"
#include "sheetaudit/workbook.hpp"

using namespace sheetaudit;

namespace {

std::vector<GridPos> column_b(int first, int last) {
    std::vector<GridPos> out;
    for (int r = first; r <= last; ++r) out.push_back({r, 2});
    return out;
}

std::set<GridPos> covered(const std::vector<Rect>& rects) {
    std::set<GridPos> out;
    for (const Rect& r : rects) {
        for (int row = r.row0; row <= r.row1; ++row) {
            for (int col = r.col0; col <= r.col1; ++col) {
                EXPECT_TRUE(out.insert({row, col}).second) << "overlap at " << row << "," << col;
            }
        }
    }
    return out;
}

}  // namespace

TEST(Rectangles, ContiguousColumn) {
    auto rects = decompose_rectangles(column_b(2, 11));
    ASSERT_EQ(rects.size(), 1u);
    EXPECT_EQ(rects[0], (Rect{2, 2, 11, 2}));
    EXPECT_EQ(rects[0].to_a1(), "B2:B11");
    EXPECT_EQ(rects[0].cells(), 10);
}

TEST(Rectangles, GapSplits) {
    auto cells = column_b(2, 5);
    auto lower = column_b(7, 11);
    cells.insert(cells.end(), lower.begin(), lower.end());
    auto rects = decompose_rectangles(cells);
    ASSERT_EQ(rects.size(), 2u);
    EXPECT_EQ(rects[0].to_a1(), "B2:B5");
    EXPECT_EQ(rects[1].to_a1(), "B7:B11");
}

TEST(Rectangles, LShapeRowMajorGreedy) {
    auto rects = decompose_rectangles({{3, 2}, {2, 3}, {2, 2}});
    ASSERT_EQ(rects.size(), 2u);
    EXPECT_EQ(rects[0].to_a1(), "B2:C2");
    EXPECT_EQ(rects[1].to_a1(), "B3");
}

TEST(Rectangles, BlockAndDuplicates) {
    std::vector<GridPos> cells;
    for (int r = 1; r <= 3; ++r)
        for (int c = 1; c <= 4; ++c) cells.push_back({r, c});
    cells.push_back({2, 2});
    auto rects = decompose_rectangles(cells);
    ASSERT_EQ(rects.size(), 1u);
    EXPECT_EQ(rects[0].to_a1(), "A1:D3");
    EXPECT_TRUE(decompose_rectangles({}).empty());
}

TEST(Rectangles, RandomSetsAreCoveredExactly) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::set<GridPos> cells;
        int n = sheetaudit::testing::uniform(rng, 1, 40);
        for (int i = 0; i < n; ++i) cells.insert({sheetaudit::testing::uniform(rng, 1, 8), sheetaudit::testing::uniform(rng, 1, 8)});
        auto rects = decompose_rectangles({cells.begin(), cells.end()});
        EXPECT_EQ(covered(rects), cells);
        for (std::size_t i = 1; i < rects.size(); ++i) {
            GridPos prev{rects[i - 1].row0, rects[i - 1].col0};
            GridPos cur{rects[i].row0, rects[i].col0};
            EXPECT_LT(prev, cur);
        }
    }
}

TEST(LogicalAreas, PerClassAndSheet) {
    Workbook wb("w");
    wb.add_sheet("Data");
    wb.add_sheet("Other");
    for (int r = 2; r <= 11; ++r) {
        CellAddress a{"Data", 2, r};
        wb.sheet(0).set(a.pos(), make_content("=A" + std::to_string(r) + "*2", a));
    }
    CellAddress o{"Other", 2, 4};
    wb.sheet(1).set(o.pos(), make_content("=A4*2", o));
    ClassHierarchy h = partition(wb);
    auto areas = logical_areas(h, Level::Copy);
    ASSERT_EQ(areas.size(), 2u);
    EXPECT_EQ(areas[0].class_id, "C1");
    EXPECT_EQ(areas[0].sheet, "Data");
    ASSERT_EQ(areas[0].regions.size(), 1u);
    EXPECT_EQ(areas[0].regions[0].to_a1(), "B2:B11");
    EXPECT_EQ(areas[1].class_id, "C1");
    EXPECT_EQ(areas[1].sheet, "Other");
    EXPECT_EQ(areas[1].regions[0].to_a1(), "B4");
}

TEST(LogicalAreas, UnionEqualsMembers) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Workbook wb = sheetaudit::testing::random_workbook(seed);
        ClassHierarchy h = partition(wb);
        for (Level level : kAllLevels) {
            std::map<std::pair<std::string, std::string>, std::set<GridPos>> expected;
            for (const auto& cls : h.classes(level))
                for (const auto& m : cls.members) expected[{cls.id, m.sheet}].insert(m.pos());
            auto areas = logical_areas(h, level);
            EXPECT_EQ(areas.size(), expected.size());
            for (const auto& area : areas) {
                EXPECT_EQ(covered(area.regions), (expected[{area.class_id, area.sheet}])) << area.class_id;
            }
        }
    }
}
