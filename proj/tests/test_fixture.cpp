#include <map>
#include <set>

#include <gtest/gtest.h>

#include "sheetaudit/areas.hpp"
#include "sheetaudit/errors.hpp"
#include "sheetaudit/fixture.hpp"
#include "sheetaudit/workbook.hpp"

using namespace sheetaudit;

namespace {

Fixture make(FixtureKind kind, std::uint64_t seed, int anomalies = 5) {
    FixtureOptions o;
    o.kind = kind;
    o.seed = seed;
    o.anomalies = anomalies;
    return generate_fixture(o);
}

std::vector<Finding> detect(const Fixture& fx) {
    ClassHierarchy h = partition(fx.workbook);
    return detect_all(h, fx.workbook, DetectorConfig{});
}

}  // namespace

TEST(Fixture, DeterministicPerSeed) {
    for (auto kind : {FixtureKind::Regular, FixtureKind::Interrupted, FixtureKind::Mixed}) {
        Fixture a = make(kind, 7), b = make(kind, 7), c = make(kind, 8);
        EXPECT_EQ(to_fgj(a.workbook), to_fgj(b.workbook));
        EXPECT_EQ(a.truth_json(), b.truth_json());
        if (kind != FixtureKind::Regular) EXPECT_NE(to_fgj(a.workbook), to_fgj(c.workbook));
    }
}

TEST(Fixture, RegularHasNoAnomaliesAndNoFindings) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Fixture fx = make(FixtureKind::Regular, seed);
        EXPECT_TRUE(fx.anomalies.empty());
        auto findings = detect(fx);
        EXPECT_TRUE(findings.empty()) << "seed " << seed << ": " << findings.front().location.to_a1();
    }
}

TEST(Fixture, KindsPlantTheirCategory) {
    const std::map<FixtureKind, Category> expected{{FixtureKind::Interrupted, Category::ConstantInsteadOfFormula},
                                                   {FixtureKind::CopiedTooFar, Category::FormulaCopiedTooFar},
                                                   {FixtureKind::EmptyRef, Category::ReferenceToEmptyCell}};
    for (const auto& [kind, category] : expected) {
        Fixture fx = make(kind, 3);
        ASSERT_EQ(fx.anomalies.size(), 5u);
        std::set<std::string> cells;
        for (const auto& a : fx.anomalies) {
            EXPECT_EQ(a.category, category);
            cells.insert(a.location.to_a1());
        }
        EXPECT_EQ(cells.size(), 5u);
    }
}

TEST(Fixture, MixedCoversAllFourCategories) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Fixture fx = make(FixtureKind::Mixed, seed, 6);
        std::set<Category> seen;
        for (const auto& a : fx.anomalies) seen.insert(a.category);
        EXPECT_EQ(seen.size(), 4u);
    }
}

TEST(Fixture, AnomaliesInCanonicalOrder) {
    Fixture fx = make(FixtureKind::Mixed, 11, 8);
    for (std::size_t i = 1; i < fx.anomalies.size(); ++i)
        EXPECT_TRUE(fx.workbook.address_less(fx.anomalies[i - 1].location, fx.anomalies[i].location));
}

TEST(Fixture, TruthRoundTrip) {
    Fixture fx = make(FixtureKind::Mixed, 4);
    EXPECT_EQ(parse_truth(fx.truth_json()), fx.anomalies);
    EXPECT_THROW(parse_truth("[]"), LoadError);
    EXPECT_THROW(parse_truth(R"({"anomalies":[{"addr":"Data!A1","category":"nope"}]})"), LoadError);
}

TEST(Fixture, TooSmallGridIsUsageError) {
    FixtureOptions o;
    o.kind = FixtureKind::Interrupted;
    o.rows = 4;
    o.cols = 2;
    o.anomalies = 5;
    EXPECT_THROW(generate_fixture(o), UsageError);
    o.rows = 0;
    EXPECT_THROW(generate_fixture(o), UsageError);
}

TEST(Fixture, KindNames) {
    for (auto k : {FixtureKind::Regular, FixtureKind::Interrupted, FixtureKind::CopiedTooFar, FixtureKind::EmptyRef,
                   FixtureKind::Mixed})
        EXPECT_EQ(parse_fixture_kind(to_string(k)), k);
    EXPECT_EQ(parse_fixture_kind("broken"), std::nullopt);
}

TEST(Fixture, DetectorsRecoverEveryPlantedAnomaly) {
    for (auto kind : {FixtureKind::Interrupted, FixtureKind::CopiedTooFar, FixtureKind::EmptyRef, FixtureKind::Mixed}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            Fixture fx = make(kind, seed);
            std::map<std::string, Category> found;
            for (const auto& f : detect(fx)) found[f.location.to_a1()] = f.category;
            for (const auto& a : fx.anomalies) {
                auto it = found.find(a.location.to_a1());
                ASSERT_NE(it, found.end()) << to_string(kind) << " seed " << seed << " " << a.location.to_a1();
                EXPECT_EQ(it->second, a.category) << a.location.to_a1();
            }
        }
    }
}
