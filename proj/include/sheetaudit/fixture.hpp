#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetaudit/areas.hpp"
#include "sheetaudit/workbook.hpp"

namespace sheetaudit {

enum class FixtureKind : std::uint8_t { Regular, Interrupted, CopiedTooFar, EmptyRef, Mixed };

std::string_view to_string(FixtureKind kind);
std::optional<FixtureKind> parse_fixture_kind(std::string_view text);

struct FixtureOptions {
    FixtureKind kind = FixtureKind::Regular;
    std::uint64_t seed = 1;
    int rows = 50;       // data rows below the header
    int cols = 20;       // data columns plus formula columns
    int anomalies = 5;   // ignored for Regular
};

struct SeededAnomaly {
    CellAddress location;
    Category category = Category::Other;

    bool operator==(const SeededAnomaly&) const = default;
};

/// A regular data block (one sheet "Data": labels in row 1, numeric columns,
/// then one copied formula column per numeric column and a totals row) with
/// anomalies planted at known cells.
struct Fixture {
    Workbook workbook;
    FixtureKind kind = FixtureKind::Regular;
    std::uint64_t seed = 0;
    std::vector<SeededAnomaly> anomalies;  // canonical order

    /// {"kind": ..., "seed": ..., "anomalies": [{"addr": "Data!E7", "category": ...}]}
    std::string truth_json() const;
};

/// Deterministic for a given options value. Throws UsageError when the grid
/// is too small to hold the requested anomalies without them touching.
Fixture generate_fixture(const FixtureOptions& options);

/// Reads a sidecar written by Fixture::truth_json. Throws LoadError.
std::vector<SeededAnomaly> parse_truth(std::string_view json_text);

}  // namespace sheetaudit
