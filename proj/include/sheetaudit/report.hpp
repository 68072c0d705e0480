#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetaudit/areas.hpp"
#include "sheetaudit/equivalence.hpp"

namespace sheetaudit {

class Workbook;

/// Exact quotient num/den. Display rounding is half-up on the exact value,
/// never on a binary double.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    double percent() const { return 100.0 * value(); }

    /// "6.6" for 814/12382 at one decimal; no % sign.
    std::string percent_text(int decimals) const;
    std::string value_text(int decimals) const;
};

/// Absent when den is zero. Both operands must be non-negative.
std::optional<Ratio> ratio(std::int64_t num, std::int64_t den);

/// floor(num * scale * 10^decimals / den + 1/2) rendered with `decimals` places.
std::string round_half_up(std::int64_t num, std::int64_t den, int decimals, std::int64_t scale = 1);

struct CountRow {
    std::string name;
    std::int64_t cells = 0;  // bounding-box area
    std::int64_t occupied = 0;
    std::int64_t formulas = 0;
    std::int64_t literals = 0;
    std::int64_t ce_count = 0;  // copy classes with a member in this row's scope

    std::optional<Ratio> occupied_pct() const { return ratio(occupied, cells); }
    std::optional<Ratio> formula_pct() const { return ratio(formulas, occupied); }
    std::optional<Ratio> literal_pct() const { return ratio(literals, occupied); }
    std::optional<Ratio> ce_to_formula() const { return ratio(ce_count, formulas); }
    std::optional<Ratio> avg_class_size() const { return ratio(formulas, ce_count); }
};

/// One row per sheet (or per workbook for a multi-workbook study) plus a
/// total. Count fields other than ce_count are additive; ce_count is not,
/// because a copy class may span sheets.
struct AuditMetrics {
    std::string workbook;
    std::string row_label = "Sheet";
    std::vector<CountRow> rows;
    CountRow total;

    /// Invariant violations, empty when consistent.
    std::vector<std::string> check_consistency() const;
};

AuditMetrics compute_metrics(const Workbook& workbook, const ClassHierarchy& h);

struct Split {
    std::int64_t classes = 0;
    std::int64_t errors = 0;

    bool operator==(const Split&) const = default;
};

struct ErrorRow {
    std::string name;
    Split total;
    std::array<Split, 2> by_impact{};  // qualitative, quantitative
    std::optional<std::array<Split, 5>> by_category;  // kAllCategories order
    std::int64_t ce_count = 0;
    std::int64_t formulas = 0;
    std::int64_t occupied = 0;

    Split impact(Impact i) const { return by_impact[static_cast<std::size_t>(i)]; }
    std::optional<Ratio> classes_per_ce() const { return ratio(total.classes, ce_count); }
    std::optional<Ratio> errors_per_formula() const { return ratio(total.errors, formulas); }
    std::optional<Ratio> errors_per_occupied() const { return ratio(total.errors, occupied); }
};

struct ErrorStatistics {
    std::vector<ErrorRow> rows;
    ErrorRow total;

    /// Invariant violations, empty when consistent: splits sum to row totals,
    /// errors >= classes, row errors sum to the total.
    std::vector<std::string> check_consistency() const;
};

/// Error rows aligned with metrics.rows. An error class takes the impact and
/// category of its first confirmed record.
ErrorStatistics compute_error_statistics(const std::vector<ErrorRecord>& errors, const ClassHierarchy& h,
                                         const AuditMetrics& metrics);

struct InjectedStudy {
    AuditMetrics metrics;
    ErrorStatistics errors;
};

/// Builds metrics and statistics from raw counts instead of analysis.
/// Throws LoadError on malformed input.
InjectedStudy inject_counts(std::string_view json_text);

/// format is "text" or "json"; anything else throws UsageError.
std::string emit_report(const AuditMetrics& metrics, const ErrorStatistics& stats,
                        const std::vector<Finding>& findings, std::string_view format);

}  // namespace sheetaudit
