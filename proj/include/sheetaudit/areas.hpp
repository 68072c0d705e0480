#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetaudit/address.hpp"
#include "sheetaudit/equivalence.hpp"

namespace sheetaudit {

class Workbook;

struct Rect {
    std::int32_t row0 = 1;
    std::int32_t col0 = 1;
    std::int32_t row1 = 1;
    std::int32_t col1 = 1;

    std::int64_t cells() const { return std::int64_t(row1 - row0 + 1) * (col1 - col0 + 1); }
    std::string to_a1() const;  // "B2:C4", or "B2" for a single cell

    bool operator==(const Rect&) const = default;
};

/// Footprint of one class on one sheet as disjoint maximal rectangles.
struct LogicalArea {
    std::string class_id;
    std::string sheet;
    std::vector<Rect> regions;  // top-left first
};

/// Row-major greedy cover: take the first uncovered cell, extend right as far
/// as possible, then extend down while the whole row span is present.
std::vector<Rect> decompose_rectangles(std::vector<GridPos> cells);

std::vector<LogicalArea> logical_areas(const ClassHierarchy& h, Level level);

// ---------------------------------------------------------------------------
// Findings

enum class Category : std::uint8_t {
    ConstantInsteadOfFormula,
    ConstantInsteadOfReference,
    ReferenceToEmptyCell,
    FormulaCopiedTooFar,
    Other,
};

inline constexpr std::array<Category, 5> kAllCategories{
    Category::ConstantInsteadOfFormula, Category::ConstantInsteadOfReference, Category::ReferenceToEmptyCell,
    Category::FormulaCopiedTooFar, Category::Other};

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);

enum class FindingStatus : std::uint8_t { Open, ConfirmedError, Dismissed };
std::string_view to_string(FindingStatus s);
std::optional<FindingStatus> parse_status(std::string_view text);

enum class Impact : std::uint8_t { Qualitative, Quantitative };
std::string_view to_string(Impact i);
std::optional<Impact> parse_impact(std::string_view text);

struct Finding {
    std::string id;  // "F1", "F2", ... in canonical location order
    Category category = Category::Other;
    CellAddress location;
    std::vector<std::string> class_ids;  // classes involved (the flanking or owning class)
    std::string run;                     // the row/column run examined, e.g. "Data!B2:B9"
    std::string description;
    FindingStatus status = FindingStatus::Open;
    std::string error_class_key;  // copy fingerprint of the cell, or "cell:<address>"

    bool operator==(const Finding&) const = default;
};

struct DetectorConfig {
    int min_flank = 2;
    int max_gap = 1;
    // Run-based detectors skip sheets with fewer formula cells than this.
    int min_sheet_formulas = 4;
};

/// Occupied cells interrupting a copy-class run along a row or column.
std::vector<Finding> detect_interruptions(const ClassHierarchy& h, const Workbook& wb, const DetectorConfig& config);

/// Formulas with at least one empty, out-of-grid or unknown-sheet precedent.
std::vector<Finding> detect_empty_references(const Workbook& wb);

/// Trailing members of a copy-class run whose relative references all land on empty cells.
std::vector<Finding> detect_copied_too_far(const ClassHierarchy& h, const Workbook& wb, const DetectorConfig& config);

/// Runs every detector, keeps one finding per cell (strongest category first:
/// constant-instead-of-formula, constant-instead-of-reference, copied-too-far,
/// reference-to-empty-cell, other) and assigns ids in canonical order.
std::vector<Finding> detect_all(const ClassHierarchy& h, const Workbook& wb, const DetectorConfig& config);

/// Rank used when two detectors flag the same cell; lower wins.
int category_rank(Category c);

// ---------------------------------------------------------------------------
// Verdict workflow and error database

struct ErrorRecord {
    std::string finding_id;
    Impact impact = Impact::Qualitative;
    std::string note;
    std::string error_class_key;
    Category category = Category::Other;
    CellAddress location;

    bool operator==(const ErrorRecord&) const = default;
};

struct Verdict {
    enum class Action { Confirm, Dismiss };
    Action action = Action::Dismiss;
    Impact impact = Impact::Qualitative;  // used by Confirm
    std::string note;

    static Verdict confirm(Impact impact, std::string note) { return {Action::Confirm, impact, std::move(note)}; }
    static Verdict dismiss(std::string note) { return {Action::Dismiss, Impact::Qualitative, std::move(note)}; }
};

/// Findings plus the append-only event log they are built from. Every
/// mutation appends one JSON line; replaying those lines rebuilds the store.
/// Not internally synchronized; callers serialize writers.
class FindingStore {
public:
    using Clock = std::function<std::string()>;

    explicit FindingStore(Clock clock = utc_now);

    /// Registers freshly detected findings (status must be Open).
    void add(std::vector<Finding> findings);

    /// Applies a verdict to an Open finding. Throws NotFoundError for an
    /// unknown id, StateError when the finding is no longer Open.
    const Finding& record_verdict(std::string_view finding_id, const Verdict& verdict);

    const std::vector<Finding>& findings() const { return findings_; }
    const std::vector<ErrorRecord>& errors() const { return errors_; }
    const Finding* find(std::string_view id) const;

    /// Event log as JSON lines, one per event, LF terminated.
    const std::vector<std::string>& log() const { return log_; }
    std::string log_text() const;

    /// Rebuilds a store from log text. Throws LoadError on malformed lines.
    static FindingStore replay(std::string_view log_text);

    /// Current UTC time, ISO 8601.
    static std::string utc_now();

private:
    void append(const std::string& line);

    Clock clock_;
    std::vector<Finding> findings_;
    std::vector<ErrorRecord> errors_;
    std::vector<std::string> log_;
};

/// Log text with every "envelope" (timestamp) removed, for comparisons.
std::string strip_envelopes(std::string_view log_text);

}  // namespace sheetaudit
