#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sheetaudit/address.hpp"
#include "sheetaudit/formula.hpp"

namespace sheetaudit {

class Workbook;

// Three nested similarity levels over formula cells:
//   Copy       - identical normalized trees (copied, or retyped identically)
//   Logical    - identical after wildcarding literals and absolute coordinates
//   Structural - identical operator/function skeleton, every leaf wildcarded
enum class Level : std::uint8_t { Copy = 0, Logical = 1, Structural = 2 };

inline constexpr std::array<Level, 3> kAllLevels{Level::Copy, Level::Logical, Level::Structural};

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

struct Fingerprint {
    Level level = Level::Copy;
    std::string key;

    bool operator==(const Fingerprint&) const = default;
};

Fingerprint copy_fingerprint(const FormulaAst& ast);
Fingerprint logical_fingerprint(const FormulaAst& ast);
Fingerprint structural_fingerprint(const FormulaAst& ast);
Fingerprint fingerprint(const FormulaAst& ast, Level level);

struct EquivalenceClass {
    std::string id;  // "C3", "L1", "S2": level letter + 1-based rank by representative
    Level level = Level::Copy;
    Fingerprint fingerprint;
    std::vector<CellAddress> members;  // canonical workbook order; never empty
    std::optional<std::string> parent;  // absent for structural classes
    std::vector<std::string> children;  // ids one level down, by representative

    const CellAddress& representative() const { return members.front(); }
};

/// Partition of all formula cells at the three levels, with parent links
/// copy -> logical -> structural. Immutable once built.
class ClassHierarchy {
public:
    const std::vector<EquivalenceClass>& classes(Level level) const {
        return levels_[static_cast<std::size_t>(level)];
    }

    const EquivalenceClass* find(std::string_view id) const;
    const EquivalenceClass* parent_of(const EquivalenceClass& cls) const;

    /// Class of a formula cell at `level`, or nullptr for non-formula cells.
    const EquivalenceClass* class_of(const CellAddress& cell, Level level) const;

    /// Ids of the class containing `cell` at every level, copy first.
    std::optional<std::array<std::string, 3>> lineage(const CellAddress& cell) const;

    std::size_t formula_count() const { return member_index_.size(); }
    bool empty() const { return member_index_.empty(); }

    /// Deterministic JSON: {"levels": {"copy": [...], "logical": [...], "structural": [...]}}
    std::string to_json() const;

private:
    friend ClassHierarchy partition(const Workbook& workbook);

    std::array<std::vector<EquivalenceClass>, 3> levels_;
    std::map<CellAddress, std::array<std::size_t, 3>> member_index_;
    std::unordered_map<std::string, std::pair<Level, std::size_t>> by_id_;
};

ClassHierarchy partition(const Workbook& workbook);

/// Classes at one level ordered by representative address.
std::vector<EquivalenceClass> classes_at_level(const ClassHierarchy& h, Level level);

}  // namespace sheetaudit
