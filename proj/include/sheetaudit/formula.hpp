#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetaudit/address.hpp"

namespace sheetaudit {

class Workbook;

// Formula ASTs are origin-independent: a bare A1 axis is stored as the signed
// offset from the containing cell (R1C1 style), a $-prefixed axis as its index.
// Copy/paste translations of one formula therefore parse to identical trees.

enum class AxisMode : std::uint8_t { Relative, Absolute };

struct Axis {
    AxisMode mode = AxisMode::Relative;
    std::int32_t value = 0;  // offset when Relative, 1-based index when Absolute

    static Axis relative(std::int32_t offset) { return {AxisMode::Relative, offset}; }
    static Axis absolute(std::int32_t index) { return {AxisMode::Absolute, index}; }

    /// Coordinate this axis names for a cell at `origin`. May be < 1 or beyond the grid.
    std::int64_t resolve(std::int32_t origin) const {
        return mode == AxisMode::Absolute ? value : static_cast<std::int64_t>(origin) + value;
    }

    bool operator==(const Axis&) const = default;
};

struct Reference {
    std::optional<std::string> sheet;  // absent: the containing sheet
    Axis col;
    Axis row;

    bool operator==(const Reference&) const = default;
};

struct RangeRef {
    Reference start;
    Reference end;  // shares start's sheet qualifier

    bool operator==(const RangeRef&) const = default;
};

enum class NodeKind : std::uint8_t { Number, String, Bool, Cell, Range, Unary, Binary, Call };

enum class UnaryOp : std::uint8_t { Negate, Percent };

enum class BinaryOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge, Concat, Add, Sub, Mul, Div, Pow };

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);

struct FormulaNode {
    NodeKind kind = NodeKind::Number;
    double number = 0.0;   // Number
    bool boolean = false;  // Bool
    std::string text;      // String payload, or upper-cased function name for Call
    RangeRef ref;          // Cell uses ref.start; Range uses both ends
    UnaryOp unary_op = UnaryOp::Negate;
    BinaryOp binary_op = BinaryOp::Add;
    std::vector<FormulaNode> children;

    static FormulaNode make_number(double v);
    static FormulaNode make_string(std::string s);
    static FormulaNode make_bool(bool b);
    static FormulaNode make_cell(Reference r);
    static FormulaNode make_range(RangeRef r);
    static FormulaNode make_unary(UnaryOp op, FormulaNode child);
    static FormulaNode make_binary(BinaryOp op, FormulaNode lhs, FormulaNode rhs);
    static FormulaNode make_call(std::string name, std::vector<FormulaNode> args);

    friend bool operator==(const FormulaNode& a, const FormulaNode& b);
};

struct FormulaAst {
    FormulaNode root;

    friend bool operator==(const FormulaAst& a, const FormulaAst& b) { return a.root == b.root; }
};

/// Parses "=expr" at the containing cell `origin`. Throws FormulaError with the
/// offending character offset on syntax or range problems.
FormulaAst parse_formula(std::string_view text, const CellAddress& origin);

/// A1 text for `ast` placed at `origin`, with minimal parentheses.
/// Throws RenderError when a relative axis leaves the grid.
std::string render_formula(const FormulaAst& ast, const CellAddress& origin);

/// Textual simulation of copying the cell at `from` to `to`: relative axes move
/// by (to - from), absolute axes and all other text are kept as written.
/// Throws RenderError when a shifted reference leaves the grid, FormulaError
/// when the text has malformed references.
std::string translate_a1(std::string_view text, const CellAddress& from, const CellAddress& to);

/// Debug rendering of the tree (R1C1-style offsets), used in test output.
std::string dump_ast(const FormulaAst& ast);

// ---------------------------------------------------------------------------
// Precedent resolution

/// One reference of a formula resolved against its origin. Coordinates are
/// normalized so that row0 <= row1 and col0 <= col1; when in_grid is false
/// they hold the raw (possibly < 1) values.
struct ResolvedRef {
    std::string sheet;
    std::int64_t row0 = 0;
    std::int64_t col0 = 0;
    std::int64_t row1 = 0;
    std::int64_t col1 = 0;
    bool in_grid = true;
    bool has_relative_axis = false;
    bool is_range = false;

    std::string describe() const;

    bool operator==(const ResolvedRef&) const = default;
};

/// Every CellRef/Range leaf in tree order, resolved against `origin`.
std::vector<ResolvedRef> resolve_references(const FormulaAst& ast, const CellAddress& origin);

struct Precedents {
    std::vector<CellAddress> cells;  // in-grid, on known sheets, sorted and unique
    std::vector<ResolvedRef> out_of_grid;
    std::vector<std::string> unresolved_sheets;  // sorted, unique

    bool operator==(const Precedents&) const = default;
};

Precedents referenced_cells(const FormulaAst& ast, const CellAddress& origin, const Workbook& workbook);

}  // namespace sheetaudit
