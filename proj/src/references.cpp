#include <algorithm>
#include <string>

#include "sheetaudit/formula.hpp"
#include "sheetaudit/workbook.hpp"

namespace sheetaudit {

namespace {

void collect(const FormulaNode& n, const CellAddress& origin, std::vector<ResolvedRef>& out) {
    if (n.kind == NodeKind::Cell || n.kind == NodeKind::Range) {
        const Reference& a = n.ref.start;
        const Reference& b = n.kind == NodeKind::Range ? n.ref.end : n.ref.start;
        ResolvedRef r;
        r.sheet = a.sheet.value_or(origin.sheet);
        r.is_range = n.kind == NodeKind::Range;
        std::int64_t ca = a.col.resolve(origin.column), cb = b.col.resolve(origin.column);
        std::int64_t ra = a.row.resolve(origin.row), rb = b.row.resolve(origin.row);
        r.col0 = std::min(ca, cb);
        r.col1 = std::max(ca, cb);
        r.row0 = std::min(ra, rb);
        r.row1 = std::max(ra, rb);
        r.in_grid = r.col0 >= 1 && r.row0 >= 1 && r.col1 <= kMaxColumn && r.row1 <= kMaxRow;
        r.has_relative_axis = a.col.mode == AxisMode::Relative || a.row.mode == AxisMode::Relative ||
                              b.col.mode == AxisMode::Relative || b.row.mode == AxisMode::Relative;
        out.push_back(std::move(r));
        return;
    }
    for (const auto& c : n.children) collect(c, origin, out);
}

std::string corner(std::int64_t row, std::int64_t col) {
    if (in_grid(static_cast<std::int32_t>(std::clamp<std::int64_t>(row, -1, kMaxRow + 1)),
                static_cast<std::int32_t>(std::clamp<std::int64_t>(col, -1, kMaxColumn + 1))))
        return column_to_letters(static_cast<std::int32_t>(col)) + std::to_string(row);
    return "#REF(row " + std::to_string(row) + ", col " + std::to_string(col) + ")";
}

}  // namespace

std::string ResolvedRef::describe() const {
    std::string out = quote_sheet_name(sheet) + "!" + corner(row0, col0);
    if (is_range) out += ":" + corner(row1, col1);
    return out;
}

std::vector<ResolvedRef> resolve_references(const FormulaAst& ast, const CellAddress& origin) {
    std::vector<ResolvedRef> out;
    collect(ast.root, origin, out);
    return out;
}

Precedents referenced_cells(const FormulaAst& ast, const CellAddress& origin, const Workbook& workbook) {
    Precedents p;
    for (auto& r : resolve_references(ast, origin)) {
        if (!workbook.find_sheet(r.sheet)) {
            p.unresolved_sheets.push_back(r.sheet);
            continue;
        }
        if (!r.in_grid) {
            p.out_of_grid.push_back(std::move(r));
            continue;
        }
        for (std::int64_t row = r.row0; row <= r.row1; ++row) {
            for (std::int64_t col = r.col0; col <= r.col1; ++col) {
                p.cells.push_back({r.sheet, static_cast<std::int32_t>(col), static_cast<std::int32_t>(row)});
            }
        }
    }
    std::sort(p.cells.begin(), p.cells.end());
    p.cells.erase(std::unique(p.cells.begin(), p.cells.end()), p.cells.end());
    std::sort(p.unresolved_sheets.begin(), p.unresolved_sheets.end());
    p.unresolved_sheets.erase(std::unique(p.unresolved_sheets.begin(), p.unresolved_sheets.end()),
                              p.unresolved_sheets.end());
    return p;
}

}  // namespace sheetaudit
