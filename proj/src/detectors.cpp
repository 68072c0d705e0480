#include <algorithm>
#include <map>
#include <set>

#include "sheetaudit/areas.hpp"
#include "sheetaudit/workbook.hpp"

namespace sheetaudit {

namespace {

// A maximal run of consecutive members along one row or column.
struct Segment {
    std::int32_t begin = 0;  // first index along the line
    std::int32_t end = 0;    // last index, inclusive
    std::int32_t length() const { return end - begin + 1; }
};

struct Line {
    std::string sheet;
    bool vertical = true;  // column line: index is the row
    std::int32_t fixed = 0;  // the column (vertical) or row (horizontal)
    std::vector<Segment> segments;

    GridPos at(std::int32_t index) const { return vertical ? GridPos{index, fixed} : GridPos{fixed, index}; }

    std::string span(std::int32_t a, std::int32_t b) const {
        Rect r = vertical ? Rect{a, fixed, b, fixed} : Rect{fixed, a, fixed, b};
        return quote_sheet_name(sheet) + "!" + r.to_a1();
    }
};

std::vector<Segment> split_segments(std::vector<std::int32_t> indices) {
    std::sort(indices.begin(), indices.end());
    std::vector<Segment> out;
    for (std::int32_t i : indices) {
        if (!out.empty() && out.back().end + 1 == i) {
            out.back().end = i;
        } else {
            out.push_back({i, i});
        }
    }
    return out;
}

bool sheet_qualifies(const Workbook& wb, const std::string& sheet, const DetectorConfig& config) {
    const Sheet* s = wb.find_sheet(sheet);
    return s && static_cast<int>(s->formula_count()) >= config.min_sheet_formulas;
}

/// Row and column lines of one class, restricted to qualifying sheets.
std::vector<Line> class_lines(const EquivalenceClass& cls, const Workbook& wb, const DetectorConfig& config) {
    std::map<std::pair<std::string, std::int32_t>, std::vector<std::int32_t>> by_col, by_row;
    for (const auto& m : cls.members) {
        by_col[{m.sheet, m.column}].push_back(m.row);
        by_row[{m.sheet, m.row}].push_back(m.column);
    }
    std::vector<Line> lines;
    for (auto* group : {&by_col, &by_row}) {
        bool vertical = group == &by_col;
        for (auto& [key, indices] : *group) {
            if (!sheet_qualifies(wb, key.first, config)) continue;
            lines.push_back({key.first, vertical, key.second, split_segments(std::move(indices))});
        }
    }
    return lines;
}

void sort_and_number(std::vector<Finding>& findings, const Workbook& wb) {
    std::stable_sort(findings.begin(), findings.end(), [&](const Finding& a, const Finding& b) {
        return wb.address_less(a.location, b.location);
    });
    for (std::size_t i = 0; i < findings.size(); ++i) findings[i].id = "F" + std::to_string(i + 1);
}

std::string class_key_for(const Workbook& wb, const CellAddress& cell) {
    const CellContent& content = wb.content(cell);
    if (content.is_formula()) return copy_fingerprint(*content.ast).key;
    return "cell:" + cell.to_a1();
}

/// Keeps the strongest finding per cell.
void merge_into(std::map<CellAddress, Finding>& best, Finding f) {
    auto it = best.find(f.location);
    if (it == best.end()) {
        best.emplace(f.location, std::move(f));
    } else if (category_rank(f.category) < category_rank(it->second.category)) {
        it->second = std::move(f);
    }
}

std::vector<Finding> flatten(std::map<CellAddress, Finding>& best, const Workbook& wb) {
    std::vector<Finding> out;
    for (auto& [addr, f] : best) out.push_back(std::move(f));
    sort_and_number(out, wb);
    return out;
}

/// True when the member's relative references exist and all of them land on
/// empty, out-of-grid or unknown-sheet cells.
bool references_only_empty(const Workbook& wb, const CellAddress& cell) {
    const CellContent& content = wb.content(cell);
    if (!content.is_formula()) return false;
    bool any_relative = false;
    for (const auto& r : resolve_references(*content.ast, cell)) {
        if (!r.has_relative_axis) continue;
        any_relative = true;
        if (!r.in_grid) continue;
        const Sheet* sheet = wb.find_sheet(r.sheet);
        if (!sheet) continue;
        for (std::int64_t row = r.row0; row <= r.row1; ++row) {
            for (std::int64_t col = r.col0; col <= r.col1; ++col) {
                if (sheet->occupied({static_cast<std::int32_t>(row), static_cast<std::int32_t>(col)})) return false;
            }
        }
    }
    return any_relative;
}

}  // namespace

int category_rank(Category c) {
    switch (c) {
        case Category::ConstantInsteadOfFormula: return 0;
        case Category::ConstantInsteadOfReference: return 1;
        case Category::FormulaCopiedTooFar: return 2;
        case Category::ReferenceToEmptyCell: return 3;
        case Category::Other: return 4;
    }
    return 5;
}

std::vector<Finding> detect_interruptions(const ClassHierarchy& h, const Workbook& wb, const DetectorConfig& config) {
    std::map<CellAddress, Finding> best;
    for (const auto& cls : h.classes(Level::Copy)) {
        const EquivalenceClass* logical = h.parent_of(cls);
        const EquivalenceClass* structural = logical ? h.parent_of(*logical) : nullptr;

        for (const Line& line : class_lines(cls, wb, config)) {
            const Sheet& sheet = *wb.find_sheet(line.sheet);
            for (std::size_t s = 0; s + 1 < line.segments.size(); ++s) {
                const Segment& before = line.segments[s];
                const Segment& after = line.segments[s + 1];
                std::int32_t gap = after.begin - before.end - 1;
                if (gap < 1 || gap > config.max_gap) continue;
                if (before.length() < config.min_flank || after.length() < config.min_flank) continue;

                bool all_occupied = true;
                for (std::int32_t i = before.end + 1; i < after.begin; ++i) all_occupied &= sheet.occupied(line.at(i));
                if (!all_occupied) continue;

                for (std::int32_t i = before.end + 1; i < after.begin; ++i) {
                    GridPos pos = line.at(i);
                    CellAddress cell{line.sheet, pos.col, pos.row};
                    const CellContent& content = sheet.at(pos);
                    Finding f;
                    f.location = cell;
                    f.run = line.span(before.begin, after.end);
                    f.class_ids = {cls.id};
                    std::string where = cell.to_a1() + " interrupts the run " + f.run + " of copy class " + cls.id;
                    if (!content.is_formula()) {
                        f.category = Category::ConstantInsteadOfFormula;
                        f.description = where + " with the constant '" + content.raw + "'";
                    } else {
                        const EquivalenceClass* own_copy = h.class_of(cell, Level::Copy);
                        const EquivalenceClass* own_logical = h.class_of(cell, Level::Logical);
                        const EquivalenceClass* own_structural = h.class_of(cell, Level::Structural);
                        if (own_copy) f.class_ids.push_back(own_copy->id);
                        if (structural && own_structural == structural && own_logical != logical) {
                            f.category = Category::ConstantInsteadOfReference;
                            f.description = where + " with '" + content.raw +
                                            "': same operator structure but a different logical class "
                                            "(heuristic: a constant where the run has a reference)";
                        } else {
                            f.category = Category::Other;
                            f.description = where + " with the different formula '" + content.raw + "'";
                        }
                    }
                    f.error_class_key = class_key_for(wb, cell);
                    merge_into(best, std::move(f));
                }
            }
        }
    }
    return flatten(best, wb);
}

std::vector<Finding> detect_empty_references(const Workbook& wb) {
    std::map<CellAddress, Finding> best;
    for (const auto& cell : wb.formula_cells()) {
        const CellContent& content = wb.content(cell);
        Precedents p = referenced_cells(*content.ast, cell, wb);
        std::vector<std::string> offending;
        bool out_of_grid = !p.out_of_grid.empty();
        for (const auto& c : p.cells) {
            if (wb.content(c).is_empty()) offending.push_back(c.to_a1());
        }
        for (const auto& r : p.out_of_grid) offending.push_back(r.describe());
        for (const auto& s : p.unresolved_sheets) offending.push_back("unknown sheet '" + s + "'");
        if (offending.empty()) continue;

        Finding f;
        f.category = Category::ReferenceToEmptyCell;
        f.location = cell;
        std::string listed;
        for (std::size_t i = 0; i < offending.size() && i < 5; ++i) listed += (i ? ", " : "") + offending[i];
        if (offending.size() > 5) listed += ", ... (" + std::to_string(offending.size()) + " total)";
        f.description = cell.to_a1() + " references " + (out_of_grid ? "out-of-grid or empty cells: " : "empty cells: ") +
                        listed;
        f.error_class_key = class_key_for(wb, cell);
        merge_into(best, std::move(f));
    }
    return flatten(best, wb);
}

std::vector<Finding> detect_copied_too_far(const ClassHierarchy& h, const Workbook& wb, const DetectorConfig& config) {
    std::map<CellAddress, Finding> best;
    for (const auto& cls : h.classes(Level::Copy)) {
        for (const Line& line : class_lines(cls, wb, config)) {
            for (const Segment& seg : line.segments) {
                if (seg.length() < 2) continue;
                std::vector<bool> dead;
                for (std::int32_t i = seg.begin; i <= seg.end; ++i) {
                    GridPos p = line.at(i);
                    dead.push_back(references_only_empty(wb, {line.sheet, p.col, p.row}));
                }
                std::size_t n = dead.size();
                std::size_t head = 0, tail = 0;
                while (head < n && dead[head]) ++head;
                while (tail < n && dead[n - 1 - tail]) ++tail;
                if (head == n) continue;  // no live interior to compare against

                auto flag = [&](std::size_t k, std::size_t from, std::size_t to) {
                    for (std::size_t j = from; j < to; ++j) {
                        GridPos p = line.at(seg.begin + static_cast<std::int32_t>(j));
                        CellAddress cell{line.sheet, p.col, p.row};
                        Finding f;
                        f.category = Category::FormulaCopiedTooFar;
                        f.location = cell;
                        f.class_ids = {cls.id};
                        f.run = line.span(seg.begin, seg.end);
                        f.description = cell.to_a1() + " is among " + std::to_string(k) + " trailing member(s) of " +
                                        f.run + " (class " + cls.id +
                                        ") whose relative references only reach empty cells";
                        f.error_class_key = class_key_for(wb, cell);
                        merge_into(best, std::move(f));
                    }
                };
                flag(head, 0, head);
                flag(tail, n - tail, n);
            }
        }
    }
    return flatten(best, wb);
}

std::vector<Finding> detect_all(const ClassHierarchy& h, const Workbook& wb, const DetectorConfig& config) {
    std::map<CellAddress, Finding> best;
    for (auto& f : detect_interruptions(h, wb, config)) merge_into(best, std::move(f));
    for (auto& f : detect_copied_too_far(h, wb, config)) merge_into(best, std::move(f));
    for (auto& f : detect_empty_references(wb)) {
        if (const auto* cls = h.class_of(f.location, Level::Copy)) f.class_ids = {cls->id};
        merge_into(best, std::move(f));
    }
    return flatten(best, wb);
}

}  // namespace sheetaudit
