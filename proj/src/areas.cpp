#include <algorithm>
#include <set>

#include "sheetaudit/areas.hpp"

namespace sheetaudit {

std::string Rect::to_a1() const {
    std::string a = column_to_letters(col0) + std::to_string(row0);
    if (row0 == row1 && col0 == col1) return a;
    return a + ":" + column_to_letters(col1) + std::to_string(row1);
}

std::vector<Rect> decompose_rectangles(std::vector<GridPos> cells) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    const std::set<GridPos> present(cells.begin(), cells.end());
    std::set<GridPos> covered;
    auto free = [&](std::int32_t row, std::int32_t col) {
        GridPos p{row, col};
        return present.count(p) && !covered.count(p);
    };

    std::vector<Rect> out;
    for (const GridPos& p : cells) {
        if (covered.count(p)) continue;
        Rect r{p.row, p.col, p.row, p.col};
        while (free(r.row0, r.col1 + 1)) ++r.col1;
        for (;;) {
            bool full = true;
            for (std::int32_t c = r.col0; c <= r.col1 && full; ++c) full = free(r.row1 + 1, c);
            if (!full) break;
            ++r.row1;
        }
        for (std::int32_t row = r.row0; row <= r.row1; ++row)
            for (std::int32_t col = r.col0; col <= r.col1; ++col) covered.insert({row, col});
        out.push_back(r);
    }
    return out;
}

std::vector<LogicalArea> logical_areas(const ClassHierarchy& h, Level level) {
    std::vector<LogicalArea> out;
    for (const auto& cls : h.classes(level)) {
        // Members are in canonical order, so each sheet's cells are contiguous.
        std::size_t i = 0;
        while (i < cls.members.size()) {
            const std::string& sheet = cls.members[i].sheet;
            std::vector<GridPos> cells;
            for (; i < cls.members.size() && cls.members[i].sheet == sheet; ++i) cells.push_back(cls.members[i].pos());
            out.push_back({cls.id, sheet, decompose_rectangles(std::move(cells))});
        }
    }
    return out;
}

std::string_view to_string(Category c) {
    switch (c) {
        case Category::ConstantInsteadOfFormula: return "ConstantInsteadOfFormula";
        case Category::ConstantInsteadOfReference: return "ConstantInsteadOfReference";
        case Category::ReferenceToEmptyCell: return "ReferenceToEmptyCell";
        case Category::FormulaCopiedTooFar: return "FormulaCopiedTooFar";
        case Category::Other: return "Other";
    }
    return "Other";
}

std::optional<Category> parse_category(std::string_view text) {
    for (Category c : kAllCategories) {
        if (to_string(c) == text) return c;
    }
    return std::nullopt;
}

std::string_view to_string(FindingStatus s) {
    switch (s) {
        case FindingStatus::Open: return "Open";
        case FindingStatus::ConfirmedError: return "ConfirmedError";
        case FindingStatus::Dismissed: return "Dismissed";
    }
    return "Open";
}

std::optional<FindingStatus> parse_status(std::string_view text) {
    for (auto s : {FindingStatus::Open, FindingStatus::ConfirmedError, FindingStatus::Dismissed}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::string_view to_string(Impact i) {
    return i == Impact::Qualitative ? "qualitative" : "quantitative";
}

std::optional<Impact> parse_impact(std::string_view text) {
    if (text == "qualitative") return Impact::Qualitative;
    if (text == "quantitative") return Impact::Quantitative;
    return std::nullopt;
}

}  // namespace sheetaudit
