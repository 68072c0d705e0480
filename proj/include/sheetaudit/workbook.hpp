#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sheetaudit/address.hpp"
#include "sheetaudit/formula.hpp"

namespace sheetaudit {

enum class ContentKind : std::uint8_t { Formula, NumberConstant, TextLabel, BooleanConstant, Empty };

std::string_view to_string(ContentKind kind);

/// Classifies trimmed cell text. Total: every string maps to a kind.
ContentKind classify_content(std::string_view raw);

/// Parses a decimal number with '.' as separator ("3.5", "-2", "1e3").
std::optional<double> parse_decimal(std::string_view text);

struct CellContent {
    ContentKind kind = ContentKind::Empty;
    std::string raw;
    std::optional<FormulaAst> ast;  // present iff kind == Formula
    std::variant<std::monostate, double, std::string, bool> value;

    bool is_formula() const { return kind == ContentKind::Formula; }
    bool is_empty() const { return kind == ContentKind::Empty; }
    bool is_constant() const { return kind != ContentKind::Formula && kind != ContentKind::Empty; }
};

/// Builds the content of the cell at `where` from its source text (trimmed
/// first). Formulas are parsed; a FormulaError propagates to the caller.
CellContent make_content(std::string_view raw, const CellAddress& where);

struct BoundingBox {
    std::int32_t min_row = 0;
    std::int32_t max_row = 0;
    std::int32_t min_col = 0;
    std::int32_t max_col = 0;

    bool empty() const { return min_row == 0; }
    std::int64_t width() const { return empty() ? 0 : max_col - min_col + 1; }
    std::int64_t height() const { return empty() ? 0 : max_row - min_row + 1; }
    std::int64_t area() const { return width() * height(); }
    bool contains(GridPos p) const {
        return !empty() && p.row >= min_row && p.row <= max_row && p.col >= min_col && p.col <= max_col;
    }
};

class Sheet {
public:
    explicit Sheet(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    const std::map<GridPos, CellContent>& cells() const { return cells_; }
    const BoundingBox& bounds() const { return bounds_; }

    /// Lookups of absent positions yield an Empty content.
    const CellContent& at(GridPos pos) const;
    bool occupied(GridPos pos) const { return cells_.count(pos) != 0; }

    /// Stores non-empty content; storing Empty erases the cell.
    void set(GridPos pos, CellContent content);

    std::size_t formula_count() const;

private:
    void recompute_bounds();

    std::string name_;
    std::map<GridPos, CellContent> cells_;
    BoundingBox bounds_;
};

class Workbook {
public:
    Workbook() = default;
    explicit Workbook(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    const std::vector<Sheet>& sheets() const { return sheets_; }

    /// Appends a sheet. Throws LoadError on a duplicate name.
    Sheet& add_sheet(std::string name);
    Sheet& sheet(std::size_t index) { return sheets_.at(index); }

    const Sheet* find_sheet(std::string_view name) const;
    std::optional<std::size_t> sheet_index(std::string_view name) const;

    const CellContent& content(const CellAddress& addr) const;

    /// Canonical order: sheet position in the workbook, then row, then column.
    bool address_less(const CellAddress& a, const CellAddress& b) const;

    /// Every formula cell in canonical order.
    std::vector<CellAddress> formula_cells() const;

private:
    std::string name_;
    std::vector<Sheet> sheets_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Formula-Grid JSON:
/// {"workbook": name, "sheets": [{"name": s, "cells": [{"addr": "B2", "content": "=A2*2"}]}]}
Workbook load_fgj(std::string_view json_text);

/// One CSV document per sheet. Cell (r, c) of the CSV lands at row r, column c.
void load_csv_sheet(Workbook& workbook, std::string sheet_name, std::string_view csv_text);

/// Splits RFC-4180 text into records of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Loads a single .json FGJ file, or one or more .csv files as a sheet set
/// (sheet name = file stem). Throws LoadError.
Workbook load_workbook(const std::vector<std::filesystem::path>& inputs);

/// Serializes back to FGJ, cells in row-major order per sheet.
std::string to_fgj(const Workbook& workbook);

struct OccupancyCounts {
    std::int64_t cells = 0;  // bounding-box area
    std::int64_t occupied = 0;
    std::int64_t formulas = 0;
    std::int64_t literals = 0;  // numbers, booleans and text labels together

    bool operator==(const OccupancyCounts&) const = default;
};

OccupancyCounts occupancy_counts(const Sheet& sheet);

}  // namespace sheetaudit
