#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sheetaudit {

inline constexpr std::int32_t kMaxColumn = 18278;   // ZZZ
inline constexpr std::int32_t kMaxRow = 1048576;

/// Bijective base-26 column letters: 1 -> "A", 26 -> "Z", 27 -> "AA".
std::string column_to_letters(std::int32_t column);

/// Inverse of column_to_letters, case-insensitive. Returns nullopt for empty
/// input, non-letters, or a value beyond kMaxColumn.
std::optional<std::int32_t> letters_to_column(std::string_view letters);

inline bool in_grid(std::int32_t row, std::int32_t column) {
    return row >= 1 && row <= kMaxRow && column >= 1 && column <= kMaxColumn;
}

/// Row-major position inside one sheet.
struct GridPos {
    std::int32_t row = 1;
    std::int32_t col = 1;

    auto operator<=>(const GridPos&) const = default;
};

/// True when the sheet name can be written without quotes in a reference.
bool is_plain_sheet_name(std::string_view name);

/// Sheet name as it appears before "!" (quoted when necessary).
std::string quote_sheet_name(std::string_view name);

struct CellAddress {
    std::string sheet;
    std::int32_t column = 1;
    std::int32_t row = 1;

    GridPos pos() const { return {row, column}; }

    /// "B2", or "Sheet1!B2" when with_sheet is set.
    std::string to_a1(bool with_sheet = true) const;

    /// Parses "B2", "Sheet1!B2" or "'My Sheet'!B2". $ markers are accepted and
    /// ignored. Sheet-less text takes default_sheet. Throws std::invalid_argument.
    static CellAddress parse(std::string_view text, std::string_view default_sheet = {});

    bool operator==(const CellAddress&) const = default;
    // Sheet name, then row, then column. Canonical workbook order (sheet order
    // first) lives on Workbook::address_less.
    std::strong_ordering operator<=>(const CellAddress& other) const {
        if (auto c = sheet <=> other.sheet; c != 0) return c;
        if (auto c = row <=> other.row; c != 0) return c;
        return column <=> other.column;
    }
};

}  // namespace sheetaudit
