#include "sheetaudit/address.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace sheetaudit {

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

bool looks_like_cell(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    if (i == 0 || i > 3 || i == s.size()) return false;
    return std::all_of(s.begin() + i, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string column_to_letters(std::int32_t column) {
    if (column < 1) throw std::invalid_argument("column index must be >= 1");
    std::string out;
    while (column > 0) {
        --column;
        out.push_back(static_cast<char>('A' + column % 26));
        column /= 26;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::optional<std::int32_t> letters_to_column(std::string_view letters) {
    if (letters.empty() || letters.size() > 3) return std::nullopt;
    std::int32_t value = 0;
    for (char c : letters) {
        if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
        value = value * 26 + (std::toupper(static_cast<unsigned char>(c)) - 'A' + 1);
    }
    if (value > kMaxColumn) return std::nullopt;
    return value;
}

bool is_plain_sheet_name(std::string_view name) {
    if (name.empty()) return false;
    char first = name.front();
    if (!std::isalpha(static_cast<unsigned char>(first)) && first != '_') return false;
    if (!std::all_of(name.begin(), name.end(), is_name_char)) return false;
    return !looks_like_cell(name);
}

std::string quote_sheet_name(std::string_view name) {
    if (is_plain_sheet_name(name)) return std::string(name);
    std::string out = "'";
    for (char c : name) {
        if (c == '\'') out.push_back('\'');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

std::string CellAddress::to_a1(bool with_sheet) const {
    std::string out;
    if (with_sheet && !sheet.empty()) {
        out = quote_sheet_name(sheet);
        out.push_back('!');
    }
    out += column_to_letters(column);
    out += std::to_string(row);
    return out;
}

CellAddress CellAddress::parse(std::string_view text, std::string_view default_sheet) {
    CellAddress addr;
    addr.sheet = std::string(default_sheet);
    std::string_view cell = text;
    if (!text.empty() && text.front() == '\'') {
        std::string name;
        std::size_t i = 1;
        for (;; ++i) {
            if (i >= text.size()) throw std::invalid_argument("unterminated quoted sheet name");
            if (text[i] == '\'') {
                if (i + 1 < text.size() && text[i + 1] == '\'') {
                    name.push_back('\'');
                    ++i;
                    continue;
                }
                break;
            }
            name.push_back(text[i]);
        }
        if (i + 1 >= text.size() || text[i + 1] != '!') throw std::invalid_argument("expected '!' after sheet name");
        addr.sheet = std::move(name);
        cell = text.substr(i + 2);
    } else if (auto bang = text.rfind('!'); bang != std::string_view::npos) {
        addr.sheet = std::string(text.substr(0, bang));
        cell = text.substr(bang + 1);
    }

    std::size_t i = 0;
    if (i < cell.size() && cell[i] == '$') ++i;
    std::size_t letters_begin = i;
    while (i < cell.size() && std::isalpha(static_cast<unsigned char>(cell[i]))) ++i;
    auto column = letters_to_column(cell.substr(letters_begin, i - letters_begin));
    if (!column) throw std::invalid_argument("bad column in address '" + std::string(text) + "'");
    if (i < cell.size() && cell[i] == '$') ++i;
    std::size_t digits_begin = i;
    std::int64_t row = 0;
    while (i < cell.size() && std::isdigit(static_cast<unsigned char>(cell[i])) && row <= kMaxRow) {
        row = row * 10 + (cell[i] - '0');
        ++i;
    }
    if (i == digits_begin || i != cell.size() || row < 1 || row > kMaxRow)
        throw std::invalid_argument("bad row in address '" + std::string(text) + "'");
    addr.column = *column;
    addr.row = static_cast<std::int32_t>(row);
    return addr;
}

}  // namespace sheetaudit
