#include <cctype>
#include <string>

#include "sheetaudit/errors.hpp"
#include "sheetaudit/formula.hpp"

// Copy/paste simulation on the A1 text itself. This deliberately does not go
// through the AST, so it can serve as an oracle for the parser's
// reference normalization.

namespace sheetaudit {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_name_char(char c) { return is_alpha(c) || is_digit(c) || c == '_' || c == '.'; }

struct CellToken {
    bool col_abs = false;
    std::string letters;
    bool row_abs = false;
    std::string digits;
    std::size_t length = 0;
};

bool scan_cell(std::string_view s, std::size_t i, CellToken& tok) {
    std::size_t start = i;
    if (i < s.size() && s[i] == '$') tok.col_abs = true, ++i;
    std::size_t l = i;
    while (i < s.size() && is_alpha(s[i])) ++i;
    if (i == l) return false;
    tok.letters = std::string(s.substr(l, i - l));
    if (i < s.size() && s[i] == '$') tok.row_abs = true, ++i;
    std::size_t d = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    if (i == d) return false;
    tok.digits = std::string(s.substr(d, i - d));
    tok.length = i - start;
    return true;
}

}  // namespace

std::string translate_a1(std::string_view text, const CellAddress& from, const CellAddress& to) {
    const std::int64_t dcol = static_cast<std::int64_t>(to.column) - from.column;
    const std::int64_t drow = static_cast<std::int64_t>(to.row) - from.row;
    std::string out;
    out.reserve(text.size() + 8);

    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '"' || c == '\'') {
            // String literal or quoted sheet name; doubled quote escapes.
            std::size_t j = i + 1;
            while (j < text.size()) {
                if (text[j] == c) {
                    if (j + 1 < text.size() && text[j + 1] == c) {
                        j += 2;
                        continue;
                    }
                    break;
                }
                ++j;
            }
            std::size_t end = j < text.size() ? j + 1 : j;
            out.append(text.substr(i, end - i));
            i = end;
            continue;
        }
        if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
            std::size_t j = i;
            while (j < text.size() && (is_digit(text[j]) || text[j] == '.')) ++j;
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && is_digit(text[k])) {
                    j = k;
                    while (j < text.size() && is_digit(text[j])) ++j;
                }
            }
            out.append(text.substr(i, j - i));
            i = j;
            continue;
        }
        if (c == '$' || is_alpha(c) || c == '_') {
            CellToken tok;
            if (scan_cell(text, i, tok)) {
                std::size_t after = i + tok.length;
                std::size_t probe = after;
                while (probe < text.size() && text[probe] == ' ') ++probe;
                bool is_ref = (after >= text.size() || (!is_name_char(text[after]) && text[after] != '!')) &&
                              (probe >= text.size() || text[probe] != '(');
                if (is_ref) {
                    auto column = letters_to_column(tok.letters);
                    std::int64_t row = tok.digits.size() > 7 ? kMaxRow + 1 : std::stoll(tok.digits);
                    if (!column || row < 1 || row > kMaxRow)
                        throw FormulaError(FormulaError::Kind::Range, i, "reference outside the grid");
                    std::int64_t new_col = tok.col_abs ? *column : *column + dcol;
                    std::int64_t new_row = tok.row_abs ? row : row + drow;
                    if (new_col < 1 || new_col > kMaxColumn || new_row < 1 || new_row > kMaxRow)
                        throw RenderError("copying " + from.to_a1() + " to " + to.to_a1() + " moves reference '" +
                                          std::string(text.substr(i, tok.length)) + "' outside the grid");
                    if (tok.col_abs) out.push_back('$');
                    out += column_to_letters(static_cast<std::int32_t>(new_col));
                    if (tok.row_abs) out.push_back('$');
                    out += std::to_string(new_row);
                    i = after;
                    continue;
                }
            }
            if (c == '$') {
                out.push_back(c);
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < text.size() && is_name_char(text[j])) ++j;
            out.append(text.substr(i, j - i));
            i = j;
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

}  // namespace sheetaudit
