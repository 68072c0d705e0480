#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "sheetaudit/errors.hpp"
#include "sheetaudit/formula.hpp"

namespace sheetaudit {

std::string_view to_string(UnaryOp op) {
    return op == UnaryOp::Negate ? "-" : "%";
}

std::string_view to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "<>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Concat: return "&";
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
    }
    return "?";
}

FormulaNode FormulaNode::make_number(double v) {
    FormulaNode n;
    n.kind = NodeKind::Number;
    n.number = v;
    return n;
}

FormulaNode FormulaNode::make_string(std::string s) {
    FormulaNode n;
    n.kind = NodeKind::String;
    n.text = std::move(s);
    return n;
}

FormulaNode FormulaNode::make_bool(bool b) {
    FormulaNode n;
    n.kind = NodeKind::Bool;
    n.boolean = b;
    return n;
}

FormulaNode FormulaNode::make_cell(Reference r) {
    FormulaNode n;
    n.kind = NodeKind::Cell;
    n.ref.start = std::move(r);
    return n;
}

FormulaNode FormulaNode::make_range(RangeRef r) {
    FormulaNode n;
    n.kind = NodeKind::Range;
    n.ref = std::move(r);
    return n;
}

FormulaNode FormulaNode::make_unary(UnaryOp op, FormulaNode child) {
    FormulaNode n;
    n.kind = NodeKind::Unary;
    n.unary_op = op;
    n.children.push_back(std::move(child));
    return n;
}

FormulaNode FormulaNode::make_binary(BinaryOp op, FormulaNode lhs, FormulaNode rhs) {
    FormulaNode n;
    n.kind = NodeKind::Binary;
    n.binary_op = op;
    n.children.push_back(std::move(lhs));
    n.children.push_back(std::move(rhs));
    return n;
}

FormulaNode FormulaNode::make_call(std::string name, std::vector<FormulaNode> args) {
    FormulaNode n;
    n.kind = NodeKind::Call;
    for (auto& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    n.text = std::move(name);
    n.children = std::move(args);
    return n;
}

bool operator==(const FormulaNode& a, const FormulaNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Number: return a.number == b.number;
        case NodeKind::String: return a.text == b.text;
        case NodeKind::Bool: return a.boolean == b.boolean;
        case NodeKind::Cell: return a.ref.start == b.ref.start;
        case NodeKind::Range: return a.ref == b.ref;
        case NodeKind::Unary: return a.unary_op == b.unary_op && a.children == b.children;
        case NodeKind::Binary: return a.binary_op == b.binary_op && a.children == b.children;
        case NodeKind::Call: return a.text == b.text && a.children == b.children;
    }
    return false;
}

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_name_start(char c) { return is_alpha(c) || c == '_'; }
bool is_name_char(char c) { return is_alpha(c) || is_digit(c) || c == '_' || c == '.'; }

class Parser {
public:
    Parser(std::string_view text, const CellAddress& origin) : text_(text), origin_(origin) {}

    FormulaAst run() {
        if (text_.empty() || text_.front() != '=') fail(0, "formula must start with '='", "=");
        pos_ = 1;
        FormulaAst ast{expression()};
        skip_ws();
        if (pos_ != text_.size()) fail(pos_, "unexpected character '" + std::string(1, text_[pos_]) + "'",
                                       "operator or end of formula");
        return ast;
    }

private:
    [[noreturn]] void fail(std::size_t at, std::string message, std::string expected = {}) const {
        throw FormulaError(FormulaError::Kind::Syntax, at, std::move(message), std::move(expected));
    }

    [[noreturn]] void fail_range(std::size_t at, std::string message) const {
        throw FormulaError(FormulaError::Kind::Range, at, std::move(message));
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                       text_[pos_] == '\r'))
            ++pos_;
    }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    bool accept(char c) {
        skip_ws();
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    FormulaNode expression() { return comparison(); }

    FormulaNode comparison() {
        FormulaNode lhs = concatenation();
        for (;;) {
            skip_ws();
            BinaryOp op;
            std::size_t len = 1;
            if (peek() == '<' && peek(1) == '>') op = BinaryOp::Ne, len = 2;
            else if (peek() == '<' && peek(1) == '=') op = BinaryOp::Le, len = 2;
            else if (peek() == '>' && peek(1) == '=') op = BinaryOp::Ge, len = 2;
            else if (peek() == '<') op = BinaryOp::Lt;
            else if (peek() == '>') op = BinaryOp::Gt;
            else if (peek() == '=') op = BinaryOp::Eq;
            else return lhs;
            pos_ += len;
            lhs = FormulaNode::make_binary(op, std::move(lhs), concatenation());
        }
    }

    FormulaNode concatenation() {
        FormulaNode lhs = additive();
        while (accept('&')) lhs = FormulaNode::make_binary(BinaryOp::Concat, std::move(lhs), additive());
        return lhs;
    }

    FormulaNode additive() {
        FormulaNode lhs = multiplicative();
        for (;;) {
            if (accept('+')) lhs = FormulaNode::make_binary(BinaryOp::Add, std::move(lhs), multiplicative());
            else if (accept('-')) lhs = FormulaNode::make_binary(BinaryOp::Sub, std::move(lhs), multiplicative());
            else return lhs;
        }
    }

    FormulaNode multiplicative() {
        FormulaNode lhs = unary();
        for (;;) {
            if (accept('*')) lhs = FormulaNode::make_binary(BinaryOp::Mul, std::move(lhs), unary());
            else if (accept('/')) lhs = FormulaNode::make_binary(BinaryOp::Div, std::move(lhs), unary());
            else return lhs;
        }
    }

    FormulaNode unary() {
        if (accept('-')) return FormulaNode::make_unary(UnaryOp::Negate, unary());
        return power();
    }

    FormulaNode power() {
        FormulaNode base = postfix();
        if (accept('^')) return FormulaNode::make_binary(BinaryOp::Pow, std::move(base), unary());
        return base;
    }

    FormulaNode postfix() {
        FormulaNode operand = atom();
        if (accept('%')) return FormulaNode::make_unary(UnaryOp::Percent, std::move(operand));
        return operand;
    }

    FormulaNode atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail(pos_, "unexpected end of formula", "operand");
        char c = peek();
        if (is_digit(c) || (c == '.' && is_digit(peek(1)))) return number();
        if (c == '"') return string_literal();
        if (c == '(') {
            ++pos_;
            FormulaNode inner = expression();
            if (!accept(')')) fail(pos_, "missing ')'", ")");
            return inner;
        }
        if (c == '\'') {
            std::string sheet = quoted_sheet();
            return reference_or_range(std::move(sheet));
        }
        if (c == '$') return reference_or_range(std::nullopt);
        if (is_name_start(c)) return name_or_reference();
        fail(pos_, "unexpected character '" + std::string(1, c) + "'", "operand");
    }

    FormulaNode number() {
        std::size_t begin = pos_;
        while (is_digit(peek())) ++pos_;
        if (peek() == '.') {
            ++pos_;
            while (is_digit(peek())) ++pos_;
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && is_digit(peek(2))))) {
            pos_ += 2;
            while (is_digit(peek())) ++pos_;
        }
        double value = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + begin, text_.data() + pos_, value);
        if (ec == std::errc::result_out_of_range || !std::isfinite(value))
            fail_range(begin, "number literal out of range");
        if (ec != std::errc() || ptr != text_.data() + pos_) fail(begin, "malformed number", "number");
        return FormulaNode::make_number(value);
    }

    FormulaNode string_literal() {
        std::size_t begin = pos_;
        ++pos_;
        std::string out;
        for (;;) {
            if (pos_ >= text_.size()) fail(begin, "unterminated string literal", "\"");
            char c = text_[pos_++];
            if (c == '"') {
                if (peek() == '"') {
                    out.push_back('"');
                    ++pos_;
                    continue;
                }
                break;
            }
            out.push_back(c);
        }
        return FormulaNode::make_string(std::move(out));
    }

    std::string quoted_sheet() {
        std::size_t begin = pos_;
        ++pos_;
        std::string name;
        for (;;) {
            if (pos_ >= text_.size()) fail(begin, "unterminated sheet name", "'");
            char c = text_[pos_++];
            if (c == '\'') {
                if (peek() == '\'') {
                    name.push_back('\'');
                    ++pos_;
                    continue;
                }
                break;
            }
            name.push_back(c);
        }
        if (name.empty()) fail(begin, "empty sheet name", "sheet name");
        if (peek() != '!') fail(pos_, "expected '!' after sheet name", "!");
        ++pos_;
        return name;
    }

    // Length of a `$?letters$?digits` match at pos_, or 0.
    std::size_t match_cell_pattern() const {
        std::size_t i = pos_;
        if (i < text_.size() && text_[i] == '$') ++i;
        std::size_t letters = i;
        while (i < text_.size() && is_alpha(text_[i])) ++i;
        if (i == letters) return 0;
        if (i < text_.size() && text_[i] == '$') ++i;
        std::size_t digits = i;
        while (i < text_.size() && is_digit(text_[i])) ++i;
        if (i == digits) return 0;
        return i - pos_;
    }

    FormulaNode name_or_reference() {
        std::size_t begin = pos_;
        if (std::size_t len = match_cell_pattern()) {
            char after = begin + len < text_.size() ? text_[begin + len] : '\0';
            std::size_t probe = begin + len;
            while (probe < text_.size() && text_[probe] == ' ') ++probe;
            char after_ws = probe < text_.size() ? text_[probe] : '\0';
            if (!is_name_char(after) && after != '!' && after_ws != '(') return reference_or_range(std::nullopt);
        }

        while (is_name_char(peek())) ++pos_;
        std::string name(text_.substr(begin, pos_ - begin));
        if (peek() == '!') {
            ++pos_;
            return reference_or_range(std::move(name));
        }
        skip_ws();
        if (peek() == '(') {
            ++pos_;
            return call(std::move(name));
        }
        std::string upper = name;
        for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (upper == "TRUE") return FormulaNode::make_bool(true);
        if (upper == "FALSE") return FormulaNode::make_bool(false);
        fail(begin, "unknown name '" + name + "'", "cell reference, function call or literal");
    }

    FormulaNode call(std::string name) {
        std::vector<FormulaNode> args;
        if (accept(')')) return FormulaNode::make_call(std::move(name), std::move(args));
        for (;;) {
            args.push_back(expression());
            if (accept(',')) continue;
            if (accept(')')) break;
            fail(pos_, "expected ',' or ')' in argument list", ", or )");
        }
        return FormulaNode::make_call(std::move(name), std::move(args));
    }

    Reference cell_reference(std::optional<std::string> sheet) {
        std::size_t begin = pos_;
        if (match_cell_pattern() == 0) fail(pos_, "expected a cell reference", "cell reference");
        Reference ref;
        ref.sheet = std::move(sheet);

        bool col_abs = peek() == '$';
        if (col_abs) ++pos_;
        std::size_t letters = pos_;
        while (is_alpha(peek())) ++pos_;
        auto column = letters_to_column(text_.substr(letters, pos_ - letters));
        if (!column) fail_range(begin, "column beyond ZZZ");

        bool row_abs = peek() == '$';
        if (row_abs) ++pos_;
        std::int64_t row = 0;
        while (is_digit(peek())) {
            if (row <= kMaxRow) row = row * 10 + (peek() - '0');
            ++pos_;
        }
        if (row < 1 || row > kMaxRow) fail_range(begin, "row outside 1..1048576");
        if (is_name_char(peek())) fail(pos_, "unexpected character after cell reference", "operator");

        ref.col = col_abs ? Axis::absolute(*column) : Axis::relative(*column - origin_.column);
        ref.row = row_abs ? Axis::absolute(static_cast<std::int32_t>(row))
                          : Axis::relative(static_cast<std::int32_t>(row) - origin_.row);
        return ref;
    }

    FormulaNode reference_or_range(std::optional<std::string> sheet) {
        Reference start = cell_reference(sheet);
        if (!accept(':')) return FormulaNode::make_cell(std::move(start));

        skip_ws();
        std::size_t end_begin = pos_;
        std::optional<std::string> end_sheet;
        if (peek() == '\'') {
            end_sheet = quoted_sheet();
        } else if (is_name_start(peek())) {
            // A name followed by '!' qualifies the end point.
            std::size_t i = pos_;
            while (i < text_.size() && is_name_char(text_[i])) ++i;
            if (i > pos_ && i < text_.size() && text_[i] == '!') {
                end_sheet = std::string(text_.substr(pos_, i - pos_));
                pos_ = i + 1;
            }
        }
        if (end_sheet && end_sheet != sheet) fail(end_begin, "range end names a different sheet", "cell reference");
        Reference end = cell_reference(sheet);
        return FormulaNode::make_range({std::move(start), std::move(end)});
    }

    std::string_view text_;
    const CellAddress& origin_;
    std::size_t pos_ = 0;
};

}  // namespace

FormulaAst parse_formula(std::string_view text, const CellAddress& origin) {
    return Parser(text, origin).run();
}

}  // namespace sheetaudit
