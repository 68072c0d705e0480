#include <charconv>
#include <string>

#include "sheetaudit/errors.hpp"
#include "sheetaudit/formula.hpp"

namespace sheetaudit {

namespace {

// Binding strength; higher binds tighter. Atoms are 8.
int precedence(const FormulaNode& n) {
    switch (n.kind) {
        case NodeKind::Unary: return n.unary_op == UnaryOp::Negate ? 5 : 7;
        case NodeKind::Binary:
            switch (n.binary_op) {
                case BinaryOp::Concat: return 2;
                case BinaryOp::Add:
                case BinaryOp::Sub: return 3;
                case BinaryOp::Mul:
                case BinaryOp::Div: return 4;
                case BinaryOp::Pow: return 6;
                default: return 1;
            }
        default: return 8;
    }
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

class Renderer {
public:
    explicit Renderer(const CellAddress& origin) : origin_(origin) {}

    void node(const FormulaNode& n) {
        switch (n.kind) {
            case NodeKind::Number: out_ += format_number(n.number); break;
            case NodeKind::String:
                out_.push_back('"');
                for (char c : n.text) {
                    if (c == '"') out_.push_back('"');
                    out_.push_back(c);
                }
                out_.push_back('"');
                break;
            case NodeKind::Bool: out_ += n.boolean ? "TRUE" : "FALSE"; break;
            case NodeKind::Cell: reference(n.ref.start, true); break;
            case NodeKind::Range:
                reference(n.ref.start, true);
                out_.push_back(':');
                reference(n.ref.end, false);
                break;
            case NodeKind::Unary:
                if (n.unary_op == UnaryOp::Negate) {
                    out_.push_back('-');
                    child(n.children[0], 5);
                } else {
                    child(n.children[0], 8);
                    out_.push_back('%');
                }
                break;
            case NodeKind::Binary: {
                int p = precedence(n);
                bool pow = n.binary_op == BinaryOp::Pow;
                child(n.children[0], pow ? 7 : p);
                out_ += to_string(n.binary_op);
                child(n.children[1], pow ? 5 : p + 1);
                break;
            }
            case NodeKind::Call:
                out_ += n.text;
                out_.push_back('(');
                for (std::size_t i = 0; i < n.children.size(); ++i) {
                    if (i) out_.push_back(',');
                    node(n.children[i]);
                }
                out_.push_back(')');
                break;
        }
    }

    std::string take() { return std::move(out_); }

private:
    void child(const FormulaNode& n, int min_precedence) {
        bool parens = precedence(n) < min_precedence;
        if (parens) out_.push_back('(');
        node(n);
        if (parens) out_.push_back(')');
    }

    void reference(const Reference& r, bool with_sheet) {
        std::int64_t col = r.col.resolve(origin_.column);
        std::int64_t row = r.row.resolve(origin_.row);
        if (col < 1 || col > kMaxColumn || row < 1 || row > kMaxRow) {
            throw RenderError("reference with offsets (col " + std::to_string(r.col.value) + ", row " +
                              std::to_string(r.row.value) + ") resolves outside the grid at " + origin_.to_a1());
        }
        if (with_sheet && r.sheet) {
            out_ += quote_sheet_name(*r.sheet);
            out_.push_back('!');
        }
        if (r.col.mode == AxisMode::Absolute) out_.push_back('$');
        out_ += column_to_letters(static_cast<std::int32_t>(col));
        if (r.row.mode == AxisMode::Absolute) out_.push_back('$');
        out_ += std::to_string(row);
    }

    const CellAddress& origin_;
    std::string out_;
};

void dump_axis(std::string& out, char tag, const Axis& a) {
    out.push_back(tag);
    if (a.mode == AxisMode::Relative) {
        out += "[" + std::to_string(a.value) + "]";
    } else {
        out += std::to_string(a.value);
    }
}

void dump_ref(std::string& out, const Reference& r) {
    if (r.sheet) out += quote_sheet_name(*r.sheet) + "!";
    dump_axis(out, 'R', r.row);
    dump_axis(out, 'C', r.col);
}

void dump_node(std::string& out, const FormulaNode& n) {
    switch (n.kind) {
        case NodeKind::Number: out += format_number(n.number); return;
        case NodeKind::String: out += "\"" + n.text + "\""; return;
        case NodeKind::Bool: out += n.boolean ? "TRUE" : "FALSE"; return;
        case NodeKind::Cell: dump_ref(out, n.ref.start); return;
        case NodeKind::Range:
            dump_ref(out, n.ref.start);
            out.push_back(':');
            dump_ref(out, n.ref.end);
            return;
        case NodeKind::Unary: out += "("; out += to_string(n.unary_op); break;
        case NodeKind::Binary: out += "("; out += to_string(n.binary_op); break;
        case NodeKind::Call: out += "(" + n.text; break;
    }
    for (const auto& c : n.children) {
        out.push_back(' ');
        dump_node(out, c);
    }
    out.push_back(')');
}

}  // namespace

std::string render_formula(const FormulaAst& ast, const CellAddress& origin) {
    Renderer r(origin);
    r.node(ast.root);
    return "=" + r.take();
}

std::string dump_ast(const FormulaAst& ast) {
    std::string out;
    dump_node(out, ast.root);
    return out;
}

}  // namespace sheetaudit
