#include <charconv>
#include <string>

#include "sheetaudit/equivalence.hpp"

namespace sheetaudit {

namespace {

// Prefix-form serialization. Every node contributes a distinct opening token,
// strings and sheet names are quoted with escapes, so distinct abstracted
// trees cannot collide.
class KeyWriter {
public:
    explicit KeyWriter(Level level) : level_(level) {}

    void node(const FormulaNode& n) {
        switch (n.kind) {
            case NodeKind::Number:
                if (leaf_wildcard()) return out_.push_back('_');
                if (level_ == Level::Logical) {
                    out_ += "n?";
                    return;
                }
                out_ += "n";
                number(n.number);
                return;
            case NodeKind::String:
                if (leaf_wildcard()) return out_.push_back('_');
                if (level_ == Level::Logical) {
                    out_ += "s?";
                    return;
                }
                out_ += "s";
                quoted(n.text, '"');
                return;
            case NodeKind::Bool:
                if (leaf_wildcard()) return out_.push_back('_');
                if (level_ == Level::Logical) {
                    out_ += "b?";
                    return;
                }
                out_ += n.boolean ? "b1" : "b0";
                return;
            case NodeKind::Cell:
                if (leaf_wildcard()) return out_.push_back('_');
                out_ += "@";
                reference(n.ref.start);
                return;
            case NodeKind::Range:
                if (leaf_wildcard()) return out_.push_back('_');
                out_ += "#";
                reference(n.ref.start);
                out_ += ":";
                reference(n.ref.end);
                return;
            case NodeKind::Unary:
                out_ += n.unary_op == UnaryOp::Negate ? "(neg " : "(pct ";
                break;
            case NodeKind::Binary:
                out_ += "(";
                out_ += to_string(n.binary_op);
                out_ += " ";
                break;
            case NodeKind::Call:
                out_ += "(" + n.text + "/" + std::to_string(n.children.size());
                if (!n.children.empty()) out_ += " ";
                break;
        }
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) out_.push_back(' ');
            node(n.children[i]);
        }
        out_.push_back(')');
    }

    std::string take() { return std::move(out_); }

private:
    bool leaf_wildcard() const { return level_ == Level::Structural; }

    void number(double v) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out_.append(buf, ptr);
    }

    void quoted(const std::string& s, char quote) {
        out_.push_back(quote);
        for (char c : s) {
            if (c == quote || c == '\\') out_.push_back('\\');
            out_.push_back(c);
        }
        out_.push_back(quote);
    }

    void axis(const Axis& a) {
        if (a.mode == AxisMode::Relative) {
            out_ += "r" + std::to_string(a.value);
        } else if (level_ == Level::Logical) {
            out_ += "a?";
        } else {
            out_ += "a" + std::to_string(a.value);
        }
    }

    void reference(const Reference& r) {
        if (r.sheet) {
            quoted(*r.sheet, '\'');
            out_.push_back('!');
        }
        out_.push_back('C');
        axis(r.col);
        out_.push_back('R');
        axis(r.row);
    }

    Level level_;
    std::string out_;
};

}  // namespace

std::string_view to_string(Level level) {
    switch (level) {
        case Level::Copy: return "copy";
        case Level::Logical: return "logical";
        case Level::Structural: return "structural";
    }
    return "copy";
}

std::optional<Level> parse_level(std::string_view text) {
    for (Level l : kAllLevels) {
        if (to_string(l) == text) return l;
    }
    return std::nullopt;
}

Fingerprint fingerprint(const FormulaAst& ast, Level level) {
    KeyWriter w(level);
    w.node(ast.root);
    return {level, w.take()};
}

Fingerprint copy_fingerprint(const FormulaAst& ast) { return fingerprint(ast, Level::Copy); }
Fingerprint logical_fingerprint(const FormulaAst& ast) { return fingerprint(ast, Level::Logical); }
Fingerprint structural_fingerprint(const FormulaAst& ast) { return fingerprint(ast, Level::Structural); }

}  // namespace sheetaudit
