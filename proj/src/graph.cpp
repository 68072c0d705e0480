#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "sheetaudit/errors.hpp"
#include "sheetaudit/graph.hpp"
#include "sheetaudit/workbook.hpp"

namespace sheetaudit {

namespace {

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// Marks nodes on directed cycles (non-trivial SCCs and self-loops). Iterative Tarjan.
void mark_cycles(CellGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [from, to] : g.edges) {
        adj[from].push_back(to);
        if (from == to) g.nodes[from].cyclic = true;
    }

    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> scc_stack;
    std::size_t counter = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        scc_stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, next] = call.back();
            if (next < adj[v].size()) {
                std::size_t w = adj[v][next++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = counter++;
                    scc_stack.push_back(w);
                    on_stack[w] = true;
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<std::size_t> component;
                std::size_t w;
                do {
                    w = scc_stack.back();
                    scc_stack.pop_back();
                    on_stack[w] = false;
                    component.push_back(w);
                } while (w != v);
                if (component.size() > 1)
                    for (std::size_t c : component) g.nodes[c].cyclic = true;
            }
            std::size_t finished = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[finished]);
        }
    }
}

}  // namespace

std::optional<std::size_t> CellGraph::index_of(std::string_view key) const {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<CellAddress> CellGraph::cyclic_cells() const {
    std::vector<CellAddress> out;
    for (const auto& n : nodes) {
        if (n.cyclic) out.push_back(n.address);
    }
    return out;
}

CellGraph cell_graph(const Workbook& workbook) {
    struct Pending {
        CellNode node;
        int group;  // 0 workbook cell, 1 unresolved sheet, 2 out of grid
    };
    std::map<std::string, Pending> nodes;
    std::vector<std::pair<std::string, std::string>> raw_edges;

    auto add_node = [&](CellNode node, int group) {
        auto key = node.key;
        nodes.try_emplace(std::move(key), Pending{std::move(node), group});
    };

    for (const auto& cell : workbook.formula_cells()) {
        add_node({cell.to_a1(), cell, CellRole::Formula, false}, 0);
        const CellContent& content = workbook.content(cell);
        for (const auto& r : resolve_references(*content.ast, cell)) {
            if (!r.in_grid) {
                std::string key = r.describe();
                add_node({key, cell, CellRole::OutOfGrid, false}, 2);
                raw_edges.emplace_back(key, cell.to_a1());
                continue;
            }
            const Sheet* sheet = workbook.find_sheet(r.sheet);
            for (std::int64_t row = r.row0; row <= r.row1; ++row) {
                for (std::int64_t col = r.col0; col <= r.col1; ++col) {
                    CellAddress p{r.sheet, static_cast<std::int32_t>(col), static_cast<std::int32_t>(row)};
                    CellRole role = !sheet                        ? CellRole::Unresolved
                                    : workbook.content(p).is_formula() ? CellRole::Formula
                                                                       : CellRole::Input;
                    add_node({p.to_a1(), p, role, false}, sheet ? 0 : 1);
                    raw_edges.emplace_back(p.to_a1(), cell.to_a1());
                }
            }
        }
    }

    std::vector<Pending> ordered;
    for (auto& [key, p] : nodes) ordered.push_back(std::move(p));
    std::stable_sort(ordered.begin(), ordered.end(), [&](const Pending& a, const Pending& b) {
        if (a.group != b.group) return a.group < b.group;
        if (a.group == 0) return workbook.address_less(a.node.address, b.node.address);
        if (a.group == 1) return a.node.address < b.node.address;
        return a.node.key < b.node.key;
    });

    CellGraph g;
    for (auto& p : ordered) {
        g.index_.emplace(p.node.key, g.nodes.size());
        g.nodes.push_back(std::move(p.node));
    }
    for (const auto& [from, to] : raw_edges) g.edges.emplace_back(g.index_.at(from), g.index_.at(to));
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    mark_cycles(g);
    return g;
}

std::int64_t AreaGraph::total_cell_edges() const {
    std::int64_t total = 0;
    for (const auto& e : edges) total += e.weight;
    for (const auto& n : nodes) total += n.self_dependencies;
    return total;
}

std::vector<std::string> visible_at_level(const ClassHierarchy& h, Level level) {
    std::vector<std::string> ids;
    for (const auto& cls : h.classes(level)) ids.push_back(cls.id);
    return ids;
}

AreaGraph aggregate(const CellGraph& cg, const ClassHierarchy& h, const std::vector<std::string>& visible) {
    std::set<std::string> shown;
    for (const auto& id : visible) {
        if (!h.find(id)) throw ContractError("unknown class id '" + id + "' in visible set");
        shown.insert(id);
    }

    // Owner of every formula node, by node index.
    std::vector<std::string> owner(cg.nodes.size());
    for (std::size_t i = 0; i < cg.nodes.size(); ++i) {
        const CellNode& n = cg.nodes[i];
        if (n.role == CellRole::Formula) {
            auto lineage = h.lineage(n.address);
            if (!lineage) throw ContractError("formula cell missing from hierarchy", n.key);
            int hits = 0;
            for (const auto& id : *lineage) {
                if (shown.count(id)) {
                    owner[i] = id;
                    ++hits;
                }
            }
            if (hits == 0) throw ContractError("visible set does not cover " + n.key, n.key);
            if (hits > 1) throw ContractError("visible set covers " + n.key + " more than once", n.key);
        } else if (n.role == CellRole::Input) {
            owner[i] = "input:" + n.address.sheet;
        }
    }

    // Class nodes: structural, logical, copy; each by rank. Inputs follow in sheet order.
    AreaGraph g;
    std::map<std::string, std::size_t> node_of;
    for (Level level : {Level::Structural, Level::Logical, Level::Copy}) {
        for (const auto& cls : h.classes(level)) {
            if (!shown.count(cls.id)) continue;
            AreaNode n;
            n.id = cls.id;
            n.level = level;
            n.member_count = cls.members.size();
            n.representative = cls.representative();
            node_of[n.id] = g.nodes.size();
            g.nodes.push_back(std::move(n));
        }
    }
    // Cell nodes are in canonical order, so first appearance gives workbook sheet order.
    std::vector<std::string> sheet_order;
    for (const auto& n : cg.nodes) {
        if (n.role != CellRole::Input) continue;
        if (std::find(sheet_order.begin(), sheet_order.end(), n.address.sheet) == sheet_order.end())
            sheet_order.push_back(n.address.sheet);
    }
    for (const auto& sheet : sheet_order) {
        AreaNode n;
        n.id = "input:" + sheet;
        n.input = true;
        n.sheet = sheet;
        node_of[n.id] = g.nodes.size();
        g.nodes.push_back(std::move(n));
    }

    std::map<std::pair<std::size_t, std::size_t>, std::int64_t> weights;
    for (auto [from, to] : cg.edges) {
        if (owner[from].empty() || owner[to].empty()) continue;
        std::size_t a = node_of.at(owner[from]);
        std::size_t b = node_of.at(owner[to]);
        if (a == b) {
            ++g.nodes[a].self_dependencies;
        } else {
            ++weights[{a, b}];
        }
    }
    for (const auto& [key, w] : weights) g.edges.push_back({key.first, key.second, w});
    return g;
}

std::string export_dot(const AreaGraph& g) {
    std::string out = "digraph audit {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n";
    for (const auto& n : g.nodes) {
        std::string label;
        if (n.input) {
            label = "inputs\n" + n.sheet;
        } else {
            label = n.id + "\n" + std::to_string(n.member_count) + (n.member_count == 1 ? " cell" : " cells") + "\n" +
                    n.representative->to_a1();
            if (n.self_dependencies > 0) label += "\n" + std::to_string(n.self_dependencies) + " internal";
        }
        out += "  " + dot_quote(n.id) + " [label=" + dot_quote(label);
        if (n.input) out += ", shape=ellipse";
        out += "];\n";
    }
    for (const auto& e : g.edges) {
        out += "  " + dot_quote(g.nodes[e.from].id) + " -> " + dot_quote(g.nodes[e.to].id);
        if (e.weight > 1) out += " [label=" + dot_quote(std::to_string(e.weight)) + "]";
        out += ";\n";
    }
    out += "}\n";
    return out;
}

std::string export_dot(const CellGraph& g) {
    std::string out = "digraph audit {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n";
    for (const auto& n : g.nodes) {
        out += "  " + dot_quote(n.key);
        std::vector<std::string> attrs;
        switch (n.role) {
            case CellRole::Formula: break;
            case CellRole::Input: attrs.push_back("shape=ellipse"); break;
            case CellRole::Unresolved: attrs.push_back("style=dashed"); break;
            case CellRole::OutOfGrid: attrs.push_back("style=dotted"); break;
        }
        if (n.cyclic) attrs.push_back("color=red");
        if (!attrs.empty()) {
            out += " [";
            for (std::size_t i = 0; i < attrs.size(); ++i) out += (i ? ", " : "") + attrs[i];
            out += "]";
        }
        out += ";\n";
    }
    for (auto [from, to] : g.edges) out += "  " + dot_quote(g.nodes[from].key) + " -> " + dot_quote(g.nodes[to].key) + ";\n";
    out += "}\n";
    return out;
}

std::string to_json(const AreaGraph& g) {
    nlohmann::ordered_json doc;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : g.nodes) {
        nlohmann::ordered_json j;
        j["id"] = n.id;
        j["kind"] = n.input ? "input" : "class";
        if (n.input) {
            j["sheet"] = n.sheet;
        } else {
            j["level"] = to_string(*n.level);
            j["members"] = n.member_count;
            j["representative"] = n.representative->to_a1();
        }
        j["self_dependencies"] = n.self_dependencies;
        doc["nodes"].push_back(std::move(j));
    }
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) {
        doc["edges"].push_back({{"from", g.nodes[e.from].id}, {"to", g.nodes[e.to].id}, {"weight", e.weight}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace sheetaudit
