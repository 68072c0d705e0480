#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sheetaudit/address.hpp"
#include "sheetaudit/equivalence.hpp"

namespace sheetaudit {

class Workbook;

enum class CellRole : std::uint8_t {
    Formula,
    Input,       // constant, label or empty cell on a known sheet
    Unresolved,  // cell on a sheet the workbook does not have
    OutOfGrid,   // relative reference that resolves off the grid
};

struct CellNode {
    std::string key;  // "Sheet1!B2", or a #REF description for OutOfGrid
    CellAddress address;
    CellRole role = CellRole::Input;
    bool cyclic = false;
};

/// Cell-level data flow. Edges run precedent -> dependent.
struct CellGraph {
    std::vector<CellNode> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // sorted, unique

    std::optional<std::size_t> index_of(std::string_view key) const;
    std::vector<CellAddress> cyclic_cells() const;

private:
    friend CellGraph cell_graph(const Workbook& workbook);
    std::unordered_map<std::string, std::size_t> index_;
};

CellGraph cell_graph(const Workbook& workbook);

struct AreaNode {
    std::string id;  // class id, or "input:<sheet>"
    bool input = false;
    std::string sheet;                          // input nodes
    std::optional<Level> level;                 // class nodes
    std::size_t member_count = 0;               // class nodes
    std::optional<CellAddress> representative;  // class nodes
    std::int64_t self_dependencies = 0;         // dropped intra-class cell edges
};

struct AreaEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::int64_t weight = 0;  // number of underlying cell edges
};

struct AreaGraph {
    std::vector<AreaNode> nodes;
    std::vector<AreaEdge> edges;  // sorted by (from, to)

    /// Weight sum plus self-dependency counts.
    std::int64_t total_cell_edges() const;
};

/// Every class id at one level: the visible set of a browser showing that level.
std::vector<std::string> visible_at_level(const ClassHierarchy& h, Level level);

/// Maps cell edges onto the visible classes. Every formula cell must have
/// exactly one of its three classes in `visible`; otherwise ContractError
/// naming the cell. Edges from unresolved or out-of-grid precedents are left out.
AreaGraph aggregate(const CellGraph& cg, const ClassHierarchy& h, const std::vector<std::string>& visible);

std::string export_dot(const AreaGraph& g);
std::string export_dot(const CellGraph& g);

std::string to_json(const AreaGraph& g);

}  // namespace sheetaudit
