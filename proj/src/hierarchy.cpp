#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sheetaudit/equivalence.hpp"
#include "sheetaudit/workbook.hpp"

namespace sheetaudit {

namespace {

char level_letter(Level level) {
    switch (level) {
        case Level::Copy: return 'C';
        case Level::Logical: return 'L';
        case Level::Structural: return 'S';
    }
    return 'C';
}

}  // namespace

const EquivalenceClass* ClassHierarchy::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return nullptr;
    return &classes(it->second.first)[it->second.second];
}

const EquivalenceClass* ClassHierarchy::parent_of(const EquivalenceClass& cls) const {
    return cls.parent ? find(*cls.parent) : nullptr;
}

const EquivalenceClass* ClassHierarchy::class_of(const CellAddress& cell, Level level) const {
    auto it = member_index_.find(cell);
    if (it == member_index_.end()) return nullptr;
    return &classes(level)[it->second[static_cast<std::size_t>(level)]];
}

std::optional<std::array<std::string, 3>> ClassHierarchy::lineage(const CellAddress& cell) const {
    auto it = member_index_.find(cell);
    if (it == member_index_.end()) return std::nullopt;
    std::array<std::string, 3> ids;
    for (Level l : kAllLevels) {
        auto i = static_cast<std::size_t>(l);
        ids[i] = levels_[i][it->second[i]].id;
    }
    return ids;
}

ClassHierarchy partition(const Workbook& workbook) {
    ClassHierarchy h;
    // formula_cells() is already in canonical order, so classes are created in
    // representative order and ids come out stable.
    const auto cells = workbook.formula_cells();
    std::array<std::unordered_map<std::string, std::size_t>, 3> by_key;

    for (const auto& cell : cells) {
        const auto& ast = *workbook.content(cell).ast;
        std::array<std::size_t, 3> slot{};
        for (Level level : kAllLevels) {
            auto li = static_cast<std::size_t>(level);
            Fingerprint fp = fingerprint(ast, level);
            auto [it, inserted] = by_key[li].try_emplace(fp.key, h.levels_[li].size());
            if (inserted) {
                EquivalenceClass cls;
                cls.level = level;
                cls.id = std::string(1, level_letter(level)) + std::to_string(h.levels_[li].size() + 1);
                cls.fingerprint = std::move(fp);
                h.levels_[li].push_back(std::move(cls));
            }
            h.levels_[li][it->second].members.push_back(cell);
            slot[li] = it->second;
        }
        h.member_index_.emplace(cell, slot);
    }

    for (Level level : {Level::Copy, Level::Logical}) {
        auto li = static_cast<std::size_t>(level);
        for (auto& cls : h.levels_[li]) {
            // Abstraction is monotone, so every member agrees on the parent.
            std::size_t parent = h.member_index_.at(cls.representative())[li + 1];
            for (const auto& m : cls.members) {
                if (h.member_index_.at(m)[li + 1] != parent)
                    throw std::logic_error("class " + cls.id + " straddles two parent classes");
            }
            auto& p = h.levels_[li + 1][parent];
            cls.parent = p.id;
            p.children.push_back(cls.id);
        }
    }

    for (Level level : kAllLevels) {
        auto li = static_cast<std::size_t>(level);
        for (std::size_t i = 0; i < h.levels_[li].size(); ++i) h.by_id_.emplace(h.levels_[li][i].id, std::make_pair(level, i));
    }
    return h;
}

std::vector<EquivalenceClass> classes_at_level(const ClassHierarchy& h, Level level) {
    return h.classes(level);
}

std::string ClassHierarchy::to_json() const {
    nlohmann::ordered_json doc;
    doc["formula_cells"] = formula_count();
    nlohmann::ordered_json levels = nlohmann::ordered_json::object();
    for (Level level : kAllLevels) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& cls : classes(level)) {
            nlohmann::ordered_json j;
            j["id"] = cls.id;
            j["level"] = to_string(cls.level);
            j["fingerprint"] = cls.fingerprint.key;
            j["parent"] = cls.parent ? nlohmann::ordered_json(*cls.parent) : nlohmann::ordered_json(nullptr);
            j["children"] = cls.children;
            nlohmann::ordered_json members = nlohmann::ordered_json::array();
            for (const auto& m : cls.members) members.push_back(m.to_a1());
            j["members"] = std::move(members);
            arr.push_back(std::move(j));
        }
        levels[std::string(to_string(level))] = std::move(arr);
    }
    doc["levels"] = std::move(levels);
    return doc.dump(2) + "\n";
}

}  // namespace sheetaudit
