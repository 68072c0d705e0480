#include "sheetaudit/workbook.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sheetaudit/errors.hpp"

namespace sheetaudit {

namespace {

std::string_view trim(std::string_view s) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
           });
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::string_view to_string(ContentKind kind) {
    switch (kind) {
        case ContentKind::Formula: return "Formula";
        case ContentKind::NumberConstant: return "NumberConstant";
        case ContentKind::TextLabel: return "TextLabel";
        case ContentKind::BooleanConstant: return "BooleanConstant";
        case ContentKind::Empty: return "Empty";
    }
    return "Empty";
}

std::optional<double> parse_decimal(std::string_view text) {
    std::string_view s = text;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
    // Shape check first: from_chars would also take "inf", "nan" and hex forms.
    std::size_t i = 0, mantissa_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++mantissa_digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++mantissa_digits;
    }
    if (mantissa_digits == 0) return std::nullopt;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_begin = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == exp_begin) return std::nullopt;
    }
    if (i != s.size()) return std::nullopt;

    std::string_view body = text.front() == '+' ? text.substr(1) : text;
    double value = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc() || ptr != body.data() + body.size()) return std::nullopt;
    return value;
}

ContentKind classify_content(std::string_view raw) {
    if (raw.empty()) return ContentKind::Empty;
    if (raw.front() == '=') return ContentKind::Formula;
    if (parse_decimal(raw)) return ContentKind::NumberConstant;
    if (iequals(raw, "TRUE") || iequals(raw, "FALSE")) return ContentKind::BooleanConstant;
    return ContentKind::TextLabel;
}

CellContent make_content(std::string_view raw, const CellAddress& where) {
    std::string_view text = trim(raw);
    CellContent content;
    content.kind = classify_content(text);
    if (content.kind == ContentKind::Empty) return content;
    content.raw = std::string(text);
    switch (content.kind) {
        case ContentKind::Formula: content.ast = parse_formula(text, where); break;
        case ContentKind::NumberConstant: content.value = *parse_decimal(text); break;
        case ContentKind::BooleanConstant: content.value = iequals(text, "TRUE"); break;
        case ContentKind::TextLabel: content.value = content.raw; break;
        case ContentKind::Empty: break;
    }
    return content;
}

// ---------------------------------------------------------------------------

const CellContent& Sheet::at(GridPos pos) const {
    static const CellContent kEmpty;
    auto it = cells_.find(pos);
    return it == cells_.end() ? kEmpty : it->second;
}

void Sheet::set(GridPos pos, CellContent content) {
    if (content.kind == ContentKind::Empty) {
        if (cells_.erase(pos)) recompute_bounds();
        return;
    }
    cells_.insert_or_assign(pos, std::move(content));
    if (bounds_.empty()) {
        bounds_ = {pos.row, pos.row, pos.col, pos.col};
        return;
    }
    bounds_.min_row = std::min(bounds_.min_row, pos.row);
    bounds_.max_row = std::max(bounds_.max_row, pos.row);
    bounds_.min_col = std::min(bounds_.min_col, pos.col);
    bounds_.max_col = std::max(bounds_.max_col, pos.col);
}

void Sheet::recompute_bounds() {
    bounds_ = {};
    for (const auto& [pos, content] : cells_) {
        if (bounds_.empty()) {
            bounds_ = {pos.row, pos.row, pos.col, pos.col};
            continue;
        }
        bounds_.min_row = std::min(bounds_.min_row, pos.row);
        bounds_.max_row = std::max(bounds_.max_row, pos.row);
        bounds_.min_col = std::min(bounds_.min_col, pos.col);
        bounds_.max_col = std::max(bounds_.max_col, pos.col);
    }
}

std::size_t Sheet::formula_count() const {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(),
                                                  [](const auto& kv) { return kv.second.is_formula(); }));
}

Sheet& Workbook::add_sheet(std::string name) {
    if (name.empty()) throw LoadError("sheet name must not be empty");
    if (index_.count(name)) throw LoadError("duplicate sheet name '" + name + "'", name);
    index_.emplace(name, sheets_.size());
    sheets_.emplace_back(std::move(name));
    return sheets_.back();
}

const Sheet* Workbook::find_sheet(std::string_view name) const {
    auto idx = sheet_index(name);
    return idx ? &sheets_[*idx] : nullptr;
}

std::optional<std::size_t> Workbook::sheet_index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const CellContent& Workbook::content(const CellAddress& addr) const {
    static const CellContent kEmpty;
    const Sheet* sheet = find_sheet(addr.sheet);
    return sheet ? sheet->at(addr.pos()) : kEmpty;
}

bool Workbook::address_less(const CellAddress& a, const CellAddress& b) const {
    auto ia = sheet_index(a.sheet).value_or(sheets_.size());
    auto ib = sheet_index(b.sheet).value_or(sheets_.size());
    if (ia != ib) return ia < ib;
    if (ia == sheets_.size() && a.sheet != b.sheet) return a.sheet < b.sheet;
    if (a.row != b.row) return a.row < b.row;
    return a.column < b.column;
}

std::vector<CellAddress> Workbook::formula_cells() const {
    std::vector<CellAddress> out;
    for (const auto& sheet : sheets_) {
        for (const auto& [pos, content] : sheet.cells()) {
            if (content.is_formula()) out.push_back({sheet.name(), pos.col, pos.row});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Workbook load_fgj(std::string_view json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw LoadError(std::string("malformed FGJ document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("sheets") || !doc["sheets"].is_array())
        throw LoadError("FGJ document needs a \"sheets\" array");

    std::string name = "workbook";
    if (doc.contains("workbook")) {
        if (!doc["workbook"].is_string()) throw LoadError("\"workbook\" must be a string");
        name = doc["workbook"].get<std::string>();
    }
    Workbook wb(name);

    for (const auto& jsheet : doc["sheets"]) {
        if (!jsheet.is_object() || !jsheet.contains("name") || !jsheet["name"].is_string())
            throw LoadError("every sheet needs a string \"name\"");
        std::string sheet_name = jsheet["name"].get<std::string>();
        Sheet& sheet = wb.add_sheet(sheet_name);
        if (!jsheet.contains("cells")) continue;
        if (!jsheet["cells"].is_array()) throw LoadError("\"cells\" must be an array", sheet_name);

        for (const auto& jcell : jsheet["cells"]) {
            std::string addr_text = jcell.is_object() && jcell.contains("addr") && jcell["addr"].is_string()
                                        ? jcell["addr"].get<std::string>()
                                        : std::string("?");
            if (!jcell.is_object() || !jcell.contains("addr") || !jcell["addr"].is_string() ||
                !jcell.contains("content") || !jcell["content"].is_string())
                throw LoadError("cell needs string \"addr\" and \"content\"", sheet_name, addr_text);

            CellAddress addr;
            try {
                addr = CellAddress::parse(addr_text, sheet_name);
            } catch (const std::invalid_argument& e) {
                throw LoadError(sheet_name + "!" + addr_text + ": " + e.what(), sheet_name, addr_text);
            }
            if (addr.sheet != sheet_name)
                throw LoadError("cell address names another sheet", sheet_name, addr_text);
            if (sheet.occupied(addr.pos()))
                throw LoadError("duplicate cell " + addr.to_a1(), sheet_name, addr.to_a1(false));

            CellContent content;
            try {
                content = make_content(jcell["content"].get<std::string>(), addr);
            } catch (const FormulaError& e) {
                throw LoadError(addr.to_a1() + ": formula error at " + std::to_string(e.position()) + ": " + e.what(),
                                sheet_name, addr.to_a1(false));
            }
            sheet.set(addr.pos(), std::move(content));
        }
    }
    return wb;
}

void load_csv_sheet(Workbook& workbook, std::string sheet_name, std::string_view csv_text) {
    auto records = parse_csv(csv_text);
    Sheet& sheet = workbook.add_sheet(sheet_name);
    for (std::size_t r = 0; r < records.size(); ++r) {
        for (std::size_t c = 0; c < records[r].size(); ++c) {
            if (r + 1 > static_cast<std::size_t>(kMaxRow) || c + 1 > static_cast<std::size_t>(kMaxColumn))
                throw LoadError("CSV exceeds the grid", sheet_name);
            CellAddress addr{sheet_name, static_cast<std::int32_t>(c + 1), static_cast<std::int32_t>(r + 1)};
            try {
                sheet.set(addr.pos(), make_content(records[r][c], addr));
            } catch (const FormulaError& e) {
                throw LoadError(addr.to_a1() + ": formula error at " + std::to_string(e.position()) + ": " + e.what(),
                                sheet_name, addr.to_a1(false));
            }
        }
    }
}

Workbook load_workbook(const std::vector<std::filesystem::path>& inputs) {
    if (inputs.empty()) throw LoadError("no input files");
    if (inputs.size() == 1 && inputs.front().extension() == ".json") return load_fgj(read_file(inputs.front()));

    for (const auto& p : inputs) {
        if (p.extension() != ".csv")
            throw LoadError("expected one .json file or a set of .csv files, got '" + p.string() + "'");
    }
    std::string name = inputs.front().parent_path().filename().string();
    Workbook wb(name.empty() ? "workbook" : name);
    for (const auto& p : inputs) load_csv_sheet(wb, p.stem().string(), read_file(p));
    return wb;
}

std::string to_fgj(const Workbook& workbook) {
    nlohmann::ordered_json doc;
    doc["workbook"] = workbook.name();
    doc["sheets"] = nlohmann::ordered_json::array();
    for (const auto& sheet : workbook.sheets()) {
        nlohmann::ordered_json js;
        js["name"] = sheet.name();
        js["cells"] = nlohmann::ordered_json::array();
        for (const auto& [pos, content] : sheet.cells()) {
            CellAddress a{sheet.name(), pos.col, pos.row};
            js["cells"].push_back({{"addr", a.to_a1(false)}, {"content", content.raw}});
        }
        doc["sheets"].push_back(std::move(js));
    }
    return doc.dump(1) + "\n";
}

OccupancyCounts occupancy_counts(const Sheet& sheet) {
    OccupancyCounts c;
    c.cells = sheet.bounds().area();
    c.occupied = static_cast<std::int64_t>(sheet.cells().size());
    c.formulas = static_cast<std::int64_t>(sheet.formula_count());
    c.literals = c.occupied - c.formulas;
    return c;
}

}  // namespace sheetaudit
