#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "sheetaudit/errors.hpp"
#include "sheetaudit/report.hpp"
#include "sheetaudit/workbook.hpp"

namespace sheetaudit {

namespace {

using ojson = nlohmann::ordered_json;

std::int64_t pow10(int n) {
    std::int64_t p = 1;
    while (n-- > 0) p *= 10;
    return p;
}

constexpr std::size_t kImpacts = 2;

std::size_t category_index(Category c) {
    for (std::size_t i = 0; i < kAllCategories.size(); ++i) {
        if (kAllCategories[i] == c) return i;
    }
    return kAllCategories.size() - 1;
}

// ---------------------------------------------------------------------------
// Fixed-width text tables

struct Table {
    std::string title;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> body;

    std::string render() const {
        std::vector<std::size_t> width(header.size(), 0);
        auto measure = [&](const std::vector<std::string>& row) {
            for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
        };
        measure(header);
        for (const auto& row : body) measure(row);

        auto line = [&](const std::vector<std::string>& row) {
            std::string out;
            for (std::size_t i = 0; i < row.size(); ++i) {
                std::string pad(width[i] - row[i].size(), ' ');
                if (i == 0) {
                    out += row[i] + pad;
                } else {
                    out += "  " + pad + row[i];
                }
            }
            while (!out.empty() && out.back() == ' ') out.pop_back();
            return out + "\n";
        };

        std::string out = title + "\n";
        out += line(header);
        std::size_t total = 0;
        for (std::size_t w : width) total += w;
        out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + "\n";
        for (const auto& row : body) out += line(row);
        return out;
    }
};

std::string pct(const std::optional<Ratio>& r, int decimals) {
    return r ? r->percent_text(decimals) + "%" : "-";
}

std::string num(const std::optional<Ratio>& r, int decimals) { return r ? r->value_text(decimals) : "-"; }

ojson ratio_json(const std::optional<Ratio>& r, int decimals, bool percent) {
    if (!r) return nullptr;
    ojson j;
    j["num"] = r->num;
    j["den"] = r->den;
    j["value"] = percent ? r->percent() : r->value();
    j["display"] = percent ? r->percent_text(decimals) + "%" : r->value_text(decimals);
    return j;
}

ojson count_row_json(const CountRow& r) {
    ojson j;
    j["name"] = r.name;
    j["cells"] = r.cells;
    j["occupied"] = r.occupied;
    j["formulas"] = r.formulas;
    j["literals"] = r.literals;
    j["ce_count"] = r.ce_count;
    j["occupied_pct"] = ratio_json(r.occupied_pct(), 1, true);
    j["formula_pct"] = ratio_json(r.formula_pct(), 1, true);
    j["literal_pct"] = ratio_json(r.literal_pct(), 1, true);
    j["ce_to_formula"] = ratio_json(r.ce_to_formula(), 1, true);
    j["avg_class_size"] = ratio_json(r.avg_class_size(), 1, false);
    return j;
}

ojson split_json(const Split& s) { return {{"classes", s.classes}, {"errors", s.errors}}; }

ojson error_row_json(const ErrorRow& r) {
    ojson j;
    j["name"] = r.name;
    j["error_classes"] = r.total.classes;
    j["errors"] = r.total.errors;
    j["by_impact"] = {{"qualitative", split_json(r.by_impact[0])}, {"quantitative", split_json(r.by_impact[1])}};
    if (r.by_category) {
        ojson cats;
        for (std::size_t i = 0; i < kAllCategories.size(); ++i)
            cats[std::string(to_string(kAllCategories[i]))] = split_json((*r.by_category)[i]);
        j["by_category"] = std::move(cats);
    } else {
        j["by_category"] = nullptr;
    }
    j["ce_count"] = r.ce_count;
    j["formulas"] = r.formulas;
    j["occupied"] = r.occupied;
    j["error_classes_per_ce"] = ratio_json(r.classes_per_ce(), 1, true);
    j["errors_per_formula"] = ratio_json(r.errors_per_formula(), 2, true);
    j["errors_per_occupied"] = ratio_json(r.errors_per_occupied(), 2, true);
    return j;
}

ojson finding_report_json(const Finding& f) {
    ojson j;
    j["id"] = f.id;
    j["category"] = to_string(f.category);
    j["location"] = f.location.to_a1();
    j["class_ids"] = f.class_ids;
    j["run"] = f.run;
    j["description"] = f.description;
    j["status"] = to_string(f.status);
    return j;
}

std::string emit_json(const AuditMetrics& metrics, const ErrorStatistics& stats, const std::vector<Finding>& findings) {
    ojson doc;
    doc["workbook"] = metrics.workbook;
    doc["sheets"] = ojson::array();
    for (const auto& r : metrics.rows) doc["sheets"].push_back(count_row_json(r));
    doc["metrics"] = count_row_json(metrics.total);
    ojson es;
    es["rows"] = ojson::array();
    for (const auto& r : stats.rows) es["rows"].push_back(error_row_json(r));
    es["total"] = error_row_json(stats.total);
    es["consistency"] = stats.check_consistency();
    doc["error_statistics"] = std::move(es);
    doc["findings"] = ojson::array();
    for (const auto& f : findings) doc["findings"].push_back(finding_report_json(f));
    return doc.dump(2) + "\n";
}

std::string emit_text(const AuditMetrics& metrics, const ErrorStatistics& stats, const std::vector<Finding>& findings) {
    const std::string& label = metrics.row_label;
    std::string out = "Audit report: " + metrics.workbook + "\n\n";

    // Error rows align with metric rows by position; a missing row shows zeros.
    auto error_row = [&](std::size_t i) -> ErrorRow {
        if (i < stats.rows.size()) return stats.rows[i];
        return {};
    };

    Table t1{"Error distribution, absolute",
             {label, "#Cells", "#Occupied", "#Formula", "#Literals", "#CE", "#Error Classes", "#Errors"},
             {}};
    auto t1_row = [&](const CountRow& r, const ErrorRow& e) {
        t1.body.push_back({r.name, std::to_string(r.cells), std::to_string(r.occupied), std::to_string(r.formulas),
                           std::to_string(r.literals), std::to_string(r.ce_count), std::to_string(e.total.classes),
                           std::to_string(e.total.errors)});
    };
    for (std::size_t i = 0; i < metrics.rows.size(); ++i) t1_row(metrics.rows[i], error_row(i));
    t1_row(metrics.total, stats.total);
    out += t1.render() + "\n";

    Table t2{"Error distribution, relative (#Errors relative to occupied cells)",
             {label, "#Cells", "#Occ.", "#Formula", "#Literals", "CE/Formula", "Avg class size", "#Error Classes",
              "#Errors"},
             {}};
    auto t2_row = [&](const CountRow& r, const ErrorRow& e) {
        t2.body.push_back({r.name, std::to_string(r.cells), pct(r.occupied_pct(), 1), pct(r.formula_pct(), 1),
                           pct(r.literal_pct(), 1), pct(r.ce_to_formula(), 1), num(r.avg_class_size(), 1),
                           std::to_string(e.total.classes), pct(e.errors_per_occupied(), 2)});
    };
    for (std::size_t i = 0; i < metrics.rows.size(); ++i) t2_row(metrics.rows[i], error_row(i));
    t2_row(metrics.total, stats.total);
    out += t2.render() + "\n";

    Table t3{"Error classification into qualitative and quantitative errors",
             {label, "Category", "Error Classes", "Errors"},
             {}};
    auto t3_rows = [&](const ErrorRow& e) {
        t3.body.push_back({e.name, "Qualitative", std::to_string(e.by_impact[0].classes),
                           std::to_string(e.by_impact[0].errors)});
        t3.body.push_back(
            {"", "Quantitative", std::to_string(e.by_impact[1].classes), std::to_string(e.by_impact[1].errors)});
    };
    for (const auto& e : stats.rows) t3_rows(e);
    t3_rows(stats.total);
    out += t3.render() + "\n";

    Table t4{"Error distribution by error category", {"Error Category", "Error Classes", "Errors"}, {}};
    if (stats.total.by_category) {
        for (std::size_t i = 0; i < kAllCategories.size(); ++i) {
            const Split& s = (*stats.total.by_category)[i];
            t4.body.push_back(
                {std::string(to_string(kAllCategories[i])), std::to_string(s.classes), std::to_string(s.errors)});
        }
    }
    out += t4.render() + "\n";

    Table t5{"Error class distribution, relative to copy-equivalence classes",
             {label, "#Formula", "#CE", "#Error Classes", "CE/Formula", "Error Classes / CE", "Errors / Formula"},
             {}};
    auto t5_row = [&](const ErrorRow& e) {
        t5.body.push_back({e.name, std::to_string(e.formulas), std::to_string(e.ce_count),
                           std::to_string(e.total.classes), pct(ratio(e.ce_count, e.formulas), 1),
                           pct(e.classes_per_ce(), 1), pct(e.errors_per_formula(), 2)});
    };
    for (const auto& e : stats.rows) t5_row(e);
    t5_row(stats.total);
    out += t5.render();

    auto notes = metrics.check_consistency();
    for (auto& n : stats.check_consistency()) notes.push_back(std::move(n));
    if (!notes.empty()) {
        out += "\nConsistency notes\n";
        for (const auto& n : notes) out += "  " + n + "\n";
    }

    out += "\nFindings (" + std::to_string(findings.size()) + ")\n";
    for (const auto& f : findings) {
        out += "  " + f.id + "  " + f.location.to_a1() + "  " + std::string(to_string(f.category)) + "  " +
               std::string(to_string(f.status)) + "\n    " + f.description + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Count injection

std::int64_t get_count(const ojson& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw LoadError(where + ": missing \"" + key + "\"");
    const ojson& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw LoadError(where + ": \"" + key + "\" must be a non-negative integer");
    return v.get<std::int64_t>();
}

Split get_split(const ojson& j, const std::string& where) {
    return {get_count(j, "classes", where), get_count(j, "errors", where)};
}

std::array<Split, 2> get_impact(const ojson& j, const std::string& where) {
    return {get_split(j.at("qualitative"), where + " qualitative"),
            get_split(j.at("quantitative"), where + " quantitative")};
}

std::array<Split, 5> get_categories(const ojson& j, const std::string& where) {
    std::array<Split, 5> out{};
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto c = parse_category(it.key());
        if (!c) throw LoadError(where + ": unknown category \"" + it.key() + "\"");
        out[category_index(*c)] = get_split(it.value(), where + " " + it.key());
    }
    return out;
}

}  // namespace

std::string round_half_up(std::int64_t num, std::int64_t den, int decimals, std::int64_t scale) {
    if (den <= 0 || num < 0) throw std::invalid_argument("round_half_up needs num >= 0 and den > 0");
    const std::int64_t unit = pow10(decimals);
    const __int128 scaled = static_cast<__int128>(num) * scale * unit;
    const auto q = static_cast<std::int64_t>((2 * scaled + den) / (2 * static_cast<__int128>(den)));
    std::string whole = std::to_string(q / unit);
    if (decimals == 0) return whole;
    std::string frac = std::to_string(q % unit);
    return whole + "." + std::string(static_cast<std::size_t>(decimals) - frac.size(), '0') + frac;
}

std::string Ratio::percent_text(int decimals) const { return round_half_up(num, den, decimals, 100); }
std::string Ratio::value_text(int decimals) const { return round_half_up(num, den, decimals, 1); }

std::optional<Ratio> ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    return Ratio{num, den};
}

std::vector<std::string> AuditMetrics::check_consistency() const {
    std::vector<std::string> out;
    CountRow sum;
    auto check_row = [&](const CountRow& r) {
        if (r.formulas + r.literals != r.occupied)
            out.push_back(r.name + ": formulas + literals (" + std::to_string(r.formulas + r.literals) +
                          ") != occupied (" + std::to_string(r.occupied) + ")");
        if (r.occupied > r.cells)
            out.push_back(r.name + ": occupied exceeds cells");
    };
    for (const auto& r : rows) {
        check_row(r);
        sum.cells += r.cells;
        sum.occupied += r.occupied;
        sum.formulas += r.formulas;
        sum.literals += r.literals;
    }
    check_row(total);
    if (!rows.empty() && (sum.cells != total.cells || sum.occupied != total.occupied ||
                          sum.formulas != total.formulas || sum.literals != total.literals))
        out.push_back(total.name + ": total counts differ from the sum of the rows");
    return out;
}

std::vector<std::string> ErrorStatistics::check_consistency() const {
    std::vector<std::string> out;
    auto check_row = [&](const ErrorRow& r) {
        Split impact{r.by_impact[0].classes + r.by_impact[1].classes, r.by_impact[0].errors + r.by_impact[1].errors};
        if (impact.classes != r.total.classes)
            out.push_back(r.name + ": impact split has " + std::to_string(impact.classes) + " error classes, total is " +
                          std::to_string(r.total.classes));
        if (impact.errors != r.total.errors)
            out.push_back(r.name + ": impact split has " + std::to_string(impact.errors) + " errors, total is " +
                          std::to_string(r.total.errors));
        if (r.by_category) {
            Split cats;
            for (const Split& s : *r.by_category) {
                cats.classes += s.classes;
                cats.errors += s.errors;
            }
            if (cats.classes != r.total.classes)
                out.push_back(r.name + ": category split has " + std::to_string(cats.classes) +
                              " error classes, total is " + std::to_string(r.total.classes));
            if (cats.errors != r.total.errors)
                out.push_back(r.name + ": category split has " + std::to_string(cats.errors) + " errors, total is " +
                              std::to_string(r.total.errors));
        }
        if (r.total.errors < r.total.classes) out.push_back(r.name + ": fewer errors than error classes");
    };
    std::int64_t row_errors = 0;
    for (const auto& r : rows) {
        check_row(r);
        row_errors += r.total.errors;
    }
    check_row(total);
    if (!rows.empty() && row_errors != total.total.errors)
        out.push_back(total.name + ": rows hold " + std::to_string(row_errors) + " errors, total is " +
                      std::to_string(total.total.errors));
    return out;
}

AuditMetrics compute_metrics(const Workbook& workbook, const ClassHierarchy& h) {
    AuditMetrics m;
    m.workbook = workbook.name();
    m.total.name = workbook.name().empty() ? "Total" : workbook.name();
    std::map<std::string, std::int64_t> ce_per_sheet;
    for (const auto& cls : h.classes(Level::Copy)) {
        std::set<std::string> sheets;
        for (const auto& member : cls.members) sheets.insert(member.sheet);
        for (const auto& s : sheets) ++ce_per_sheet[s];
    }
    for (const auto& sheet : workbook.sheets()) {
        OccupancyCounts c = occupancy_counts(sheet);
        CountRow r{sheet.name(), c.cells, c.occupied, c.formulas, c.literals, ce_per_sheet[sheet.name()]};
        m.total.cells += r.cells;
        m.total.occupied += r.occupied;
        m.total.formulas += r.formulas;
        m.total.literals += r.literals;
        m.rows.push_back(std::move(r));
    }
    m.total.ce_count = static_cast<std::int64_t>(h.classes(Level::Copy).size());
    return m;
}

ErrorStatistics compute_error_statistics(const std::vector<ErrorRecord>& errors, const ClassHierarchy& /*h*/,
                                         const AuditMetrics& metrics) {
    // Accumulates records into one row; first record of a class fixes its impact and category.
    struct Acc {
        ErrorRow row;
        std::set<std::string> seen;
        void add(const ErrorRecord& rec) {
            const auto i = static_cast<std::size_t>(rec.impact);
            const auto c = category_index(rec.category);
            ++row.total.errors;
            ++row.by_impact[i].errors;
            ++(*row.by_category)[c].errors;
            if (seen.insert(rec.error_class_key).second) {
                ++row.total.classes;
                ++row.by_impact[i].classes;
                ++(*row.by_category)[c].classes;
            }
        }
    };
    auto make = [](const CountRow& r) {
        Acc a;
        a.row.name = r.name;
        a.row.by_category.emplace();
        a.row.ce_count = r.ce_count;
        a.row.formulas = r.formulas;
        a.row.occupied = r.occupied;
        return a;
    };

    std::vector<Acc> rows;
    std::map<std::string, std::size_t> row_of;
    for (const auto& r : metrics.rows) {
        row_of[r.name] = rows.size();
        rows.push_back(make(r));
    }
    Acc total = make(metrics.total);
    for (const auto& rec : errors) {
        total.add(rec);
        if (auto it = row_of.find(rec.location.sheet); it != row_of.end()) rows[it->second].add(rec);
    }

    ErrorStatistics s;
    for (auto& a : rows) s.rows.push_back(std::move(a.row));
    s.total = std::move(total.row);
    return s;
}

InjectedStudy inject_counts(std::string_view json_text) {
    ojson doc;
    try {
        doc = ojson::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("count file is not valid JSON: ") + e.what());
    }
    try {
        InjectedStudy study;
        study.metrics.workbook = doc.value("name", std::string("study"));
        study.metrics.row_label = "Workbook";
        study.metrics.total.name = "Total";
        study.errors.total.name = "Total";

        ErrorRow summed;
        for (const auto& w : doc.at("workbooks")) {
            const std::string name = w.at("name").get<std::string>();
            CountRow r{name,
                       get_count(w, "cells", name),
                       get_count(w, "occupied", name),
                       get_count(w, "formulas", name),
                       get_count(w, "literals", name),
                       get_count(w, "ce", name)};
            study.metrics.total.cells += r.cells;
            study.metrics.total.occupied += r.occupied;
            study.metrics.total.formulas += r.formulas;
            study.metrics.total.literals += r.literals;
            study.metrics.total.ce_count += r.ce_count;

            ErrorRow e;
            e.name = name;
            e.formulas = r.formulas;
            e.occupied = r.occupied;
            e.ce_count = r.ce_count;
            if (w.contains("errors")) {
                const ojson& ej = w.at("errors");
                if (ej.contains("ce")) e.ce_count = get_count(ej, "ce", name);
                e.total = {get_count(ej, "error_classes", name), get_count(ej, "errors", name)};
                if (ej.contains("impact")) e.by_impact = get_impact(ej.at("impact"), name);
                if (ej.contains("category")) e.by_category = get_categories(ej.at("category"), name);
            }
            summed.total.classes += e.total.classes;
            summed.total.errors += e.total.errors;
            for (std::size_t i = 0; i < kImpacts; ++i) {
                summed.by_impact[i].classes += e.by_impact[i].classes;
                summed.by_impact[i].errors += e.by_impact[i].errors;
            }
            study.metrics.rows.push_back(std::move(r));
            study.errors.rows.push_back(std::move(e));
        }

        ErrorRow& t = study.errors.total;
        t.formulas = study.metrics.total.formulas;
        t.occupied = study.metrics.total.occupied;
        t.ce_count = study.metrics.total.ce_count;
        t.total = summed.total;
        t.by_impact = summed.by_impact;
        if (doc.contains("total")) {
            const ojson& tj = doc.at("total");
            if (tj.contains("ce")) t.ce_count = get_count(tj, "ce", "total");
            if (tj.contains("error_classes")) t.total.classes = get_count(tj, "error_classes", "total");
            if (tj.contains("errors")) t.total.errors = get_count(tj, "errors", "total");
            if (tj.contains("impact")) t.by_impact = get_impact(tj.at("impact"), "total");
            if (tj.contains("category")) t.by_category = get_categories(tj.at("category"), "total");
        }
        return study;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("count file has an unexpected shape: ") + e.what());
    }
}

std::string emit_report(const AuditMetrics& metrics, const ErrorStatistics& stats, const std::vector<Finding>& findings,
                        std::string_view format) {
    if (format == "json") return emit_json(metrics, stats, findings);
    if (format == "text") return emit_text(metrics, stats, findings);
    throw UsageError("unknown report format '" + std::string(format) + "' (expected text or json)");
}

}  // namespace sheetaudit
