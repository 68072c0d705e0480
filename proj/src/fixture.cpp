#include <algorithm>
#include <cstdlib>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "sheetaudit/errors.hpp"
#include "sheetaudit/fixture.hpp"

namespace sheetaudit {

namespace {

constexpr const char* kSheet = "Data";
constexpr int kFirstRow = 2;
constexpr int kFormCount = 5;
constexpr int kMinSpacing = 3;  // keeps flanks of neighbouring interruptions at two cells
constexpr int kMaxAttempts = 10000;

std::string form_text(int form, const std::string& x, int c) {
    const std::string k = std::to_string(c);
    switch (form) {
        case 0: return "=" + x + "*" + k;
        case 1: return "=" + x + "+" + k;
        case 2: return "=(" + x + "+" + k + ")/2";
        case 3: return "=ROUND(" + x + "*" + k + ",2)";
        default: return "=" + x + "-" + k;
    }
}

// Stand-in constant an author might have typed over the formula.
std::int64_t form_value(int form, std::int64_t x, int c) {
    switch (form) {
        case 0: return x * c;
        case 1: return x + c;
        case 2: return (x + c) / 2;
        case 3: return x * c;
        default: return x - c;
    }
}

class Planner {
public:
    Planner(int first, int last, int columns) : first_(first), last_(last), used_(columns) {}

    bool free(int column, int row) const {
        for (int u : used_[column]) {
            if (std::abs(u - row) < kMinSpacing) return false;
        }
        return true;
    }
    void take(int column, int row) { used_[column].insert(row); }

    int first() const { return first_; }
    int last() const { return last_; }

private:
    int first_;
    int last_;
    std::vector<std::set<int>> used_;
};

}  // namespace

std::string_view to_string(FixtureKind kind) {
    switch (kind) {
        case FixtureKind::Regular: return "regular";
        case FixtureKind::Interrupted: return "interrupted";
        case FixtureKind::CopiedTooFar: return "copied-too-far";
        case FixtureKind::EmptyRef: return "empty-ref";
        case FixtureKind::Mixed: return "mixed";
    }
    return "regular";
}

std::optional<FixtureKind> parse_fixture_kind(std::string_view text) {
    for (auto k : {FixtureKind::Regular, FixtureKind::Interrupted, FixtureKind::CopiedTooFar, FixtureKind::EmptyRef,
                   FixtureKind::Mixed}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

Fixture generate_fixture(const FixtureOptions& options) {
    if (options.rows < 1 || options.cols < 2) throw UsageError("fixture needs at least 1 row and 2 columns");
    if (options.anomalies < 0) throw UsageError("anomaly count must be non-negative");

    std::mt19937_64 rng(options.seed);
    auto pick = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

    const int data_cols = (options.cols + 1) / 2;
    const int formula_cols = options.cols / 2;
    const int last_row = kFirstRow + options.rows - 1;
    auto data_col = [](int j) { return j + 1; };
    auto formula_col = [&](int j) { return data_cols + j + 1; };

    std::vector<int> form(formula_cols);
    for (auto& f : form) f = pick(kFormCount);
    std::map<GridPos, std::int64_t> data;
    for (int r = kFirstRow; r <= last_row; ++r) {
        for (int j = 0; j < data_cols; ++j) data[{r, data_col(j)}] = 100 + pick(900);
    }

    // Plan anomalies.
    std::vector<Category> plan;
    const int k = options.kind == FixtureKind::Regular ? 0 : options.anomalies;
    if (options.kind == FixtureKind::Mixed) {
        std::vector<Category> all{Category::ConstantInsteadOfFormula, Category::ConstantInsteadOfReference,
                                  Category::ReferenceToEmptyCell, Category::FormulaCopiedTooFar};
        for (int i = 0; i < k; ++i) plan.push_back(i < 4 ? all[i] : all[pick(4)]);
        for (int i = static_cast<int>(plan.size()) - 1; i > 0; --i) std::swap(plan[i], plan[pick(i + 1)]);
    } else {
        Category c = options.kind == FixtureKind::Interrupted    ? Category::ConstantInsteadOfFormula
                     : options.kind == FixtureKind::CopiedTooFar ? Category::FormulaCopiedTooFar
                                                                 : Category::ReferenceToEmptyCell;
        plan.assign(k, c);
    }

    Planner planner(kFirstRow, last_row, formula_cols);
    std::map<GridPos, std::string> overrides;  // formula cells replaced by other text
    std::set<GridPos> deleted;                 // data cells removed
    std::vector<int> extension(formula_cols, 0);
    std::vector<SeededAnomaly> anomalies;

    for (Category c : plan) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            int j = pick(formula_cols);
            if (c == Category::FormulaCopiedTooFar) {
                int row = last_row + ++extension[j];
                anomalies.push_back({{kSheet, formula_col(j), row}, c});
                placed = true;
                break;
            }
            // Interruptions need two intact cells on either side; deletions stay off the ends.
            int lo = c == Category::ReferenceToEmptyCell ? kFirstRow + 1 : kFirstRow + 2;
            int hi = c == Category::ReferenceToEmptyCell ? last_row - 1 : last_row - 2;
            if (hi < lo) break;
            int row = lo + pick(hi - lo + 1);
            if (!planner.free(j, row)) continue;
            planner.take(j, row);
            GridPos fpos{row, formula_col(j)};
            GridPos dpos{row, data_col(j)};
            const int constant = j + 2;
            if (c == Category::ConstantInsteadOfFormula) {
                overrides[fpos] = std::to_string(form_value(form[j], data.at(dpos), constant));
            } else if (c == Category::ConstantInsteadOfReference) {
                overrides[fpos] = form_text(form[j], std::to_string(data.at(dpos)), constant);
            } else {
                deleted.insert(dpos);
            }
            anomalies.push_back({{kSheet, fpos.col, row}, c});
            placed = true;
        }
        if (!placed)
            throw UsageError("grid of " + std::to_string(options.rows) + " rows and " + std::to_string(options.cols) +
                             " columns cannot hold " + std::to_string(k) + " separated anomalies");
    }

    Fixture fx;
    fx.kind = options.kind;
    fx.seed = options.seed;
    fx.workbook = Workbook("fixture-" + std::string(to_string(options.kind)) + "-" + std::to_string(options.seed));
    Sheet& sheet = fx.workbook.add_sheet(kSheet);
    auto put = [&](GridPos pos, const std::string& raw) {
        sheet.set(pos, make_content(raw, {kSheet, pos.col, pos.row}));
    };

    for (int j = 0; j < data_cols; ++j) put({1, data_col(j)}, "x" + std::to_string(j + 1));
    for (int j = 0; j < formula_cols; ++j) put({1, formula_col(j)}, "f" + std::to_string(j + 1));
    for (const auto& [pos, value] : data) {
        if (!deleted.count(pos)) put(pos, std::to_string(value));
    }
    for (int j = 0; j < formula_cols; ++j) {
        for (int r = kFirstRow; r <= last_row + extension[j]; ++r) {
            GridPos pos{r, formula_col(j)};
            auto it = overrides.find(pos);
            put(pos, it != overrides.end() ? it->second
                                           : form_text(form[j], column_to_letters(data_col(j)) + std::to_string(r),
                                                       j + 2));
        }
    }

    const int totals_row = last_row + *std::max_element(extension.begin(), extension.end()) + 2;
    put({totals_row, 1}, "Total");
    for (int j = 0; j < formula_cols; ++j) {
        std::string col = column_to_letters(formula_col(j));
        put({totals_row, formula_col(j)},
            "=SUM(" + col + std::to_string(kFirstRow) + ":" + col + std::to_string(last_row) + ")");
    }

    std::sort(anomalies.begin(), anomalies.end(), [&](const SeededAnomaly& a, const SeededAnomaly& b) {
        return fx.workbook.address_less(a.location, b.location);
    });
    fx.anomalies = std::move(anomalies);
    return fx;
}

std::string Fixture::truth_json() const {
    nlohmann::ordered_json doc;
    doc["kind"] = to_string(kind);
    doc["seed"] = seed;
    doc["anomalies"] = nlohmann::ordered_json::array();
    for (const auto& a : anomalies)
        doc["anomalies"].push_back({{"addr", a.location.to_a1()}, {"category", to_string(a.category)}});
    return doc.dump(2) + "\n";
}

std::vector<SeededAnomaly> parse_truth(std::string_view json_text) {
    try {
        auto doc = nlohmann::json::parse(json_text);
        std::vector<SeededAnomaly> out;
        for (const auto& a : doc.at("anomalies")) {
            auto category = parse_category(a.at("category").get<std::string>());
            if (!category) throw LoadError("unknown category in truth file");
            out.push_back({CellAddress::parse(a.at("addr").get<std::string>()), *category});
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("malformed truth file: ") + e.what());
    }
}

}  // namespace sheetaudit
