#include <algorithm>
#include <chrono>
#include <ctime>
#include <sstream>

#include <json.hpp>

#include "sheetaudit/areas.hpp"
#include "sheetaudit/errors.hpp"

namespace sheetaudit {

namespace {

using ojson = nlohmann::ordered_json;

ojson finding_json(const Finding& f) {
    ojson j;
    j["id"] = f.id;
    j["category"] = to_string(f.category);
    j["location"] = f.location.to_a1();
    j["class_ids"] = f.class_ids;
    j["run"] = f.run;
    j["description"] = f.description;
    j["status"] = to_string(f.status);
    j["error_class_key"] = f.error_class_key;
    return j;
}

Finding finding_from_json(const ojson& j) {
    Finding f;
    f.id = j.at("id").get<std::string>();
    f.category = parse_category(j.at("category").get<std::string>()).value();
    f.location = CellAddress::parse(j.at("location").get<std::string>());
    f.class_ids = j.at("class_ids").get<std::vector<std::string>>();
    f.run = j.at("run").get<std::string>();
    f.description = j.at("description").get<std::string>();
    f.status = parse_status(j.at("status").get<std::string>()).value();
    f.error_class_key = j.at("error_class_key").get<std::string>();
    return f;
}

ojson record_json(const ErrorRecord& r) {
    ojson j;
    j["finding_id"] = r.finding_id;
    j["impact"] = to_string(r.impact);
    j["note"] = r.note;
    j["error_class_key"] = r.error_class_key;
    j["category"] = to_string(r.category);
    j["location"] = r.location.to_a1();
    return j;
}

}  // namespace

FindingStore::FindingStore(Clock clock) : clock_(std::move(clock)) {}

std::string FindingStore::utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void FindingStore::append(const std::string& line) { log_.push_back(line); }

void FindingStore::add(std::vector<Finding> findings) {
    for (auto& f : findings) {
        if (f.status != FindingStatus::Open) throw StateError("new finding " + f.id + " must be Open");
        if (find(f.id)) throw StateError("duplicate finding id " + f.id);
        ojson ev;
        ev["envelope"] = {{"timestamp", clock_()}};
        ev["event"] = "created";
        ev["finding"] = finding_json(f);
        append(ev.dump());
        findings_.push_back(std::move(f));
    }
}

const Finding* FindingStore::find(std::string_view id) const {
    for (const auto& f : findings_) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

const Finding& FindingStore::record_verdict(std::string_view finding_id, const Verdict& verdict) {
    auto it = std::find_if(findings_.begin(), findings_.end(), [&](const Finding& f) { return f.id == finding_id; });
    if (it == findings_.end()) throw NotFoundError("no finding with id '" + std::string(finding_id) + "'");
    if (it->status != FindingStatus::Open)
        throw StateError("finding " + it->id + " is already " + std::string(to_string(it->status)));

    ojson ev;
    ev["envelope"] = {{"timestamp", clock_()}};
    ev["event"] = "verdict";
    ev["finding_id"] = it->id;
    ev["action"] = verdict.action == Verdict::Action::Confirm ? "confirm" : "dismiss";
    ev["note"] = verdict.note;

    if (verdict.action == Verdict::Action::Confirm) {
        it->status = FindingStatus::ConfirmedError;
        ErrorRecord rec{it->id, verdict.impact, verdict.note, it->error_class_key, it->category, it->location};
        ev["impact"] = to_string(verdict.impact);
        ev["error_record"] = record_json(rec);
        errors_.push_back(std::move(rec));
    } else {
        it->status = FindingStatus::Dismissed;
    }
    ev["status"] = to_string(it->status);
    append(ev.dump());
    return *it;
}

std::string FindingStore::log_text() const {
    std::string out;
    for (const auto& line : log_) out += line + "\n";
    return out;
}

FindingStore FindingStore::replay(std::string_view log_text) {
    std::string timestamp;
    FindingStore store([&timestamp] { return timestamp; });
    std::istringstream in{std::string(log_text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            ojson ev = ojson::parse(line);
            timestamp = ev.at("envelope").at("timestamp").get<std::string>();
            const std::string kind = ev.at("event").get<std::string>();
            if (kind == "created") {
                store.add({finding_from_json(ev.at("finding"))});
            } else if (kind == "verdict") {
                const std::string action = ev.at("action").get<std::string>();
                const std::string note = ev.at("note").get<std::string>();
                Verdict v = action == "confirm"
                                ? Verdict::confirm(parse_impact(ev.at("impact").get<std::string>()).value(), note)
                                : Verdict::dismiss(note);
                store.record_verdict(ev.at("finding_id").get<std::string>(), v);
            } else {
                throw LoadError("unknown event '" + kind + "'");
            }
        } catch (const LoadError&) {
            throw;
        } catch (const std::exception& e) {
            throw LoadError("findings log line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    store.clock_ = utc_now;
    return store;
}

std::string strip_envelopes(std::string_view log_text) {
    std::istringstream in{std::string(log_text)};
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ojson ev = ojson::parse(line);
        ev.erase("envelope");
        out += ev.dump() + "\n";
    }
    return out;
}

}  // namespace sheetaudit
