#ifndef SETCOH_JSONL_HPP
#define SETCOH_JSONL_HPP

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "setcoh/datagen.hpp"
#include "setcoh/error.hpp"
#include "setcoh/statement.hpp"

namespace setcoh {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const Statement& st) {
    ordered_json j;
    if (st.kind == StatementKind::Sentence) {
        j["kind"] = "sentence";
        j["text"] = st.text;
    } else {
        j["kind"] = "qa";
        j["question"] = st.question;
        j["answer"] = st.answer;
    }
    if (st.semantics) j["semantics"] = to_prefix(*st.semantics);
    return j;
}

inline ordered_json to_json(const StatementSet& s, const std::string& split = {}) {
    ordered_json j;
    j["id"] = s.id;
    if (!split.empty()) j["split"] = split;
    ordered_json sts = ordered_json::array();
    for (const auto& st : s.statements) sts.push_back(to_json(st));
    j["statements"] = std::move(sts);
    j["label"] = to_string(s.label);
    j["provenance"] = s.provenance;
    if (s.rule_id) j["rule_id"] = *s.rule_id;
    j["difficulty"] = to_string(s.difficulty);
    if (s.gold_inconsistent_indices) j["gold_inconsistent_indices"] = *s.gold_inconsistent_indices;
    if (!s.axioms.empty()) {
        ordered_json ax = ordered_json::array();
        for (const auto& a : s.axioms) ax.push_back(to_prefix(a));
        j["axioms"] = std::move(ax);
    }
    return j;
}

namespace detail {

inline const ordered_json& require(const ordered_json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw Error(ErrorKind::MalformedRecord, std::string("missing \"") + key + "\"");
    return *it;
}

inline Statement statement_from_json(const ordered_json& j) {
    std::string kind = require(j, "kind").get<std::string>();
    Statement st;
    if (kind == "sentence") {
        st = Statement::sentence(require(j, "text").get<std::string>());
    } else if (kind == "qa") {
        st = Statement::qa(require(j, "question").get<std::string>(), require(j, "answer").get<std::string>());
        if (st.answer.empty()) throw Error(ErrorKind::MalformedRecord, "empty answer");
    } else {
        throw Error(ErrorKind::MalformedRecord, "unknown statement kind '" + kind + "'");
    }
    if (auto it = j.find("semantics"); it != j.end()) st.semantics = parse_prefix(it->get<std::string>());
    return st;
}

}  // namespace detail

inline StatementSet set_from_json(const ordered_json& j, std::string* split = nullptr) {
    StatementSet s;
    s.id = detail::require(j, "id").get<std::string>();
    for (const auto& st : detail::require(j, "statements")) s.statements.push_back(detail::statement_from_json(st));
    s.label = parse_label(detail::require(j, "label").get<std::string>());
    if (auto it = j.find("provenance"); it != j.end())
        s.provenance = it->get<std::string>();
    else
        s.provenance = s.label == Label::Consistent ? "C" : "I";
    if (s.provenance.empty() || s.provenance.find_first_not_of("CI") != std::string::npos)
        throw Error(ErrorKind::MalformedRecord, "bad provenance '" + s.provenance + "'");
    if (label_from_provenance(s.provenance) != s.label)
        throw Error(ErrorKind::MalformedRecord, "label disagrees with provenance '" + s.provenance + "'");
    if (auto it = j.find("rule_id"); it != j.end()) s.rule_id = it->get<std::string>();
    if (auto it = j.find("difficulty"); it != j.end()) s.difficulty = parse_difficulty(it->get<std::string>());
    if (auto it = j.find("gold_inconsistent_indices"); it != j.end())
        s.gold_inconsistent_indices = it->get<std::vector<std::size_t>>();
    if (auto it = j.find("axioms"); it != j.end())
        for (const auto& a : *it) s.axioms.push_back(parse_prefix(a.get<std::string>()));
    if (split) *split = j.value("split", std::string());
    return s;
}

struct JsonlRecord {
    StatementSet set;
    std::string split;
};

inline void write_jsonl(std::ostream& os, const std::vector<JsonlRecord>& recs) {
    for (const auto& r : recs) os << to_json(r.set, r.split).dump() << '\n';
}

inline std::vector<JsonlRecord> read_jsonl(std::istream& is) {
    std::vector<JsonlRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            JsonlRecord r;
            r.set = set_from_json(ordered_json::parse(line), &r.split);
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw Error(ErrorKind::MalformedRecord, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline void save_jsonl(const std::string& path, const std::vector<StatementSet>& sets) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
    std::vector<JsonlRecord> recs;
    for (const auto& s : sets) recs.push_back({s, {}});
    write_jsonl(os, recs);
}

inline std::vector<StatementSet> load_jsonl(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::Io, "cannot read " + path);
    std::vector<StatementSet> out;
    for (auto& r : read_jsonl(is)) out.push_back(std::move(r.set));
    return out;
}

/// Splits are stored in one file, tagged by a "split" field.
inline void save_splits(const std::string& path, const DatasetSplit& d) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
    std::vector<JsonlRecord> recs;
    auto add = [&](const BasePools& p, const char* name) {
        for (const auto& s : p.consistent) recs.push_back({s, name});
        for (const auto& s : p.inconsistent) recs.push_back({s, name});
    };
    add(d.train, "train");
    add(d.validation1, "val1");
    add(d.validation2, "val2");
    add(d.test, "test");
    write_jsonl(os, recs);
}

inline DatasetSplit load_splits(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::Io, "cannot read " + path);
    DatasetSplit d;
    for (auto& r : read_jsonl(is)) {
        BasePools* p = r.split == "train"  ? &d.train
                       : r.split == "val1" ? &d.validation1
                       : r.split == "val2" ? &d.validation2
                       : r.split == "test" ? &d.test
                                           : nullptr;
        if (!p) throw Error(ErrorKind::MalformedRecord, "set '" + r.set.id + "' has unknown split '" + r.split + "'");
        (r.set.label == Label::Consistent ? p->consistent : p->inconsistent).push_back(std::move(r.set));
    }
    return d;
}

}  // namespace setcoh

#endif  // SETCOH_JSONL_HPP
