#ifndef SETCOH_STATEMENT_HPP
#define SETCOH_STATEMENT_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "setcoh/error.hpp"
#include "setcoh/logic.hpp"

namespace setcoh {

enum class Label { Consistent, Inconsistent };
enum class Difficulty { Easy, Medium };
enum class StatementKind { Sentence, Qa };

inline const char* to_string(Label l) { return l == Label::Consistent ? "consistent" : "inconsistent"; }
inline const char* to_string(Difficulty d) { return d == Difficulty::Easy ? "easy" : "medium"; }

inline Label parse_label(std::string_view s) {
    if (s == "consistent") return Label::Consistent;
    if (s == "inconsistent") return Label::Inconsistent;
    throw Error(ErrorKind::InvalidArgument, "bad label '" + std::string(s) + "'");
}
inline Difficulty parse_difficulty(std::string_view s) {
    if (s == "easy") return Difficulty::Easy;
    if (s == "medium") return Difficulty::Medium;
    throw Error(ErrorKind::InvalidArgument, "bad difficulty '" + std::string(s) + "'");
}

struct Statement {
    StatementKind kind = StatementKind::Sentence;
    std::string text;      // sentence kind
    std::string question;  // qa kind
    std::string answer;    // qa kind
    std::optional<Formula> semantics;

    static Statement sentence(std::string text, std::optional<Formula> sem = std::nullopt) {
        Statement s;
        s.kind = StatementKind::Sentence;
        s.text = std::move(text);
        s.semantics = std::move(sem);
        return s;
    }
    static Statement qa(std::string question, std::string answer, std::optional<Formula> sem = std::nullopt) {
        Statement s;
        s.kind = StatementKind::Qa;
        s.question = std::move(question);
        s.answer = std::move(answer);
        s.semantics = std::move(sem);
        return s;
    }

    friend bool operator==(const Statement& a, const Statement& b) {
        return a.kind == b.kind && a.text == b.text && a.question == b.question && a.answer == b.answer &&
               a.semantics == b.semantics;
    }
};

struct StatementSet {
    std::string id;
    std::vector<Statement> statements;
    Label label = Label::Consistent;
    std::string provenance = "C";
    std::optional<std::string> rule_id;
    Difficulty difficulty = Difficulty::Medium;
    std::optional<std::vector<std::size_t>> gold_inconsistent_indices;
    // Background formulas that hold in the set's world (entailment axioms,
    // closed-world value constraints). Never rendered as statements.
    std::vector<Formula> axioms;

    std::size_t size() const { return statements.size(); }

    bool has_semantics() const {
        return std::all_of(statements.begin(), statements.end(),
                           [](const Statement& s) { return s.semantics.has_value(); });
    }

    friend bool operator==(const StatementSet& a, const StatementSet& b) {
        return a.id == b.id && a.statements == b.statements && a.label == b.label && a.provenance == b.provenance &&
               a.rule_id == b.rule_id && a.difficulty == b.difficulty &&
               a.gold_inconsistent_indices == b.gold_inconsistent_indices && a.axioms == b.axioms;
    }
};

inline Label label_from_provenance(std::string_view prov) {
    return prov.find('I') == std::string_view::npos ? Label::Consistent : Label::Inconsistent;
}

/// Number of base sets a provenance tag was composed from.
inline std::size_t provenance_parts(std::string_view prov) { return prov.size(); }

/// Statement formulas followed by the set's axioms.
inline std::vector<Formula> formulas_of(const StatementSet& s) {
    std::vector<Formula> out;
    out.reserve(s.statements.size() + s.axioms.size());
    for (std::size_t i = 0; i < s.statements.size(); ++i) {
        if (!s.statements[i].semantics)
            throw Error(ErrorKind::MissingSemantics,
                        "set '" + s.id + "' statement " + std::to_string(i) + " has no semantics");
        out.push_back(*s.statements[i].semantics);
    }
    out.insert(out.end(), s.axioms.begin(), s.axioms.end());
    return out;
}

/// Formulas of a subset of statements (by index), plus the axioms.
inline std::vector<Formula> formulas_of(const StatementSet& s, const std::vector<std::size_t>& keep) {
    std::vector<Formula> out;
    for (auto i : keep) {
        if (!s.statements.at(i).semantics)
            throw Error(ErrorKind::MissingSemantics,
                        "set '" + s.id + "' statement " + std::to_string(i) + " has no semantics");
        out.push_back(*s.statements[i].semantics);
    }
    out.insert(out.end(), s.axioms.begin(), s.axioms.end());
    return out;
}

inline std::string_view atom_namespace(std::string_view atom_id) { return atom_id.substr(0, atom_id.find('.')); }

/// Atom namespaces used by the set's semantics and axioms.
inline std::set<std::string, std::less<>> namespaces_of(const StatementSet& s) {
    std::set<std::string, std::less<>> atoms;
    for (const auto& st : s.statements)
        if (st.semantics) collect_atoms(*st.semantics, atoms);
    for (const auto& a : s.axioms) collect_atoms(a, atoms);
    std::set<std::string, std::less<>> out;
    for (const auto& a : atoms) out.emplace(atom_namespace(a));
    return out;
}

/// Copy of `s` restricted to the statements at `keep` (in that order).
/// Gold indices are dropped; the caller owns any relabelling.
inline StatementSet subset(const StatementSet& s, const std::vector<std::size_t>& keep) {
    StatementSet out;
    out.id = s.id;
    out.label = s.label;
    out.provenance = s.provenance;
    out.rule_id = s.rule_id;
    out.difficulty = s.difficulty;
    out.axioms = s.axioms;
    out.statements.reserve(keep.size());
    for (auto i : keep) out.statements.push_back(s.statements.at(i));
    return out;
}

}  // namespace setcoh

#endif  // SETCOH_STATEMENT_HPP
