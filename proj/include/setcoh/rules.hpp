#ifndef SETCOH_RULES_HPP
#define SETCOH_RULES_HPP

// Set-construction rules over seed pairs. Formulas are written over role
// atoms p1, h1 (first seed) and p2, h2 (second seed).

#include <string>
#include <string_view>
#include <vector>

#include "setcoh/error.hpp"
#include "setcoh/logic.hpp"
#include "setcoh/statement.hpp"

namespace setcoh {

enum class Relation { Entailment, Contradiction, Neutral };

inline const char* to_string(Relation r) {
    switch (r) {
        case Relation::Entailment: return "entailment";
        case Relation::Contradiction: return "contradiction";
        case Relation::Neutral: return "neutral";
    }
    return "?";
}

enum class RuleFamily { SingleEntailment, SingleContradiction, SingleNeutral, DoubleEntailment };

struct Rule {
    std::string id;  // "SE-6"
    RuleFamily family;
    std::string description;
    std::vector<std::string> formulas;  // prefix notation over role atoms
    Label label;
    Difficulty difficulty;

    Relation relation() const {
        switch (family) {
            case RuleFamily::SingleContradiction: return Relation::Contradiction;
            case RuleFamily::SingleNeutral: return Relation::Neutral;
            default: return Relation::Entailment;
        }
    }
    std::size_t seed_count() const { return family == RuleFamily::DoubleEntailment ? 2 : 1; }
    std::vector<Formula> parsed() const {
        std::vector<Formula> out;
        for (const auto& f : formulas) out.push_back(parse_prefix(f));
        return out;
    }
};

namespace detail {

inline std::vector<Rule> build_rule_table() {
    using F = RuleFamily;
    constexpr auto C = Label::Consistent;
    constexpr auto I = Label::Inconsistent;
    constexpr auto M = Difficulty::Medium;
    constexpr auto E = Difficulty::Easy;
    const std::string imp = "(implies p1 h1)";
    const std::string contra = "(implies (not h1) (not p1))";
    const std::string mat = "(or (not p1) h1)";
    const std::string disj = "(or p1 h1)";
    const std::string np = "(not p1)", nh = "(not h1)";

    std::vector<Rule> t = {
        {"SE-1", F::SingleEntailment, "Transportation", {imp, contra}, C, M},
        {"SE-2", F::SingleEntailment, "Material Implication", {imp, mat}, C, M},
        {"SE-3", F::SingleEntailment, "Split Hypothesis of Rule 2 (1)", {imp, "h1"}, C, M},
        {"SE-4", F::SingleEntailment, "Split Hypothesis of Rule 2 (2)", {imp, np}, C, M},
        {"SE-5", F::SingleEntailment, "Modus Ponens", {imp, "p1", "h1"}, C, M},
        {"SE-6", F::SingleEntailment, "Modus Tollens", {imp, nh, np}, C, M},
        // p1 with not-h1 breaks the seed's entailment, so this one is inconsistent.
        {"SE-7", F::SingleEntailment, "Disjunctive Syllogism (1)", {disj, nh, "p1"}, I, M},
        {"SE-8", F::SingleEntailment, "Disjunctive Syllogism (2)", {disj, np, "h1"}, C, M},
        {"SE-9", F::SingleEntailment, "Rule 1 + 2", {imp, contra, mat}, C, M},
        {"SE-10", F::SingleEntailment, "Rule 1 + 3", {imp, contra, "h1"}, C, M},
        {"SE-11", F::SingleEntailment, "Rule 1 + 4", {imp, contra, np}, C, M},
        {"SE-12", F::SingleEntailment, "Rule 2 + 3", {imp, mat, "h1"}, C, M},
        {"SE-13", F::SingleEntailment, "Rule 2 + 4", {imp, mat, np}, C, M},
        {"SE-14", F::SingleEntailment, "Rule 3 + 4", {imp, np, "h1"}, C, M},
        {"SE-15", F::SingleEntailment, "Rule 1 + 5", {imp, contra, "p1", "h1"}, C, M},
        {"SE-16", F::SingleEntailment, "Rule 1 + 6", {imp, contra, np, nh}, C, M},
        {"SE-17", F::SingleEntailment, "Rule 2 + 5", {imp, mat, "p1", "h1"}, C, M},
        {"SE-18", F::SingleEntailment, "Rule 2 + 6", {imp, mat, np, nh}, C, M},
        {"SE-19", F::SingleEntailment, "Rule 1 + 2 + 3", {imp, mat, contra, "h1"}, C, M},
        {"SE-20", F::SingleEntailment, "Rule 1 + 2 + 4", {imp, mat, contra, np}, C, M},
        {"SE-21", F::SingleEntailment, "Rule 1 + 3 + 4", {imp, contra, np, "h1"}, C, M},
        {"SE-22", F::SingleEntailment, "Rule 2 + 3 + 4", {imp, mat, np, "h1"}, C, M},
        {"SE-23", F::SingleEntailment, "Rule 1 + 2 + 5", {imp, mat, contra, "p1", "h1"}, C, M},
        {"SE-24", F::SingleEntailment, "Rule 1 + 2 + 6", {imp, mat, contra, np, nh}, C, M},
        {"SE-25", F::SingleEntailment, "Rule 1 + 2 + 3 + 4", {imp, mat, contra, np, "h1"}, C, M},
        {"SE-26", F::SingleEntailment, "Negate Hypothesis (1)", {"p1", nh}, I, M},
        {"SE-27", F::SingleEntailment, "Negate Hypothesis (2)", {"p1", nh, imp}, I, M},
        {"SE-28", F::SingleEntailment, "Negate Hypothesis of Rule 7", {disj, np, nh}, I, M},
        {"SE-29", F::SingleEntailment, "Implicit Negate Hypothesis of Rule 7", {disj, imp, nh}, I, M},
        {"SE-30", F::SingleEntailment, "Rule 6 + Rule 26", {imp, nh, np, "p1"}, I, E},
        {"SE-31", F::SingleEntailment, "Rule 6 + Rule 3", {imp, nh, np, "h1"}, I, E},
        {"SE-32", F::SingleEntailment, "Rule 5 + Rule 4", {imp, "p1", "h1", np}, I, E},
        {"SE-33", F::SingleEntailment, "Rule 5 + Rule 26", {imp, "p1", "h1", nh}, I, E},
        {"SE-34", F::SingleEntailment, "Rule 1 + Rule 26", {imp, contra, "p1", nh}, I, M},
        {"SE-35", F::SingleEntailment, "Rule 2 + Rule 26", {imp, mat, "p1", nh}, I, M},
        {"SE-36", F::SingleEntailment, "Rule 6 + Rule 5", {imp, nh, np, "p1", "h1"}, I, E},

        {"SC-1", F::SingleContradiction, "Negate Premise", {np, "h1"}, C, M},
        {"SC-2", F::SingleContradiction, "Negate Hypothesis", {"p1", nh}, C, M},
        {"SC-3", F::SingleContradiction, "Disjunctive Syllogism (1)", {disj, nh, "p1"}, C, M},
        {"SC-4", F::SingleContradiction, "Disjunctive Syllogism (2)", {disj, np, "h1"}, C, M},
        {"SC-5", F::SingleContradiction, "Disjunction + Seed Pair", {disj, "p1", "h1"}, I, M},
        {"SC-6", F::SingleContradiction, "Negate Hypothesis of Rule 3", {disj, np, nh}, I, M},

        {"SN-1", F::SingleNeutral, "Disjunctive Syllogism 1", {disj, nh, "p1"}, C, M},
        {"SN-2", F::SingleNeutral, "Disjunctive Syllogism 2", {disj, np, "h1"}, C, M},
        {"SN-3", F::SingleNeutral, "Negate Hypothesis of Rule 1", {disj, np, nh}, I, M},
    };
    const std::string imp2 = "(implies p2 h2)";
    std::vector<Rule> de = {
        {"DE-1", F::DoubleEntailment, "Constructive Dilemma", {imp, imp2, "(or p1 p2)", "(or h1 h2)"}, C, M},
        {"DE-2", F::DoubleEntailment, "Destructive Dilemma",
         {imp, imp2, "(or (not h1) (not h2))", "(or (not p1) (not p2))"}, C, M},
        {"DE-3", F::DoubleEntailment, "Bidirectional Dilemma", {imp, imp2, "(or p1 (not h2))", "(or h1 (not p2))"}, C, M},
        {"DE-4", F::DoubleEntailment, "Negate Hypothesis of Constructive Dilemma",
         {imp, imp2, "(or p1 p2)", nh, "(not h2)"}, I, M},
        {"DE-5", F::DoubleEntailment, "Negate Hypothesis of Destructive Dilemma",
         {imp, imp2, "(or (not h1) (not h2))", "p1", "p2"}, I, M},
        {"DE-6", F::DoubleEntailment, "Negate Hypothesis of Bidirectional Dilemma",
         {imp, imp2, "(or p1 (not h2))", nh, "p2"}, I, M},
    };
    t.insert(t.end(), de.begin(), de.end());
    return t;
}

}  // namespace detail

inline const std::vector<Rule>& rule_table() {
    static const std::vector<Rule> table = detail::build_rule_table();
    return table;
}

inline const Rule& find_rule(std::string_view id) {
    for (const auto& r : rule_table())
        if (r.id == id) return r;
    throw Error(ErrorKind::UnknownRule, "no rule '" + std::string(id) + "'");
}

inline std::vector<const Rule*> rules_in(RuleFamily fam) {
    std::vector<const Rule*> out;
    for (const auto& r : rule_table())
        if (r.family == fam) out.push_back(&r);
    return out;
}

}  // namespace setcoh

#endif  // SETCOH_RULES_HPP
