#ifndef SETCOH_DATAGEN_HPP
#define SETCOH_DATAGEN_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "setcoh/error.hpp"
#include "setcoh/lexicon.hpp"
#include "setcoh/logic.hpp"
#include "setcoh/rng.hpp"
#include "setcoh/rules.hpp"
#include "setcoh/statement.hpp"

namespace setcoh {

// ---------------------------------------------------------------------------
// Seed pairs

struct SeedPair {
    Relation relation = Relation::Neutral;
    std::string ns;  // atom namespace (the subject)
    Formula premise = Formula::atom("_p");
    Formula hypothesis = Formula::atom("_h");
    // Surface forms used when the premise / hypothesis fill a rule's p / h role.
    Atom premise_role;
    Atom hypothesis_role;
    std::vector<Formula> axioms;

    std::string premise_text() const { return realize(Formula::atom("p"), {{"p", premise_role}}); }
    std::string hypothesis_text() const { return realize(Formula::atom("h"), {{"h", hypothesis_role}}); }
};

namespace detail {

inline Atom make_role(std::string id, std::string_view subject, std::string_view pos_phrase,
                      std::string_view neg_phrase = {}) {
    Atom a;
    a.id = std::move(id);
    a.surface_pos = std::string(subject) + " is " + std::string(pos_phrase);
    a.surface_neg = std::string(subject) + " is not " + std::string(neg_phrase.empty() ? pos_phrase : neg_phrase);
    return a;
}

inline bool certify(const SeedPair& s) {
    std::vector<Formula> ax = s.axioms;
    auto sat_with = [&](Formula a, Formula b) {
        std::vector<Formula> fs = ax;
        fs.push_back(a);
        fs.push_back(b);
        return is_satisfiable(fs);
    };
    const Formula &p = s.premise, &h = s.hypothesis;
    switch (s.relation) {
        case Relation::Entailment: return !sat_with(p, negate(h)) && sat_with(p, h) && sat_with(negate(p), h);
        case Relation::Contradiction: return !sat_with(p, h) && sat_with(p, negate(h));
        case Relation::Neutral:
            return sat_with(p, h) && sat_with(p, negate(h)) && sat_with(negate(p), h) &&
                   sat_with(negate(p), negate(h));
    }
    return false;
}

}  // namespace detail

/// Deterministic synthetic seed pair. `avoid` lists namespaces that must
/// not be reused (for multi-seed rules).
inline SeedPair gen_seed_pair(std::uint64_t rng_seed, Relation relation,
                              const std::set<std::string, std::less<>>& avoid = {}) {
    namespace lx = lexicon;
    Rng rng(rng_seed);
    std::size_t si = rng.below(lx::kSubjects.size());
    while (avoid.count(std::string(lx::kSubjects[si].slug))) si = (si + 1) % lx::kSubjects.size();
    const auto& subj = lx::kSubjects[si];
    SeedPair s;
    s.relation = relation;
    s.ns = std::string(subj.slug);
    const std::string base = s.ns + ".";
    switch (relation) {
        case Relation::Entailment: {
            const auto& sp = lx::kSpecializations[rng.below(lx::kSpecializations.size())];
            std::string pid = base + std::string(sp.slug) + ".p", hid = base + std::string(sp.slug) + ".h";
            s.premise = Formula::atom(pid);
            s.hypothesis = Formula::atom(hid);
            s.premise_role = detail::make_role(pid, subj.phrase, sp.specific);
            s.hypothesis_role = detail::make_role(hid, subj.phrase, sp.general);
            s.axioms.push_back(implies(s.premise, s.hypothesis));
            break;
        }
        case Relation::Contradiction: {
            const auto& an = lx::kAntonyms[rng.below(lx::kAntonyms.size())];
            bool swap = rng.below(2) == 1;
            std::string_view a = swap ? an.b : an.a, b = swap ? an.a : an.b;
            std::string id = base + std::string(an.slug);
            s.premise = Formula::atom(id);
            s.hypothesis = negate(s.premise);
            s.premise_role = detail::make_role(id, subj.phrase, a);
            s.hypothesis_role = detail::make_role(id + "~", subj.phrase, b);
            break;
        }
        case Relation::Neutral: {
            auto idx = rng.sample_indices(lx::kProperties.size(), 2);
            const auto &pa = lx::kProperties[idx[0]], &pb = lx::kProperties[idx[1]];
            std::string pid = base + std::string(pa.slug), hid = base + std::string(pb.slug);
            s.premise = Formula::atom(pid);
            s.hypothesis = Formula::atom(hid);
            s.premise_role = detail::make_role(pid, subj.phrase, pa.phrase);
            s.hypothesis_role = detail::make_role(hid, subj.phrase, pb.phrase);
            break;
        }
    }
    if (!detail::certify(s)) throw Error(ErrorKind::RelationMismatch, "seed pair failed certification");
    return s;
}

// ---------------------------------------------------------------------------
// Oracle audit

inline bool validate_with_oracle(const StatementSet& s) {
    if (!s.has_semantics()) throw Error(ErrorKind::MissingSemantics, "set '" + s.id + "' lacks semantics");
    return (s.label == Label::Consistent) == is_satisfiable(formulas_of(s));
}

// ---------------------------------------------------------------------------
// Rule application

inline StatementSet apply_rule(std::string_view rule_id, const std::vector<SeedPair>& seeds) {
    const Rule& rule = find_rule(rule_id);
    if (seeds.size() != rule.seed_count())
        throw Error(ErrorKind::RelationMismatch, rule.id + " needs " + std::to_string(rule.seed_count()) + " seed(s)");
    for (const auto& sd : seeds)
        if (sd.relation != rule.relation())
            throw Error(ErrorKind::RelationMismatch,
                        rule.id + " expects " + to_string(rule.relation()) + " seeds, got " + to_string(sd.relation));
    if (seeds.size() == 2 && seeds[0].ns == seeds[1].ns)
        throw Error(ErrorKind::NamespaceCollision, "seeds share namespace '" + seeds[0].ns + "'");

    AtomTable roles;
    std::map<std::string, Formula, std::less<>> sub;
    StatementSet out;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        std::string n = std::to_string(k + 1);
        roles["p" + n] = seeds[k].premise_role;
        roles["h" + n] = seeds[k].hypothesis_role;
        sub.emplace("p" + n, seeds[k].premise);
        sub.emplace("h" + n, seeds[k].hypothesis);
        out.axioms.insert(out.axioms.end(), seeds[k].axioms.begin(), seeds[k].axioms.end());
    }
    for (const auto& tmpl : rule.parsed())
        out.statements.push_back(Statement::sentence(realize(tmpl, roles), substitute(tmpl, sub)));
    out.label = rule.label;
    out.provenance = rule.label == Label::Consistent ? "C" : "I";
    out.rule_id = rule.id;
    out.difficulty = rule.difficulty;
    if (!validate_with_oracle(out))
        throw Error(ErrorKind::RelationMismatch, rule.id + " label disagrees with the oracle");
    return out;
}

// ---------------------------------------------------------------------------
// QA sets

struct QAWorld {
    std::string object;
    std::string attribute;  // "color" or "material"
    std::string true_value;
    std::vector<std::string> distractor_values;
};

namespace detail {

inline std::string qa_atom(const QAWorld& w, const std::string& value) {
    return w.object + "." + w.attribute + "." + value;
}
inline std::string open_question(const QAWorld& w) {
    if (w.attribute == "material") return "what is " + w.object + " made of?";
    return "what " + w.attribute + " is " + w.object + "?";
}
inline std::string yes_no_question(const QAWorld& w, const std::string& v) {
    if (w.attribute == "material") return "is " + w.object + " made of " + v + "?";
    return "is " + w.object + " " + v + "?";
}

// Exactly one value of the attribute holds: a disjunction over all values
// plus pairwise exclusions.
inline std::vector<Formula> exactly_one(const std::vector<Formula>& vs) {
    std::vector<Formula> out;
    Formula any = vs.back();
    for (std::size_t i = vs.size() - 1; i-- > 0;) any = lor(vs[i], any);
    out.push_back(any);
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j) out.push_back(implies(vs[i], negate(vs[j])));
    return out;
}

}  // namespace detail

/// Consistent QA set: open question, affirmation, one "no" per distractor.
inline StatementSet gen_qa_set(const QAWorld& w) {
    if (w.distractor_values.empty()) throw Error(ErrorKind::InvalidArgument, "QA world needs a distractor");
    std::set<std::string> seen{w.true_value};
    for (const auto& d : w.distractor_values)
        if (!seen.insert(d).second) throw Error(ErrorKind::InvalidArgument, "QA values must be distinct");

    StatementSet s;
    Formula truth = Formula::atom(detail::qa_atom(w, w.true_value));
    s.statements.push_back(Statement::qa(detail::open_question(w), w.true_value, truth));
    s.statements.push_back(Statement::qa(detail::yes_no_question(w, w.true_value), "yes", truth));
    std::vector<Formula> domain{truth};
    for (const auto& d : w.distractor_values) {
        Formula a = Formula::atom(detail::qa_atom(w, d));
        domain.push_back(a);
        s.statements.push_back(Statement::qa(detail::yes_no_question(w, d), "no", negate(a)));
    }
    s.axioms = detail::exactly_one(domain);
    s.label = Label::Consistent;
    s.provenance = "C";
    s.rule_id = "QA";
    s.difficulty = Difficulty::Medium;
    s.gold_inconsistent_indices = std::vector<std::size_t>{};
    return s;
}

inline QAWorld sample_qa_world(Rng& rng, std::size_t min_distractors = 1, std::size_t max_distractors = 4) {
    namespace lx = lexicon;
    QAWorld w;
    w.object = std::string(lx::kObjects[rng.below(lx::kObjects.size())]);
    std::vector<std::string> values;
    if (rng.below(2) == 0) {
        w.attribute = "color";
        for (auto v : lx::kColors) values.emplace_back(v);
    } else {
        w.attribute = "material";
        for (auto v : lx::kMaterials) values.emplace_back(v);
    }
    std::size_t k = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(min_distractors),
                                                          static_cast<std::int64_t>(max_distractors)));
    auto idx = rng.sample_indices(values.size(), k + 1);
    w.true_value = values[idx[0]];
    for (std::size_t i = 1; i < idx.size(); ++i) w.distractor_values.push_back(values[idx[i]]);
    return w;
}

/// Flips one answer: the open answer becomes a distractor, or yes and no swap.
inline StatementSet corrupt_qa(const StatementSet& sc, std::uint64_t rng_seed) {
    if (sc.label != Label::Consistent) throw Error(ErrorKind::InvalidArgument, "corrupt_qa needs a consistent set");
    if (sc.statements.size() < 2) throw Error(ErrorKind::InvalidArgument, "corrupt_qa needs at least two statements");
    for (const auto& st : sc.statements)
        if (st.kind != StatementKind::Qa || !st.semantics)
            throw Error(ErrorKind::InvalidArgument, "corrupt_qa needs QA statements with semantics");

    Rng rng(rng_seed);
    StatementSet s = sc;
    std::size_t i = rng.below(s.statements.size());
    Statement& st = s.statements[i];
    if (st.answer == "yes" || st.answer == "no") {
        st.answer = st.answer == "yes" ? "no" : "yes";
        st.semantics = negate(*st.semantics);
    } else {
        // open question: answers that are asked about elsewhere in the set
        std::vector<std::pair<std::string, Formula>> options;
        for (const auto& other : s.statements) {
            if (other.answer != "no") continue;
            Formula a = other.semantics->operand();
            std::string id = a.atom_id();
            options.emplace_back(id.substr(id.rfind('.') + 1), a);
        }
        if (options.empty()) throw Error(ErrorKind::InvalidArgument, "no distractor to substitute");
        const auto& [value, f] = options[rng.below(options.size())];
        st.answer = value;
        st.semantics = f;
    }
    s.label = Label::Inconsistent;
    s.provenance = "I";
    s.rule_id = "QA-FLIP";
    s.gold_inconsistent_indices = std::vector<std::size_t>{i};
    if (is_satisfiable(formulas_of(s))) throw Error(ErrorKind::InvalidArgument, "corruption left the set satisfiable");
    if (s.statements.size() >= 4) {
        for (std::size_t j = 0; j < s.statements.size(); ++j) {
            std::vector<std::size_t> keep;
            for (std::size_t k = 0; k < s.statements.size(); ++k)
                if (k != j) keep.push_back(k);
            if (is_satisfiable(formulas_of(s, keep)) != (j == i))
                throw Error(ErrorKind::InvalidArgument, "corruption is not uniquely locatable");
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Unions

inline std::string provenance_tag(std::size_t n_consistent, std::size_t n_inconsistent) {
    return std::string(n_consistent, 'C') + std::string(n_inconsistent, 'I');
}

/// Concatenates and shuffles the parts. Parts must use disjoint namespaces.
inline StatementSet compose_union(const std::vector<StatementSet>& parts, std::uint64_t rng_seed,
                                  std::string id = {}) {
    if (parts.empty() || parts.size() > 4) throw Error(ErrorKind::InvalidArgument, "compose_union takes 1 to 4 parts");
    std::set<std::string, std::less<>> used;
    for (const auto& p : parts) {
        for (const auto& ns : namespaces_of(p))
            if (!used.insert(ns).second) throw Error(ErrorKind::NamespaceCollision, "namespace '" + ns + "' reused");
    }

    StatementSet out;
    std::size_t nc = 0, ni = 0;
    bool all_gold = true;
    std::vector<std::size_t> gold_flat;  // indices into the concatenation
    std::vector<std::string> rule_ids;
    for (const auto& p : parts) {
        std::size_t offset = out.statements.size();
        out.statements.insert(out.statements.end(), p.statements.begin(), p.statements.end());
        out.axioms.insert(out.axioms.end(), p.axioms.begin(), p.axioms.end());
        for (char c : p.provenance) (c == 'C' ? nc : ni)++;
        if (p.difficulty == Difficulty::Easy) out.difficulty = Difficulty::Easy;
        if (p.rule_id) rule_ids.push_back(*p.rule_id);
        if (p.gold_inconsistent_indices)
            for (auto g : *p.gold_inconsistent_indices) gold_flat.push_back(offset + g);
        else
            all_gold = false;
    }

    std::vector<std::size_t> perm(out.statements.size());  // perm[new] = old
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(rng_seed);
    rng.shuffle(perm);
    std::vector<Statement> shuffled;
    std::vector<std::size_t> where(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        shuffled.push_back(out.statements[perm[k]]);
        where[perm[k]] = k;
    }
    out.statements = std::move(shuffled);

    out.provenance = provenance_tag(nc, ni);
    out.label = label_from_provenance(out.provenance);
    if (rule_ids.size() == parts.size()) {
        std::string joined;
        for (const auto& r : rule_ids) joined += (joined.empty() ? "" : "+") + r;
        out.rule_id = joined;
    }
    if (all_gold) {
        std::vector<std::size_t> g;
        for (auto old : gold_flat) g.push_back(where[old]);
        std::sort(g.begin(), g.end());
        out.gold_inconsistent_indices = g;
    }
    if (id.empty())
        for (const auto& p : parts) id += (id.empty() ? "" : "+") + p.id;
    out.id = std::move(id);
    return out;
}

/// The 14 provenance classes: multisets over {C, I} with 1 to 4 members.
inline std::vector<std::string> provenance_classes() {
    std::vector<std::string> out;
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::size_t ni = 0; ni <= n; ++ni) out.push_back(provenance_tag(n - ni, ni));
    return out;
}

struct BasePools {
    std::vector<StatementSet> consistent;
    std::vector<StatementSet> inconsistent;
};

/// Builds one set of the given provenance class from randomly drawn base
/// sets with pairwise disjoint namespaces. If `first` is given it is used as
/// the part for the first tag letter.
inline StatementSet sample_union(std::string_view tag, const BasePools& pools, Rng& rng,
                                 const StatementSet* first = nullptr, std::size_t max_tries = 1000) {
    for (char c : tag)
        if ((c == 'C' && pools.consistent.empty()) || (c == 'I' && pools.inconsistent.empty()) ||
            (c != 'C' && c != 'I'))
            throw Error(ErrorKind::PoolExhausted, "no base sets for tag '" + std::string(tag) + "'");
    for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
        std::vector<StatementSet> parts;
        std::set<std::string, std::less<>> used;
        bool ok = true;
        for (std::size_t k = 0; k < tag.size() && ok; ++k) {
            const auto& pool = tag[k] == 'C' ? pools.consistent : pools.inconsistent;
            const StatementSet& part = (k == 0 && first) ? *first : pool[rng.below(pool.size())];
            for (const auto& ns : namespaces_of(part))
                if (!used.insert(ns).second) ok = false;
            parts.push_back(part);
        }
        if (ok) return compose_union(parts, rng.next());
        if (first && tag.size() == 1) break;
    }
    throw Error(ErrorKind::PoolExhausted, "could not draw disjoint parts for '" + std::string(tag) + "'");
}

// ---------------------------------------------------------------------------
// Pairwise data

/// Size-2 sets for element-wise verifiers. Entailment seeds give the four
/// inconsistent patterns plus as many consistent 2-subsets; QA sets give
/// conflicting pairs (inconsistent) and all 2-subsets of consistent sets.
inline std::vector<StatementSet> derive_pairwise_dataset(const std::vector<SeedPair>& seeds,
                                                         const std::vector<StatementSet>& qa_sets,
                                                         std::uint64_t rng_seed) {
    std::vector<StatementSet> out;
    Rng rng(rng_seed);
    auto consistent_rules = [] {
        std::vector<const Rule*> rs;
        for (auto* r : rules_in(RuleFamily::SingleEntailment))
            if (r->label == Label::Consistent) rs.push_back(r);
        return rs;
    }();
    std::size_t n = 0;
    for (const auto& sd : seeds) {
        if (sd.relation != Relation::Entailment) continue;
        AtomTable roles{{"p", sd.premise_role}, {"h", sd.hypothesis_role}};
        std::map<std::string, Formula, std::less<>> sub{{"p", sd.premise}, {"h", sd.hypothesis}};
        const std::array<std::array<const char*, 2>, 4> patterns{{
            {"p", "(not p)"}, {"h", "(not h)"}, {"p", "(not h)"}, {"(or p h)", "(not h)"},
        }};
        for (std::size_t k = 0; k < patterns.size(); ++k) {
            StatementSet s;
            for (const char* t : patterns[k]) {
                Formula tmpl = parse_prefix(t);
                s.statements.push_back(Statement::sentence(realize(tmpl, roles), substitute(tmpl, sub)));
            }
            s.axioms = sd.axioms;
            s.label = Label::Inconsistent;
            s.provenance = "I";
            s.rule_id = "PAIR-" + std::to_string(k + 1);
            s.difficulty = k < 2 ? Difficulty::Easy : Difficulty::Medium;
            s.id = "pair-" + std::to_string(n++);
            out.push_back(std::move(s));
        }
        for (std::size_t k = 0; k < patterns.size(); ++k) {
            const Rule* r = consistent_rules[rng.below(consistent_rules.size())];
            StatementSet full = apply_rule(r->id, {sd});
            auto idx = rng.sample_indices(full.size(), 2);
            std::sort(idx.begin(), idx.end());
            StatementSet s = subset(full, idx);
            s.id = "pair-" + std::to_string(n++);
            out.push_back(std::move(s));
        }
    }
    for (const auto& qs : qa_sets) {
        const std::size_t m = qs.size();
        if (qs.label == Label::Consistent) {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = i + 1; j < m; ++j) {
                    StatementSet s = subset(qs, {i, j});
                    s.gold_inconsistent_indices = std::vector<std::size_t>{};
                    s.id = "pair-" + std::to_string(n++);
                    out.push_back(std::move(s));
                }
        } else if (qs.gold_inconsistent_indices && qs.gold_inconsistent_indices->size() == 1) {
            std::size_t g = qs.gold_inconsistent_indices->front();
            for (std::size_t j = 0; j < m; ++j) {
                if (j == g) continue;
                std::vector<std::size_t> idx{std::min(g, j), std::max(g, j)};
                if (is_satisfiable(formulas_of(qs, idx))) continue;
                StatementSet s = subset(qs, idx);
                s.gold_inconsistent_indices = std::nullopt;
                s.id = "pair-" + std::to_string(n++);
                out.push_back(std::move(s));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Splits

enum class CorpusStyle { Snli, Qa };

inline const char* to_string(CorpusStyle s) { return s == CorpusStyle::Snli ? "snli" : "qa"; }
inline CorpusStyle parse_style(std::string_view s) {
    if (s == "snli") return CorpusStyle::Snli;
    if (s == "qa") return CorpusStyle::Qa;
    throw Error(ErrorKind::InvalidArgument, "unknown corpus style '" + std::string(s) + "'");
}

struct SplitConfig {
    CorpusStyle style = CorpusStyle::Qa;
    std::size_t train_per_label = 2000;
    std::size_t val1_per_label = 200;
    std::size_t val2_per_label = 200;
    std::size_t test_per_label = 200;
    std::vector<RuleFamily> families{RuleFamily::SingleEntailment, RuleFamily::SingleContradiction,
                                     RuleFamily::SingleNeutral, RuleFamily::DoubleEntailment};
    std::size_t qa_min_distractors = 1;
    std::size_t qa_max_distractors = 4;
};

struct DatasetSplit {
    BasePools train, validation1, validation2, test;
};

/// One base set of the requested label, fully determined by `seed`.
inline StatementSet gen_base_set(const SplitConfig& cfg, Label label, std::uint64_t seed) {
    Rng rng(seed);
    if (cfg.style == CorpusStyle::Qa) {
        QAWorld w = sample_qa_world(rng, cfg.qa_min_distractors, cfg.qa_max_distractors);
        StatementSet s = gen_qa_set(w);
        return label == Label::Consistent ? s : corrupt_qa(s, rng.next());
    }
    std::vector<const Rule*> pool;
    for (auto fam : cfg.families)
        for (auto* r : rules_in(fam))
            if (r->label == label) pool.push_back(r);
    if (pool.empty())
        throw Error(ErrorKind::InsufficientRuleCoverage, std::string("no ") + to_string(label) + " rules selected");
    const Rule* r = pool[rng.below(pool.size())];
    std::vector<SeedPair> seeds;
    seeds.push_back(gen_seed_pair(rng.next(), r->relation()));
    if (r->seed_count() == 2) seeds.push_back(gen_seed_pair(rng.next(), r->relation(), {seeds[0].ns}));
    return apply_rule(r->id, seeds);
}

inline DatasetSplit build_splits(const SplitConfig& cfg, std::uint64_t rng_seed) {
    const std::size_t counts[4] = {cfg.train_per_label, cfg.val1_per_label, cfg.val2_per_label, cfg.test_per_label};
    const char* names[4] = {"train", "val1", "val2", "test"};
    for (auto c : counts)
        if (c == 0) throw Error(ErrorKind::InvalidArgument, "split counts must be at least 1");
    if (cfg.style == CorpusStyle::Snli && cfg.families.empty())
        throw Error(ErrorKind::InsufficientRuleCoverage, "no rule families selected");

    DatasetSplit out;
    BasePools* dest[4] = {&out.train, &out.validation1, &out.validation2, &out.test};
    std::uint64_t stream = 0;
    for (int sp = 0; sp < 4; ++sp) {
        for (Label label : {Label::Consistent, Label::Inconsistent}) {
            auto& pool = label == Label::Consistent ? dest[sp]->consistent : dest[sp]->inconsistent;
            pool.reserve(counts[sp]);
            for (std::size_t i = 0; i < counts[sp]; ++i) {
                StatementSet s = gen_base_set(cfg, label, derive_seed(rng_seed, stream++));
                s.id = std::string(to_string(cfg.style)) + "-" + names[sp] + "-" +
                       (label == Label::Consistent ? "C" : "I") + "-" + std::to_string(i);
                pool.push_back(std::move(s));
            }
        }
    }
    return out;
}

}  // namespace setcoh

#endif  // SETCOH_DATAGEN_HPP
