#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "setcoh/datagen.hpp"
#include "setcoh/jsonl.hpp"

using namespace setcoh;

namespace {

QAWorld desk() { return {"desk", "color", "brown", {"pink"}}; }

bool sat_pair(const SeedPair& s, const Formula& a, const Formula& b) {
    std::vector<Formula> fs = s.axioms;
    fs.push_back(a);
    fs.push_back(b);
    return is_satisfiable(fs);
}

}  // namespace

TEST(SeedPair, EntailmentCarriesAxiom) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SeedPair s = gen_seed_pair(seed, Relation::Entailment);
        ASSERT_EQ(s.axioms.size(), 1u);
        EXPECT_EQ(s.axioms[0], implies(s.premise, s.hypothesis));
        EXPECT_FALSE(sat_pair(s, s.premise, negate(s.hypothesis)));
    }
}

TEST(SeedPair, ContradictionIsUnsatisfiable) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SeedPair s = gen_seed_pair(seed, Relation::Contradiction);
        EXPECT_FALSE(is_satisfiable({s.premise, s.hypothesis}));
    }
}

TEST(SeedPair, NeutralAllFourCombinationsSatisfiable) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SeedPair s = gen_seed_pair(seed, Relation::Neutral);
        for (bool a : {false, true})
            for (bool b : {false, true})
                EXPECT_TRUE(sat_pair(s, a ? s.premise : negate(s.premise), b ? s.hypothesis : negate(s.hypothesis)));
    }
}

TEST(SeedPair, Deterministic) {
    SeedPair a = gen_seed_pair(9, Relation::Entailment), b = gen_seed_pair(9, Relation::Entailment);
    EXPECT_EQ(a.premise, b.premise);
    EXPECT_EQ(a.premise_text(), b.premise_text());
}

TEST(ApplyRule, ModusTollens) {
    SeedPair s = gen_seed_pair(1, Relation::Entailment);
    StatementSet set = apply_rule("SE-6", {s});
    ASSERT_EQ(set.size(), 3u);
    EXPECT_EQ(*set.statements[0].semantics, implies(s.premise, s.hypothesis));
    EXPECT_EQ(*set.statements[1].semantics, negate(s.hypothesis));
    EXPECT_EQ(*set.statements[2].semantics, negate(s.premise));
    EXPECT_EQ(set.label, Label::Consistent);
    EXPECT_EQ(set.difficulty, Difficulty::Medium);
    EXPECT_EQ(set.statements[0].text,
              "If " + s.premise_role.surface_pos + ", then " + s.hypothesis_role.surface_pos + ".");
    EXPECT_TRUE(validate_with_oracle(set));
}

TEST(ApplyRule, ImplicitNegateHypothesis) {
    SeedPair s = gen_seed_pair(2, Relation::Entailment);
    StatementSet set = apply_rule("SE-29", {s});
    ASSERT_EQ(set.size(), 3u);
    EXPECT_EQ(*set.statements[0].semantics, lor(s.premise, s.hypothesis));
    EXPECT_EQ(*set.statements[1].semantics, implies(s.premise, s.hypothesis));
    EXPECT_EQ(*set.statements[2].semantics, negate(s.hypothesis));
    EXPECT_EQ(set.label, Label::Inconsistent);
}

TEST(ApplyRule, DoubleEntailmentNeedsDistinctNamespaces) {
    SeedPair a = gen_seed_pair(3, Relation::Entailment);
    SeedPair b = gen_seed_pair(4, Relation::Entailment, {a.ns});
    StatementSet set = apply_rule("DE-4", {a, b});
    EXPECT_EQ(set.size(), 5u);
    EXPECT_EQ(set.label, Label::Inconsistent);
    try {
        apply_rule("DE-4", {a, a});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NamespaceCollision);
    }
}

TEST(ApplyRule, RelationMismatch) {
    SeedPair n = gen_seed_pair(5, Relation::Neutral);
    try {
        apply_rule("SE-6", {n});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RelationMismatch);
    }
}

TEST(ApplyRule, EveryRuleAgreesWithOracle) {
    for (const auto& r : rule_table())
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            std::vector<SeedPair> seeds{gen_seed_pair(seed * 7 + 1, r.relation())};
            if (r.seed_count() == 2) seeds.push_back(gen_seed_pair(seed * 7 + 2, r.relation(), {seeds[0].ns}));
            StatementSet s = apply_rule(r.id, seeds);
            ASSERT_TRUE(validate_with_oracle(s)) << r.id;
            ASSERT_EQ(s.size(), r.formulas.size());
        }
}

TEST(QA, DeskExample) {
    StatementSet s = gen_qa_set(desk());
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.statements[0].question, "what color is desk?");
    EXPECT_EQ(s.statements[0].answer, "brown");
    EXPECT_EQ(s.statements[1].question, "is desk brown?");
    EXPECT_EQ(s.statements[1].answer, "yes");
    EXPECT_EQ(s.statements[2].question, "is desk pink?");
    EXPECT_EQ(s.statements[2].answer, "no");
    EXPECT_TRUE(is_satisfiable(formulas_of(s)));
    EXPECT_EQ(s.label, Label::Consistent);
}

TEST(QA, SizeIsDistractorsPlusTwo) {
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        QAWorld w = sample_qa_world(rng);
        StatementSet s = gen_qa_set(w);
        EXPECT_EQ(s.size(), w.distractor_values.size() + 2);
        EXPECT_TRUE(validate_with_oracle(s));
    }
}

TEST(QA, CorruptionFlipsOneAnswer) {
    StatementSet sc = gen_qa_set(desk());
    bool saw_pink_flip = false;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        StatementSet si = corrupt_qa(sc, seed);
        ASSERT_EQ(si.size(), sc.size());
        EXPECT_EQ(si.label, Label::Inconsistent);
        ASSERT_TRUE(si.gold_inconsistent_indices);
        ASSERT_EQ(si.gold_inconsistent_indices->size(), 1u);
        std::size_t g = si.gold_inconsistent_indices->front();
        for (std::size_t i = 0; i < si.size(); ++i)
            if (i != g) EXPECT_EQ(si.statements[i], sc.statements[i]);
        if (g == 2) {
            EXPECT_EQ(si.statements[2].answer, "yes");
            saw_pink_flip = true;
        }
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < si.size(); ++i)
            if (i != g) rest.push_back(i);
        EXPECT_TRUE(is_satisfiable(formulas_of(si, rest)));
        EXPECT_FALSE(is_satisfiable(formulas_of(si)));
    }
    EXPECT_TRUE(saw_pink_flip);
}

TEST(QA, GoldUniqueForLargerSets) {
    Rng rng(23);
    for (int i = 0; i < 200; ++i) {
        StatementSet sc = gen_qa_set(sample_qa_world(rng, 2, 4));
        StatementSet si = corrupt_qa(sc, rng.next());
        std::size_t g = si.gold_inconsistent_indices->front();
        for (std::size_t j = 0; j < si.size(); ++j) {
            std::vector<std::size_t> keep;
            for (std::size_t k = 0; k < si.size(); ++k)
                if (k != j) keep.push_back(k);
            EXPECT_EQ(is_satisfiable(formulas_of(si, keep)), j == g);
        }
    }
}

TEST(Union, ProvenanceAndLabel) {
    Rng rng(5);
    StatementSet c1 = gen_qa_set(sample_qa_world(rng));
    StatementSet c2 = gen_qa_set(QAWorld{"lamp", "material", "wood", {"glass"}});
    StatementSet i1 = corrupt_qa(gen_qa_set(desk()), 3);
    if (namespaces_of(c1) == namespaces_of(c2) || namespaces_of(c1) == namespaces_of(i1)) GTEST_SKIP();
    StatementSet ci = compose_union({c1, i1}, 11);
    EXPECT_EQ(ci.provenance, "CI");
    EXPECT_EQ(ci.label, Label::Inconsistent);
    EXPECT_TRUE(validate_with_oracle(ci));
    StatementSet cc = compose_union({c1, c2}, 12);
    EXPECT_EQ(cc.provenance, "CC");
    EXPECT_EQ(cc.label, Label::Consistent);
    EXPECT_TRUE(validate_with_oracle(cc));
}

TEST(Union, GoldIndicesFollowShuffle) {
    StatementSet c = gen_qa_set(QAWorld{"lamp", "material", "wood", {"glass", "steel"}});
    StatementSet i = corrupt_qa(gen_qa_set(QAWorld{"desk", "color", "brown", {"pink", "red"}}), 4);
    std::size_t g = i.gold_inconsistent_indices->front();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        StatementSet u = compose_union({c, i}, seed);
        ASSERT_EQ(u.gold_inconsistent_indices->size(), 1u);
        EXPECT_EQ(u.statements[u.gold_inconsistent_indices->front()], i.statements[g]);
    }
}

TEST(Union, NamespaceCollision) {
    StatementSet a = gen_qa_set(desk());
    try {
        compose_union({a, a}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NamespaceCollision);
    }
}

TEST(Union, FourteenClasses) {
    // enumerate multisets over {C, I} with 1..4 members independently
    std::set<std::string> expected;
    for (int n = 1; n <= 4; ++n)
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::string t;
            for (int b = 0; b < n; ++b) t += (mask >> b) & 1 ? 'I' : 'C';
            std::sort(t.begin(), t.end());
            expected.insert(t);
        }
    auto cls = provenance_classes();
    EXPECT_EQ(cls.size(), 14u);
    EXPECT_EQ(std::set<std::string>(cls.begin(), cls.end()), expected);
}

TEST(Pairwise, PatternsAndLabels) {
    std::vector<SeedPair> seeds;
    for (std::uint64_t k = 0; k < 10; ++k) seeds.push_back(gen_seed_pair(k, Relation::Entailment));
    Rng rng(2);
    std::vector<StatementSet> qa;
    for (int k = 0; k < 10; ++k) {
        StatementSet c = gen_qa_set(sample_qa_world(rng, 2, 3));
        qa.push_back(c);
        qa.push_back(corrupt_qa(c, rng.next()));
    }
    auto pairs = derive_pairwise_dataset(seeds, qa, 8);
    std::size_t pattern4 = 0;
    for (const auto& s : pairs) {
        ASSERT_EQ(s.size(), 2u);
        ASSERT_TRUE(validate_with_oracle(s)) << s.id;
        if (s.rule_id == "PAIR-3") {
            // {p, not h}
            EXPECT_TRUE(s.statements[0].semantics->is_atom());
            EXPECT_EQ(s.label, Label::Inconsistent);
        }
        if (s.rule_id == "PAIR-4") {
            ++pattern4;
            // satisfiable without the entailment axiom, unsatisfiable with it
            EXPECT_TRUE(is_satisfiable({*s.statements[0].semantics, *s.statements[1].semantics}));
            EXPECT_FALSE(is_satisfiable(formulas_of(s)));
            EXPECT_EQ(s.axioms.size(), 1u);
        }
    }
    EXPECT_EQ(pattern4, seeds.size());
}

TEST(Splits, DefaultCounts) {
    SplitConfig cfg;
    cfg.train_per_label = 5;
    DatasetSplit d = build_splits(cfg, 1);
    EXPECT_EQ(d.test.consistent.size(), 200u);
    EXPECT_EQ(d.test.inconsistent.size(), 200u);
    EXPECT_EQ(SplitConfig{}.train_per_label, 2000u);
}

TEST(Splits, SameSeedSameBytes) {
    for (auto style : {CorpusStyle::Qa, CorpusStyle::Snli}) {
        SplitConfig cfg;
        cfg.style = style;
        cfg.train_per_label = cfg.val1_per_label = cfg.val2_per_label = cfg.test_per_label = 30;
        auto dump = [&](std::uint64_t seed) {
            DatasetSplit d = build_splits(cfg, seed);
            std::ostringstream os;
            for (const auto* pool : {&d.train, &d.validation1, &d.validation2, &d.test})
                for (const auto* v : {&pool->consistent, &pool->inconsistent})
                    for (const auto& s : *v) os << to_json(s).dump() << '\n';
            return os.str();
        };
        EXPECT_EQ(dump(7), dump(7));
        EXPECT_NE(dump(7), dump(8));
    }
}

TEST(Splits, OracleAgreesOnEveryGeneratedSet) {
    for (auto style : {CorpusStyle::Qa, CorpusStyle::Snli}) {
        SplitConfig cfg;
        cfg.style = style;
        cfg.train_per_label = 300;
        cfg.val1_per_label = cfg.val2_per_label = cfg.test_per_label = 50;
        DatasetSplit d = build_splits(cfg, 3);
        for (const auto* pool : {&d.train, &d.validation1, &d.validation2, &d.test})
            for (const auto* v : {&pool->consistent, &pool->inconsistent})
                for (const auto& s : *v) ASSERT_TRUE(validate_with_oracle(s)) << s.id;
        Rng rng(4);
        for (const auto& tag : provenance_classes())
            for (int k = 0; k < 20; ++k) ASSERT_TRUE(validate_with_oracle(sample_union(tag, d.test, rng))) << tag;
    }
}

TEST(Oracle, MislabeledSetRejected) {
    StatementSet s = gen_qa_set(desk());
    s.label = Label::Inconsistent;
    EXPECT_FALSE(validate_with_oracle(s));
}

TEST(Oracle, MissingSemantics) {
    StatementSet s;
    s.statements = {Statement::sentence("A."), Statement::sentence("B.")};
    try {
        validate_with_oracle(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingSemantics);
    }
}
