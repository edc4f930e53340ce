#include <gtest/gtest.h>

#include <random>

#include "setcoh/logic.hpp"
#include "setcoh/rng.hpp"

using namespace setcoh;

namespace {

Formula p = atom("p"), q = atom("q"), h = atom("h");

// Reference oracle: plain recursive enumeration over a std::map valuation.
bool brute_sat(const std::vector<Formula>& fs) {
    auto ids = atoms_of(fs);
    std::vector<std::string> v(ids.begin(), ids.end());
    for (std::uint64_t mask = 0; mask < (1ull << v.size()); ++mask) {
        Valuation val;
        for (std::size_t i = 0; i < v.size(); ++i) val[v[i]] = (mask >> i) & 1;
        bool all = true;
        for (const auto& f : fs) all = all && evaluate(f, val);
        if (all) return true;
    }
    return false;
}

Formula random_formula(Rng& rng, const std::vector<std::string>& names, int depth) {
    if (depth == 0 || rng.below(3) == 0) return atom(names[rng.below(names.size())]);
    switch (rng.below(3)) {
        case 0: return Formula::make_not(random_formula(rng, names, depth - 1));
        case 1: return lor(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1));
        default: return implies(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1));
    }
}

}  // namespace

TEST(Evaluate, Connectives) {
    EXPECT_FALSE(evaluate(lor(p, q), {{"p", false}, {"q", false}}));
    EXPECT_TRUE(evaluate(implies(p, h), {{"p", false}, {"h", false}}));
    EXPECT_FALSE(evaluate(negate(p), {{"p", true}}));
    EXPECT_TRUE(evaluate(lor(p, q), {{"p", false}, {"q", true}}));
    EXPECT_FALSE(evaluate(implies(p, h), {{"p", true}, {"h", false}}));
}

TEST(Evaluate, MissingAtomThrows) {
    try {
        evaluate(lor(p, q), {{"p", false}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingAssignment);
    }
}

TEST(Satisfiable, TrainExample) { EXPECT_FALSE(is_satisfiable({lor(p, q), negate(p), negate(q)})); }

TEST(Satisfiable, ModusTollensIsConsistent) { EXPECT_TRUE(is_satisfiable({implies(p, h), negate(h), negate(p)})); }

TEST(Satisfiable, EmptyCollection) {
    std::vector<Formula> none;
    EXPECT_TRUE(is_satisfiable(none));
}

TEST(Satisfiable, AgreesWithBruteForce) {
    Rng rng(42);
    std::vector<std::string> names{"a", "b", "c", "d", "e"};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Formula> fs;
        std::size_t n = 1 + rng.below(5);
        for (std::size_t i = 0; i < n; ++i) fs.push_back(random_formula(rng, names, 3));
        ASSERT_EQ(is_satisfiable(fs), brute_sat(fs)) << "trial " << trial;
    }
}

TEST(Satisfiable, IndependentComponentsBeyondWordSize) {
    // 20 disjoint satisfiable components plus one contradiction
    std::vector<Formula> fs;
    for (int i = 0; i < 10; ++i) fs.push_back(lor(atom("x" + std::to_string(i)), atom("y" + std::to_string(i))));
    EXPECT_TRUE(is_satisfiable(fs));
    fs.push_back(atom("z"));
    fs.push_back(negate(atom("z")));
    EXPECT_FALSE(is_satisfiable(fs));
}

TEST(Satisfiable, AtomBudget) {
    // one connected component over 25 atoms
    Formula chain = atom("a0");
    for (int i = 1; i < 25; ++i) chain = lor(chain, atom("a" + std::to_string(i)));
    try {
        is_satisfiable({chain});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AtomBudgetExceeded);
    }
}

TEST(Negate, Examples) {
    EXPECT_EQ(negate(p), Formula::make_not(p));
    EXPECT_EQ(negate(negate(p)), p);
    EXPECT_EQ(negate(lor(p, h)), Formula::make_not(lor(p, h)));
}

TEST(Prefix, RoundTrip) {
    Rng rng(3);
    std::vector<std::string> names{"p1", "h1", "s.x.p"};
    for (int i = 0; i < 200; ++i) {
        Formula f = random_formula(rng, names, 4);
        EXPECT_EQ(parse_prefix(to_prefix(f)), f);
    }
    EXPECT_EQ(parse_prefix("(implies p (not h))"), implies(p, negate(h)));
}

TEST(Prefix, Malformed) {
    for (const char* bad : {"(or p)", "(and p q)", "(not p", "p q", ""}) {
        try {
            parse_prefix(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ParseError) << bad;
        }
    }
}

TEST(Realize, CoupleExamples) {
    AtomTable t{{"p", {"p", "a couple walk hand in hand down a street", "no couple walks hand in hand down a street"}},
                {"h", {"h", "a couple is walking together", "No couple is walking together"}}};
    EXPECT_EQ(realize(implies(p, h), t),
              "If a couple walk hand in hand down a street, then a couple is walking together.");
    EXPECT_EQ(realize(negate(h), t), "No couple is walking together.");
}

TEST(Realize, DisjunctionTemplate) {
    AtomTable t{{"p", {"p", "P", "not P"}}, {"h", {"h", "H", "not H"}}};
    EXPECT_EQ(realize(lor(p, h), t), "Either P, or H.");
}

TEST(Substitute, ReplacesRoles) {
    Formula f = parse_prefix("(or p1 (not h1))");
    Formula g = substitute(f, {{"p1", atom("a.b.p")}, {"h1", atom("a.b.h")}});
    EXPECT_EQ(g, lor(atom("a.b.p"), negate(atom("a.b.h"))));
}
