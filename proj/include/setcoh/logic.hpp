#ifndef SETCOH_LOGIC_HPP
#define SETCOH_LOGIC_HPP

// Propositional formulas without conjunction, exact truth-table
// satisfiability, and English surface realization.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "setcoh/error.hpp"

namespace setcoh {

/// A propositional symbol together with the two sentences that express it.
struct Atom {
    std::string id;
    std::string surface_pos;
    std::string surface_neg;
};

using AtomTable = std::map<std::string, Atom, std::less<>>;
using Valuation = std::map<std::string, bool, std::less<>>;

inline bool valid_atom_id(std::string_view id) {
    if (id.empty()) return false;
    return std::none_of(id.begin(), id.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')';
    });
}

/// Immutable formula tree. Copies share structure.
class Formula {
public:
    enum class Kind { Atom, Not, Or, Implies };

    static Formula atom(std::string id) {
        if (!valid_atom_id(id)) throw Error(ErrorKind::InvalidArgument, "bad atom id '" + id + "'");
        return Formula(std::make_shared<const Node>(Node{Kind::Atom, std::move(id), nullptr, nullptr}));
    }
    /// Raw negation node; use negate() for the simplifying form.
    static Formula make_not(const Formula& f) {
        return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, f.node_, nullptr}));
    }
    static Formula make_or(const Formula& a, const Formula& b) {
        return Formula(std::make_shared<const Node>(Node{Kind::Or, {}, a.node_, b.node_}));
    }
    static Formula make_implies(const Formula& a, const Formula& b) {
        return Formula(std::make_shared<const Node>(Node{Kind::Implies, {}, a.node_, b.node_}));
    }

    Kind kind() const { return node_->kind; }
    bool is_atom() const { return node_->kind == Kind::Atom; }
    bool is_literal() const { return is_atom() || (kind() == Kind::Not && operand().is_atom()); }
    const std::string& atom_id() const { return node_->id; }
    Formula operand() const { return Formula(node_->lhs); }
    Formula lhs() const { return Formula(node_->lhs); }
    Formula rhs() const { return Formula(node_->rhs); }

    friend bool operator==(const Formula& a, const Formula& b) { return equal(a.node_.get(), b.node_.get()); }
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

    std::size_t depth() const { return depth_of(node_.get()); }

private:
    struct Node {
        Kind kind;
        std::string id;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static bool equal(const Node* a, const Node* b) {
        if (a == b) return true;
        if (a->kind != b->kind) return false;
        switch (a->kind) {
            case Kind::Atom: return a->id == b->id;
            case Kind::Not: return equal(a->lhs.get(), b->lhs.get());
            default: return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
        }
    }
    static std::size_t depth_of(const Node* n) {
        switch (n->kind) {
            case Kind::Atom: return 0;
            case Kind::Not: return 1 + depth_of(n->lhs.get());
            default: return 1 + std::max(depth_of(n->lhs.get()), depth_of(n->rhs.get()));
        }
    }

    std::shared_ptr<const Node> node_;
};

inline Formula atom(std::string id) { return Formula::atom(std::move(id)); }
inline Formula lor(const Formula& a, const Formula& b) { return Formula::make_or(a, b); }
inline Formula implies(const Formula& a, const Formula& b) { return Formula::make_implies(a, b); }

/// Not(f), collapsing a double negation.
inline Formula negate(const Formula& f) {
    if (f.kind() == Formula::Kind::Not) return f.operand();
    return Formula::make_not(f);
}

inline void collect_atoms(const Formula& f, std::set<std::string, std::less<>>& out) {
    switch (f.kind()) {
        case Formula::Kind::Atom: out.insert(f.atom_id()); break;
        case Formula::Kind::Not: collect_atoms(f.operand(), out); break;
        default:
            collect_atoms(f.lhs(), out);
            collect_atoms(f.rhs(), out);
    }
}

inline std::set<std::string, std::less<>> atoms_of(std::span<const Formula> fs) {
    std::set<std::string, std::less<>> out;
    for (const auto& f : fs) collect_atoms(f, out);
    return out;
}

inline bool evaluate(const Formula& f, const Valuation& v) {
    switch (f.kind()) {
        case Formula::Kind::Atom: {
            auto it = v.find(f.atom_id());
            if (it == v.end()) throw Error(ErrorKind::MissingAssignment, "atom '" + f.atom_id() + "' is unassigned");
            return it->second;
        }
        case Formula::Kind::Not: return !evaluate(f.operand(), v);
        case Formula::Kind::Or: return evaluate(f.lhs(), v) || evaluate(f.rhs(), v);
        case Formula::Kind::Implies: return !evaluate(f.lhs(), v) || evaluate(f.rhs(), v);
    }
    return false;
}

/// Rebuilds f with every atom replaced by its image under `sub` (atoms
/// without an entry are kept). Negations go through negate().
inline Formula substitute(const Formula& f, const std::map<std::string, Formula, std::less<>>& sub) {
    switch (f.kind()) {
        case Formula::Kind::Atom: {
            auto it = sub.find(f.atom_id());
            return it == sub.end() ? f : it->second;
        }
        case Formula::Kind::Not: return negate(substitute(f.operand(), sub));
        case Formula::Kind::Or: return lor(substitute(f.lhs(), sub), substitute(f.rhs(), sub));
        case Formula::Kind::Implies: return implies(substitute(f.lhs(), sub), substitute(f.rhs(), sub));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Prefix serialization: (implies p h), (not p), (or p h), bare atom ids.

inline std::string to_prefix(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Atom: return f.atom_id();
        case Formula::Kind::Not: return "(not " + to_prefix(f.operand()) + ")";
        case Formula::Kind::Or: return "(or " + to_prefix(f.lhs()) + " " + to_prefix(f.rhs()) + ")";
        case Formula::Kind::Implies: return "(implies " + to_prefix(f.lhs()) + " " + to_prefix(f.rhs()) + ")";
    }
    return {};
}

namespace detail {

class PrefixParser {
public:
    explicit PrefixParser(std::string_view text) : text_(text) {}

    Formula parse_all() {
        Formula f = parse();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return f;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    std::string_view symbol() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
               text_[pos_] != ')')
            ++pos_;
        if (start == pos_) fail("expected symbol");
        return text_.substr(start, pos_ - start);
    }
    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    Formula parse() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (text_[pos_] != '(') return Formula::atom(std::string(symbol()));
        ++pos_;
        std::string_view op = symbol();
        Formula result = [&] {
            if (op == "not") return Formula::make_not(parse());
            if (op == "or") {
                Formula a = parse();
                return lor(a, parse());
            }
            if (op == "implies") {
                Formula a = parse();
                return implies(a, parse());
            }
            fail("unknown operator '" + std::string(op) + "'");
            return Formula::atom("_");
        }();
        expect(')');
        return result;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::ParseError, msg + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_prefix(std::string_view text) { return detail::PrefixParser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Satisfiability

inline constexpr std::size_t kMaxOracleAtoms = 24;

namespace detail {

// Formula compiled against a dense atom index; evaluated 64 valuations at a time.
struct CompiledFormula {
    enum Op : std::uint8_t { Push, Not, Or, Implies };
    std::vector<std::pair<Op, std::uint32_t>> code;

    std::uint64_t eval(std::span<const std::uint64_t> atom_words, std::vector<std::uint64_t>& stack) const {
        stack.clear();
        for (auto [op, arg] : code) {
            switch (op) {
                case Push: stack.push_back(atom_words[arg]); break;
                case Not: stack.back() = ~stack.back(); break;
                case Or: {
                    std::uint64_t b = stack.back();
                    stack.pop_back();
                    stack.back() |= b;
                    break;
                }
                case Implies: {
                    std::uint64_t b = stack.back();
                    stack.pop_back();
                    stack.back() = ~stack.back() | b;
                    break;
                }
            }
        }
        return stack.back();
    }
};

inline void compile_into(const Formula& f, const std::map<std::string, std::uint32_t, std::less<>>& index,
                         CompiledFormula& out) {
    switch (f.kind()) {
        case Formula::Kind::Atom: out.code.emplace_back(CompiledFormula::Push, index.at(f.atom_id())); break;
        case Formula::Kind::Not:
            compile_into(f.operand(), index, out);
            out.code.emplace_back(CompiledFormula::Not, 0);
            break;
        case Formula::Kind::Or:
            compile_into(f.lhs(), index, out);
            compile_into(f.rhs(), index, out);
            out.code.emplace_back(CompiledFormula::Or, 0);
            break;
        case Formula::Kind::Implies:
            compile_into(f.lhs(), index, out);
            compile_into(f.rhs(), index, out);
            out.code.emplace_back(CompiledFormula::Implies, 0);
            break;
    }
}

// Exhaustive enumeration over one group of formulas sharing `n_atoms` atoms.
inline bool enumerate_component(std::span<const CompiledFormula> fs, std::size_t n_atoms) {
    static constexpr std::uint64_t kLowPatterns[6] = {
        0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
        0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
    };
    std::vector<std::uint64_t> words(n_atoms);
    std::vector<std::uint64_t> stack;
    const std::size_t low = std::min<std::size_t>(n_atoms, 6);
    const std::uint64_t valid = n_atoms >= 6 ? ~0ull : ((1ull << (1u << n_atoms)) - 1);
    const std::uint64_t chunks = n_atoms > 6 ? (1ull << (n_atoms - 6)) : 1;
    for (std::size_t a = 0; a < low; ++a) words[a] = kLowPatterns[a];
    for (std::uint64_t chunk = 0; chunk < chunks; ++chunk) {
        for (std::size_t a = 6; a < n_atoms; ++a) words[a] = ((chunk >> (a - 6)) & 1u) ? ~0ull : 0ull;
        std::uint64_t acc = valid;
        for (const auto& f : fs) {
            acc &= f.eval(words, stack);
            if (!acc) break;
        }
        if (acc) return true;
    }
    return false;
}

}  // namespace detail

/// True iff one valuation over the union of atoms satisfies every formula.
/// Formulas over disjoint atoms are decided independently, each by full
/// truth-table enumeration.
inline bool is_satisfiable(std::span<const Formula> fs) {
    if (fs.empty()) return true;
    auto all_atoms = atoms_of(fs);
    if (all_atoms.size() > kMaxOracleAtoms)
        throw Error(ErrorKind::AtomBudgetExceeded, std::to_string(all_atoms.size()) + " atoms exceed the limit of " +
                                                       std::to_string(kMaxOracleAtoms));

    std::map<std::string, std::uint32_t, std::less<>> global;
    for (const auto& a : all_atoms) global.emplace(a, static_cast<std::uint32_t>(global.size()));

    // union-find over atoms
    std::vector<std::uint32_t> parent(global.size());
    std::iota(parent.begin(), parent.end(), 0u);
    std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<std::uint32_t> root_atom(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        std::set<std::string, std::less<>> as;
        collect_atoms(fs[i], as);
        std::uint32_t first = global.at(*as.begin());
        for (const auto& a : as) parent[find(global.at(a))] = find(first);
        root_atom[i] = first;
    }

    std::map<std::uint32_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < fs.size(); ++i) groups[find(root_atom[i])].push_back(i);

    for (const auto& [root, members] : groups) {
        std::vector<Formula> part;
        for (auto i : members) part.push_back(fs[i]);
        auto local_atoms = atoms_of(part);
        std::map<std::string, std::uint32_t, std::less<>> local;
        for (const auto& a : local_atoms) local.emplace(a, static_cast<std::uint32_t>(local.size()));
        std::vector<detail::CompiledFormula> compiled(part.size());
        for (std::size_t k = 0; k < part.size(); ++k) detail::compile_into(part[k], local, compiled[k]);
        if (!detail::enumerate_component(compiled, local.size())) return false;
    }
    return true;
}

inline bool is_satisfiable(std::initializer_list<Formula> fs) {
    std::vector<Formula> v(fs);
    return is_satisfiable(std::span<const Formula>(v));
}

// ---------------------------------------------------------------------------
// Surface realization

namespace detail {

inline const Atom& lookup_atom(const AtomTable& atoms, const std::string& id) {
    auto it = atoms.find(id);
    if (it == atoms.end()) throw Error(ErrorKind::InvalidArgument, "no surface template for atom '" + id + "'");
    return it->second;
}

inline std::string clause(const Formula& f, const AtomTable& atoms) {
    switch (f.kind()) {
        case Formula::Kind::Atom: return lookup_atom(atoms, f.atom_id()).surface_pos;
        case Formula::Kind::Not:
            if (f.operand().is_atom()) return lookup_atom(atoms, f.operand().atom_id()).surface_neg;
            return "it is not the case that " + clause(f.operand(), atoms);
        case Formula::Kind::Or: return "either " + clause(f.lhs(), atoms) + ", or " + clause(f.rhs(), atoms);
        case Formula::Kind::Implies: return "if " + clause(f.lhs(), atoms) + ", then " + clause(f.rhs(), atoms);
    }
    return {};
}

}  // namespace detail

/// Deterministic English sentence for f: capitalized, period-terminated.
inline std::string realize(const Formula& f, const AtomTable& atoms) {
    std::string s = detail::clause(f, atoms);
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    s += '.';
    return s;
}

}  // namespace setcoh

#endif  // SETCOH_LOGIC_HPP
