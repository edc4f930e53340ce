#ifndef SETCOH_VERIFIER_HPP
#define SETCOH_VERIFIER_HPP

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "setcoh/error.hpp"
#include "setcoh/logic.hpp"
#include "setcoh/model.hpp"
#include "setcoh/statement.hpp"
#include "setcoh/tokenizer.hpp"
#include "setcoh/trainer.hpp"

namespace setcoh {

class Scorer {
public:
    virtual ~Scorer() = default;
    virtual double score(const StatementSet& s) const = 0;
    virtual double threshold() const = 0;
    virtual std::string name() const = 0;
};

class EnergyScorer : public Scorer {
public:
    EnergyScorer(std::shared_ptr<const Model> m, double threshold) : m_(std::move(m)), th_(threshold) {}
    double score(const StatementSet& s) const override { return m_->energy(serialize_set(s, m_->vocab(), 0)); }
    double threshold() const override { return th_; }
    std::string name() const override { return "energy"; }

private:
    std::shared_ptr<const Model> m_;
    double th_;
};

/// Softmax probability of the inconsistent class from the binary head.
class BinaryScorer : public Scorer {
public:
    BinaryScorer(std::shared_ptr<const Model> m, double threshold) : m_(std::move(m)), th_(threshold) {}
    double score(const StatementSet& s) const override {
        return inconsistent_prob(m_->logits(serialize_set(s, m_->vocab(), 0)));
    }
    double threshold() const override { return th_; }
    std::string name() const override { return "binary"; }

private:
    std::shared_ptr<const Model> m_;
    double th_;
};

/// Truth-table oracle: 1 if the statements (with axioms) are unsatisfiable.
class OracleScorer : public Scorer {
public:
    double score(const StatementSet& s) const override { return is_satisfiable(formulas_of(s)) ? 0.0 : 1.0; }
    double threshold() const override { return 0.5; }
    std::string name() const override { return "oracle"; }
};

/// Graded oracle: the binary oracle score plus the fraction of unsatisfiable
/// 2-subsets. Verdicts match OracleScorer; scores separate inconsistent sets.
class OraclePairFractionScorer : public Scorer {
public:
    double score(const StatementSet& s) const override {
        double base = is_satisfiable(formulas_of(s)) ? 0.0 : 1.0;
        const std::size_t n = s.size();
        if (n < 2) return base;
        std::size_t bad = 0, total = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                ++total;
                bad += !is_satisfiable(formulas_of(s, {i, j}));
            }
        return base + static_cast<double>(bad) / static_cast<double>(total);
    }
    double threshold() const override { return 0.5; }
    std::string name() const override { return "oracle-pairs"; }
};

/// Scores looked up by set id from a CSV with a `threshold=<real>` header
/// line followed by `set_id,score` rows.
class ExternalScorer : public Scorer {
public:
    ExternalScorer(std::map<std::string, double> scores, double threshold)
        : scores_(std::move(scores)), th_(threshold) {}

    double score(const StatementSet& s) const override {
        auto it = scores_.find(s.id);
        if (it == scores_.end()) throw Error(ErrorKind::UnknownId, "no external score for '" + s.id + "'");
        return it->second;
    }
    double threshold() const override { return th_; }
    std::string name() const override { return "external"; }

private:
    std::map<std::string, double> scores_;
    double th_;
};

inline std::unique_ptr<ExternalScorer> external_scorer_from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::Io, "cannot read " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("threshold=", 0) != 0)
        throw Error(ErrorKind::MalformedRecord, path + ": first line must be threshold=<real>");
    double th;
    try {
        th = std::stod(line.substr(10));
    } catch (const std::exception&) {
        throw Error(ErrorKind::MalformedRecord, path + ": bad threshold '" + line.substr(10) + "'");
    }
    std::map<std::string, double> scores;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw Error(ErrorKind::MalformedRecord, path + ": line " + std::to_string(lineno) + " lacks a comma");
        try {
            scores[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw Error(ErrorKind::MalformedRecord, path + ": line " + std::to_string(lineno) + " has a bad score");
        }
    }
    return std::make_unique<ExternalScorer>(std::move(scores), th);
}

inline void write_external_scores(const std::string& path, const std::vector<std::pair<std::string, double>>& rows,
                                  double threshold) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", threshold);
    os << "threshold=" << buf << '\n';
    for (const auto& [id, s] : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", s);
        os << id << ',' << buf << '\n';
    }
}

// ---------------------------------------------------------------------------

struct Verdict {
    Label label = Label::Consistent;
    double score = 0.0;
    std::size_t pairs = 0;
    std::size_t inconsistent_pairs = 0;
    double ratio = 0.0;
};

inline Verdict verify_set(const Scorer& scorer, const StatementSet& s) {
    if (s.size() < 2) throw Error(ErrorKind::InvalidArgument, "verification needs at least two statements");
    Verdict v;
    v.score = scorer.score(s);
    v.label = predicts_consistent(v.score, scorer.threshold()) ? Label::Consistent : Label::Inconsistent;
    return v;
}

/// Per-pair verdicts in (0,1), (0,2), ..., (n-2,n-1) order.
inline std::vector<bool> pair_verdicts(const Scorer& scorer, const StatementSet& s) {
    std::vector<bool> out;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            out.push_back(!predicts_consistent(scorer.score(subset(s, {i, j})), scorer.threshold()));
    return out;
}

inline Verdict elementwise_from_pairs(const std::vector<bool>& inconsistent_pairs, double mtr) {
    Verdict v;
    v.pairs = inconsistent_pairs.size();
    for (bool b : inconsistent_pairs) v.inconsistent_pairs += b;
    v.ratio = v.pairs ? static_cast<double>(v.inconsistent_pairs) / static_cast<double>(v.pairs) : 0.0;
    v.score = v.ratio;
    v.label = v.ratio <= mtr ? Label::Consistent : Label::Inconsistent;
    return v;
}

inline Verdict verify_elementwise(const Scorer& scorer, const StatementSet& s, double mtr) {
    if (s.size() < 2) throw Error(ErrorKind::InvalidArgument, "verification needs at least two statements");
    if (!(mtr >= 0.0 && mtr <= 1.0)) throw Error(ErrorKind::InvalidArgument, "mtr must lie in [0, 1]");
    return elementwise_from_pairs(pair_verdicts(scorer, s), mtr);
}

enum class LocateTerminal { ConsistentReached, SizeTwoStop };

inline const char* to_string(LocateTerminal t) {
    return t == LocateTerminal::ConsistentReached ? "consistent-reached" : "size-two-stop";
}

struct LocateStep {
    double set_score = 0.0;
    std::vector<double> leave_one_out;  // indexed like the remaining statements
    std::optional<std::size_t> removed;  // original index
};

struct LocateResult {
    std::vector<std::size_t> removed_indices;
    LocateTerminal terminal = LocateTerminal::ConsistentReached;
    std::vector<LocateStep> trace;
    std::size_t scorer_calls = 0;
};

/// Greedy leave-one-out removal until the remainder is judged consistent.
inline LocateResult locate(const Scorer& scorer, const StatementSet& s) {
    if (s.size() < 2) throw Error(ErrorKind::InvalidArgument, "locate needs at least two statements");
    LocateResult res;
    std::vector<std::size_t> remaining(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) remaining[i] = i;
    double current = scorer.score(s);
    ++res.scorer_calls;
    for (;;) {
        LocateStep step;
        step.set_score = current;
        if (predicts_consistent(current, scorer.threshold())) {
            res.terminal = LocateTerminal::ConsistentReached;
            res.trace.push_back(step);
            break;
        }
        if (remaining.size() == 2) {
            res.terminal = LocateTerminal::SizeTwoStop;
            res.trace.push_back(step);
            break;
        }
        std::size_t best = 0;
        double best_score = 0.0;
        for (std::size_t k = 0; k < remaining.size(); ++k) {
            std::vector<std::size_t> keep;
            for (std::size_t m = 0; m < remaining.size(); ++m)
                if (m != k) keep.push_back(remaining[m]);
            double sc = scorer.score(subset(s, keep));
            ++res.scorer_calls;
            step.leave_one_out.push_back(sc);
            // remaining is kept in ascending original order, so strict < keeps the smallest index on ties
            if (k == 0 || sc < best_score) {
                best = k;
                best_score = sc;
            }
        }
        step.removed = remaining[best];
        res.removed_indices.push_back(remaining[best]);
        res.trace.push_back(std::move(step));
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
        current = best_score;
    }
    return res;
}

}  // namespace setcoh

#endif  // SETCOH_VERIFIER_HPP
