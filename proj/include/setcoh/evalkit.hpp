#ifndef SETCOH_EVALKIT_HPP
#define SETCOH_EVALKIT_HPP

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "setcoh/datagen.hpp"
#include "setcoh/error.hpp"
#include "setcoh/trainer.hpp"
#include "setcoh/verifier.hpp"

namespace setcoh {

inline std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Mixtures

struct EvalMixture {
    std::vector<StatementSet> sets;
    std::size_t per_class = 0;
};

/// per_class sets for each of the 14 provenance classes, class-major order.
inline EvalMixture build_eval_mixture(const BasePools& pools, std::size_t per_class, std::uint64_t rng_seed,
                                      const std::vector<std::string>& classes = provenance_classes()) {
    EvalMixture m;
    m.per_class = per_class;
    std::uint64_t stream = 0;
    for (const auto& tag : classes)
        for (std::size_t n = 0; n < per_class; ++n) {
            Rng rng(derive_seed(rng_seed, stream++));
            StatementSet s = sample_union(tag, pools, rng);
            s.id = "mix-" + tag + "-" + std::to_string(n);
            m.sets.push_back(std::move(s));
        }
    return m;
}

/// Locate benchmark: classes I, CI, CCI, CCCI where the inconsistent part
/// has at least `min_size` statements and exactly one gold index.
inline EvalMixture build_locate_mixture(const BasePools& pools, std::size_t per_class, std::uint64_t rng_seed,
                                        std::size_t min_size = 4) {
    BasePools filtered;
    filtered.consistent = pools.consistent;
    for (const auto& s : pools.inconsistent)
        if (s.size() >= min_size && s.gold_inconsistent_indices && s.gold_inconsistent_indices->size() == 1)
            filtered.inconsistent.push_back(s);
    if (filtered.inconsistent.empty()) throw Error(ErrorKind::PoolExhausted, "no inconsistent sets with gold");
    return build_eval_mixture(filtered, per_class, rng_seed, {"I", "CI", "CCI", "CCCI"});
}

// ---------------------------------------------------------------------------
// Verification metrics

struct ClassMetrics {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    std::size_t support = 0;
};

struct MetricsReport {
    ClassMetrics consistent, inconsistent;
    double macro_f1 = 0.0;
    std::size_t n = 0;
    // confusion counts with "inconsistent" as the positive class
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

inline MetricsReport macro_f1(const std::vector<Label>& predictions, const std::vector<Label>& golds) {
    if (predictions.size() != golds.size())
        throw Error(ErrorKind::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                                   std::to_string(golds.size()) + " golds");
    MetricsReport r;
    r.n = golds.size();
    for (std::size_t i = 0; i < golds.size(); ++i) {
        bool pi = predictions[i] == Label::Inconsistent, gi = golds[i] == Label::Inconsistent;
        r.tp += pi && gi;
        r.fp += pi && !gi;
        r.fn += !pi && gi;
        r.tn += !pi && !gi;
    }
    auto fill = [](ClassMetrics& c, std::size_t tp, std::size_t fp, std::size_t fn) {
        c.precision = safe_div(tp, tp + fp);
        c.recall = safe_div(tp, tp + fn);
        c.f1 = safe_div(2.0 * tp, 2.0 * tp + fp + fn);
        c.support = tp + fn;
    };
    fill(r.inconsistent, r.tp, r.fp, r.fn);
    fill(r.consistent, r.tn, r.fn, r.fp);
    r.macro_f1 = 0.5 * (r.consistent.f1 + r.inconsistent.f1);
    return r;
}

inline std::vector<Label> gold_labels(const EvalMixture& m) {
    std::vector<Label> out;
    for (const auto& s : m.sets) out.push_back(s.label);
    return out;
}

inline void write_metrics_csv(std::ostream& os, const MetricsReport& r) {
    os << "class,precision,recall,f1,support\n";
    os << "consistent," << fmt_num(r.consistent.precision) << ',' << fmt_num(r.consistent.recall) << ','
       << fmt_num(r.consistent.f1) << ',' << r.consistent.support << '\n';
    os << "inconsistent," << fmt_num(r.inconsistent.precision) << ',' << fmt_num(r.inconsistent.recall) << ','
       << fmt_num(r.inconsistent.f1) << ',' << r.inconsistent.support << '\n';
    os << "macro,,," << fmt_num(r.macro_f1) << ',' << r.n << '\n';
}

/// Set-level verdicts for every set of the mixture.
inline std::vector<Label> predict_set_level(const Scorer& scorer, const EvalMixture& m) {
    std::vector<Label> out;
    for (const auto& s : m.sets) out.push_back(verify_set(scorer, s).label);
    return out;
}

// ---------------------------------------------------------------------------
// Locate metrics

struct LocateInstance {
    std::vector<std::size_t> predicted;
    std::optional<std::vector<std::size_t>> gold;
};

struct LocateReport {
    double em = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
    std::size_t instances = 0, tp = 0, fp = 0, fn = 0, exact = 0;
};

inline LocateReport locate_metrics(const std::vector<LocateInstance>& xs) {
    LocateReport r;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (!xs[k].gold) throw Error(ErrorKind::MissingGold, "instance " + std::to_string(k) + " has no gold indices");
        std::set<std::size_t> p(xs[k].predicted.begin(), xs[k].predicted.end());
        std::set<std::size_t> g(xs[k].gold->begin(), xs[k].gold->end());
        std::size_t hit = 0;
        for (auto i : p) hit += g.count(i);
        r.tp += hit;
        r.fp += p.size() - hit;
        r.fn += g.size() - hit;
        r.exact += p == g;
    }
    r.instances = xs.size();
    r.em = safe_div(r.exact, r.instances);
    r.precision = safe_div(r.tp, r.tp + r.fp);
    r.recall = safe_div(r.tp, r.tp + r.fn);
    r.f1 = safe_div(2.0 * r.tp, 2.0 * r.tp + r.fp + r.fn);
    return r;
}

inline LocateReport run_locate(const Scorer& scorer, const EvalMixture& m, std::vector<LocateResult>* out = nullptr) {
    std::vector<LocateInstance> xs;
    for (const auto& s : m.sets) {
        LocateResult lr = locate(scorer, s);
        xs.push_back({lr.removed_indices, s.gold_inconsistent_indices});
        if (out) out->push_back(std::move(lr));
    }
    return locate_metrics(xs);
}

inline void write_locate_csv(std::ostream& os, const LocateReport& r) {
    os << "em,precision,recall,f1,instances\n"
       << fmt_num(r.em) << ',' << fmt_num(r.precision) << ',' << fmt_num(r.recall) << ',' << fmt_num(r.f1) << ','
       << r.instances << '\n';
}

// ---------------------------------------------------------------------------
// MTR sweep

struct SweepRow {
    double mtr = 0.0;
    std::size_t bucket = 0;  // number of composed parts, 0 = all sets
    double macro_f1 = 0.0;
    std::size_t n = 0;
};

/// Pairwise verdicts of each set, computed once per mixture.
inline std::vector<std::vector<bool>> mixture_pair_verdicts(const Scorer& scorer, const EvalMixture& m) {
    std::vector<std::vector<bool>> out;
    out.reserve(m.sets.size());
    for (const auto& s : m.sets) out.push_back(pair_verdicts(scorer, s));
    return out;
}

inline std::vector<SweepRow> mtr_sweep(const EvalMixture& m, const std::vector<std::vector<bool>>& pairs,
                                       const std::vector<double>& grid) {
    std::vector<SweepRow> rows;
    for (double mtr : grid) {
        std::map<std::size_t, std::pair<std::vector<Label>, std::vector<Label>>> by;
        for (std::size_t i = 0; i < m.sets.size(); ++i) {
            Label p = elementwise_from_pairs(pairs[i], mtr).label;
            for (std::size_t b : {std::size_t{0}, provenance_parts(m.sets[i].provenance)}) {
                by[b].first.push_back(p);
                by[b].second.push_back(m.sets[i].label);
            }
        }
        for (auto& [b, pg] : by) rows.push_back({mtr, b, macro_f1(pg.first, pg.second).macro_f1, pg.first.size()});
    }
    return rows;
}

inline std::vector<SweepRow> mtr_sweep(const Scorer& scorer, const EvalMixture& m, const std::vector<double>& grid) {
    return mtr_sweep(m, mixture_pair_verdicts(scorer, m), grid);
}

inline std::vector<double> default_mtr_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
    return g;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "mtr,size_bucket,macro_f1,n\n";
    for (const auto& r : rows)
        os << fmt_num(r.mtr) << ',' << (r.bucket == 0 ? std::string("all") : std::to_string(r.bucket)) << ','
           << fmt_num(r.macro_f1) << ',' << r.n << '\n';
}

/// The mtr in `grid` with the best overall macro-F1 (smallest on ties).
inline double best_mtr(const std::vector<SweepRow>& rows) {
    double best = 0.0, best_f1 = -1.0;
    for (const auto& r : rows)
        if (r.bucket == 0 && r.macro_f1 > best_f1) {
            best_f1 = r.macro_f1;
            best = r.mtr;
        }
    return best;
}

// ---------------------------------------------------------------------------
// Ablation

struct Quartiles {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
};

inline Quartiles quartiles(std::vector<double> xs) {
    if (xs.empty()) return {};
    std::sort(xs.begin(), xs.end());
    auto at = [&](double f) {
        double pos = f * static_cast<double>(xs.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, xs.size() - 1);
        return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
    };
    return {at(0.25), at(0.5), at(0.75)};
}

/// Energy quartiles of validation2 sets per provenance (C, CC, CI, I, II).
inline std::array<Quartiles, kSlots> energy_quartiles(const Model& m, const BasePools& val2, std::size_t per_class,
                                                      std::uint64_t seed) {
    std::array<Quartiles, kSlots> out;
    Rng rng(seed);
    for (std::size_t s = 0; s < kSlots; ++s) {
        std::vector<double> es;
        for (std::size_t n = 0; n < per_class; ++n) {
            StatementSet u = sample_union(kSlotTags[s], val2, rng);
            es.push_back(m.energy(serialize_set(u, m.vocab(), rng.next())));
        }
        out[s] = quartiles(std::move(es));
    }
    return out;
}

struct AblationRow {
    Regime regime;
    std::array<Quartiles, kSlots> energy;
    double macro_f1 = 0.0;
    double threshold = 0.0;
};

inline std::vector<AblationRow> ablation_report(const DatasetSplit& splits, const std::vector<Regime>& regimes,
                                                const TrainerConfig& cfg, std::size_t mixture_per_class,
                                                std::size_t energy_per_class = 200) {
    std::vector<AblationRow> out;
    EvalMixture test = build_eval_mixture(splits.test, mixture_per_class, derive_seed(cfg.rng_seed, 0x7E57));
    for (Regime r : regimes) {
        TrainerConfig c = cfg;
        c.regime = r;
        TrainResult tr = train(splits, c);
        auto model = std::make_shared<const Model>(tr.model);
        EnergyScorer scorer(model, tr.threshold.value);
        AblationRow row;
        row.regime = r;
        row.energy = energy_quartiles(*model, splits.validation2, energy_per_class, derive_seed(cfg.rng_seed, 0x7A12));
        row.macro_f1 = macro_f1(predict_set_level(scorer, test), gold_labels(test)).macro_f1;
        row.threshold = tr.threshold.value;
        out.push_back(row);
    }
    return out;
}

inline void write_ablation_csv(std::ostream& os, const std::vector<AblationRow>& rows) {
    os << "regime,provenance,q1,median,q3,macro_f1\n";
    for (const auto& r : rows)
        for (std::size_t s = 0; s < kSlots; ++s)
            os << to_string(r.regime) << ',' << kSlotTags[s] << ',' << fmt_num(r.energy[s].q1) << ','
               << fmt_num(r.energy[s].median) << ',' << fmt_num(r.energy[s].q3) << ',' << fmt_num(r.macro_f1) << '\n';
}

// ---------------------------------------------------------------------------

inline void write_summary_json(const std::string& path, const std::vector<std::pair<std::string, double>>& scalars) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : scalars) j[k] = v;
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
    os << j.dump(2) << '\n';
}

}  // namespace setcoh

#endif  // SETCOH_EVALKIT_HPP
