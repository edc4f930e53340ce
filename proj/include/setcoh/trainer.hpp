#ifndef SETCOH_TRAINER_HPP
#define SETCOH_TRAINER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "setcoh/datagen.hpp"
#include "setcoh/error.hpp"
#include "setcoh/model.hpp"
#include "setcoh/optim.hpp"
#include "setcoh/rng.hpp"
#include "setcoh/tokenizer.hpp"

namespace setcoh {

// ---------------------------------------------------------------------------
// Contrasts

enum class ContrastKind { C_I, C_CI, C_II, CC_I, CC_CI, CC_II, CI_I, I_II };
enum class Regime { Basic, Six, Eight };

inline constexpr std::array<ContrastKind, 8> kAllContrasts{
    ContrastKind::C_I,   ContrastKind::C_CI,  ContrastKind::C_II, ContrastKind::CC_I,
    ContrastKind::CC_CI, ContrastKind::CC_II, ContrastKind::CI_I, ContrastKind::I_II,
};

inline std::size_t regime_size(Regime r) { return r == Regime::Basic ? 1 : r == Regime::Six ? 6 : 8; }

inline std::vector<ContrastKind> contrasts_of(Regime r) {
    return {kAllContrasts.begin(), kAllContrasts.begin() + static_cast<std::ptrdiff_t>(regime_size(r))};
}

inline Regime parse_regime(std::string_view s) {
    if (s == "basic") return Regime::Basic;
    if (s == "six") return Regime::Six;
    if (s == "eight") return Regime::Eight;
    throw Error(ErrorKind::InvalidArgument, "unknown regime '" + std::string(s) + "'");
}
inline const char* to_string(Regime r) { return r == Regime::Basic ? "basic" : r == Regime::Six ? "six" : "eight"; }

// Sets built from one base pair, indexed by GroupSlot.
enum GroupSlot { kSlotC, kSlotCC, kSlotCI, kSlotI, kSlotII, kSlots };

inline constexpr std::array<const char*, kSlots> kSlotTags{"C", "CC", "CI", "I", "II"};

/// (more consistent, less consistent) slots of a contrast.
inline std::pair<GroupSlot, GroupSlot> contrast_slots(ContrastKind k) {
    switch (k) {
        case ContrastKind::C_I: return {kSlotC, kSlotI};
        case ContrastKind::C_CI: return {kSlotC, kSlotCI};
        case ContrastKind::C_II: return {kSlotC, kSlotII};
        case ContrastKind::CC_I: return {kSlotCC, kSlotI};
        case ContrastKind::CC_CI: return {kSlotCC, kSlotCI};
        case ContrastKind::CC_II: return {kSlotCC, kSlotII};
        case ContrastKind::CI_I: return {kSlotCI, kSlotI};
        case ContrastKind::I_II: return {kSlotI, kSlotII};
    }
    return {kSlotC, kSlotI};
}

inline double hinge_loss(double e_more, double e_less, double alpha) {
    return std::max(e_more - e_less + alpha, 0.0);
}

struct Contrast {
    StatementSet more;
    StatementSet less;
    ContrastKind kind;
};

/// One instance per regime contrast for each of `n_base` sampled base pairs.
inline std::vector<Contrast> build_contrast_batch(const BasePools& pools, Regime regime, std::uint64_t rng_seed,
                                                  std::size_t n_base = 1) {
    if (pools.consistent.empty() || pools.inconsistent.empty())
        throw Error(ErrorKind::PoolExhausted, "contrast batches need consistent and inconsistent pools");
    Rng rng(rng_seed);
    std::vector<Contrast> out;
    for (std::size_t b = 0; b < n_base; ++b) {
        const StatementSet& sc = pools.consistent[rng.below(pools.consistent.size())];
        const StatementSet& si = pools.inconsistent[rng.below(pools.inconsistent.size())];
        std::array<StatementSet, kSlots> g{
            sc, sample_union("CC", pools, rng, &sc), sample_union("IC", pools, rng, &si), si,
            sample_union("II", pools, rng, &si)};
        for (auto k : contrasts_of(regime)) {
            auto [m, l] = contrast_slots(k);
            out.push_back({g[m], g[l], k});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Threshold

enum class ScoreSource { Energy, InconsistentSoftmax };

inline const char* to_string(ScoreSource s) { return s == ScoreSource::Energy ? "energy" : "inconsistent-softmax"; }

struct Threshold {
    double value = 0.0;
    int learned_epoch = -1;
    ScoreSource source = ScoreSource::Energy;
    double macro_accuracy = 0.0;
    bool degenerate = false;
};

/// Decision rule shared by every scorer.
inline bool predicts_consistent(double score, double threshold) { return score < threshold; }

inline double macro_accuracy_at(const std::vector<double>& scores, const std::vector<bool>& inconsistent, double th) {
    std::size_t nc = 0, ni = 0, okc = 0, oki = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        bool pc = predicts_consistent(scores[i], th);
        if (inconsistent[i]) {
            ++ni;
            oki += !pc;
        } else {
            ++nc;
            okc += pc;
        }
    }
    double ac = nc ? static_cast<double>(okc) / nc : 0.0, ai = ni ? static_cast<double>(oki) / ni : 0.0;
    if (!nc) return ai;
    if (!ni) return ac;
    return 0.5 * (ac + ai);
}

/// Candidates: -inf, midpoints of consecutive sorted scores, +inf. Returns
/// the best macro accuracy, ties to the smallest candidate. If all scores
/// are equal the +inf side is returned and the result is flagged.
inline Threshold learn_threshold(const std::vector<double>& scores, const std::vector<bool>& inconsistent,
                                 ScoreSource source = ScoreSource::Energy) {
    if (scores.empty()) throw Error(ErrorKind::EmptyValidation, "no validation scores");
    if (scores.size() != inconsistent.size()) throw Error(ErrorKind::LengthMismatch, "scores vs labels");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, bool>> v;
    for (std::size_t i = 0; i < scores.size(); ++i) v.emplace_back(scores[i], inconsistent[i]);
    std::sort(v.begin(), v.end());
    std::size_t nc = 0, ni = 0;
    for (auto& [s, inc] : v) (inc ? ni : nc)++;
    auto macro = [&](std::size_t cons_below, std::size_t inc_below) {
        double ac = nc ? static_cast<double>(cons_below) / nc : 0.0;
        double ai = ni ? static_cast<double>(ni - inc_below) / ni : 0.0;
        if (!nc) return ai;
        if (!ni) return ac;
        return 0.5 * (ac + ai);
    };

    Threshold best;
    best.source = source;
    if (v.front().first == v.back().first) {
        best.value = inf;
        best.macro_accuracy = macro(nc, ni);
        best.degenerate = true;
        return best;
    }
    best.value = -inf;
    best.macro_accuracy = macro(0, 0);
    // Sweep: before candidate m_k = (v[k] + v[k+1]) / 2, the scores strictly
    // below it are exactly those at positions <= k unless v[k] == v[k+1].
    std::size_t cb = 0, ib = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        (v[k].second ? ib : cb)++;
        double cand;
        if (k + 1 < v.size()) {
            if (v[k].first == v[k + 1].first) continue;
            cand = v[k].first + (v[k + 1].first - v[k].first) / 2.0;
        } else {
            cand = inf;
        }
        double acc = macro(cb, ib);
        if (acc > best.macro_accuracy) {
            best.macro_accuracy = acc;
            best.value = cand;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Training

enum class L2Anchor { Zero, Initial };

struct TrainerConfig {
    double alpha = 0.01;
    OptimizerConfig optimizer{};
    std::size_t epochs = 60;
    std::size_t batch_size = 16;  // base pairs per optimizer step
    Regime regime = Regime::Eight;
    std::uint64_t rng_seed = 1;
    double l2_weight = 1e-5;
    L2Anchor l2_anchor = L2Anchor::Zero;
    ModelDims dims{};
    std::size_t val_per_class = 200;  // validation1 sets per provenance class
    double subset_prob = 0.5;         // chance a base part is replaced by a label-preserving subset
    std::size_t max_union_parts = 4;  // CC and CI draw 2..max parts
};

struct EpochLog {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    double val1_macro_acc = 0.0;
    double threshold = 0.0;
    std::array<double, kSlots> median_energy{};
};

struct TrainResult {
    Model model;
    Threshold threshold;
    std::vector<EpochLog> log;
    double initial_loss = 0.0;
};

inline void write_training_log(std::ostream& os, const std::vector<EpochLog>& log) {
    os << "epoch,mean_hinge_loss,val1_macro_acc,threshold";
    for (auto t : kSlotTags) os << ",median_" << t;
    os << '\n';
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.9g", x);
        return std::string(buf);
    };
    for (const auto& r : log) {
        os << r.epoch << ',' << num(r.mean_loss) << ',' << num(r.val1_macro_acc) << ',' << num(r.threshold);
        for (double m : r.median_energy) os << ',' << num(m);
        os << '\n';
    }
}

inline double median_of(std::vector<double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Vocabulary over every base set of the training split.
inline Vocabulary build_vocabulary(const BasePools& train) {
    std::vector<const StatementSet*> ptrs;
    for (const auto& s : train.consistent) ptrs.push_back(&s);
    for (const auto& s : train.inconsistent) ptrs.push_back(&s);
    return Vocabulary::build(ptrs);
}

namespace detail {

// Base sets pre-tokenized once; unions are assembled from parts.
struct EncodedSet {
    std::vector<std::vector<std::int32_t>> statements;
    std::vector<std::uint32_t> namespaces;
    const StatementSet* source = nullptr;
};

struct EncodedPools {
    std::vector<EncodedSet> consistent, inconsistent;
};

inline EncodedPools encode_pools(const BasePools& pools, const Vocabulary& vocab,
                                 std::map<std::string, std::uint32_t, std::less<>>& ns_ids) {
    auto enc = [&](const StatementSet& s) {
        EncodedSet e;
        e.source = &s;
        for (const auto& st : s.statements) {
            std::vector<std::int32_t> ids;
            for (const auto& tok : tokenize(statement_text(st))) ids.push_back(vocab.lookup(tok));
            e.statements.push_back(std::move(ids));
        }
        for (const auto& ns : namespaces_of(s))
            e.namespaces.push_back(ns_ids.emplace(ns, static_cast<std::uint32_t>(ns_ids.size())).first->second);
        return e;
    };
    EncodedPools out;
    for (const auto& s : pools.consistent) out.consistent.push_back(enc(s));
    for (const auto& s : pools.inconsistent) out.inconsistent.push_back(enc(s));
    return out;
}

inline TokenizedSet assemble(const std::vector<const EncodedSet*>& parts) {
    TokenizedSet t;
    t.tokens.push_back(kCls);
    t.offsets.push_back(1);
    for (const auto* p : parts)
        for (const auto& st : p->statements) {
            t.tokens.insert(t.tokens.end(), st.begin(), st.end());
            t.offsets.push_back(t.tokens.size());
        }
    return t;
}

inline bool disjoint(const std::vector<const EncodedSet*>& parts, const EncodedSet& cand) {
    for (const auto* p : parts)
        for (auto a : p->namespaces)
            for (auto b : cand.namespaces)
                if (a == b) return false;
    return true;
}

// Adds partners drawn from `pool` until `parts` holds `total` sets.
inline void add_partners(std::vector<const EncodedSet*>& parts, const std::vector<EncodedSet>& pool,
                         std::size_t total, Rng& rng) {
    for (std::size_t tries = 0; parts.size() < total; ++tries) {
        if (tries > 10000) throw Error(ErrorKind::PoolExhausted, "no disjoint partner available");
        const EncodedSet& c = pool[rng.below(pool.size())];
        if (disjoint(parts, c)) parts.push_back(&c);
    }
}

// Random proper subset (at least two statements) with the same oracle
// label as the whole set. Any subset of a consistent set qualifies; for an
// inconsistent set a few draws are tried before giving up.
inline EncodedSet drop_statements(const EncodedSet& s, bool inconsistent, Rng& rng) {
    const std::size_t n = s.statements.size();
    if (n < 3) return s;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const auto keep = static_cast<std::size_t>(rng.between(2, static_cast<std::int64_t>(n) - 1));
        auto idx = rng.sample_indices(n, keep);
        std::sort(idx.begin(), idx.end());
        if (inconsistent && (!s.source || is_satisfiable(formulas_of(*s.source, idx)))) continue;
        EncodedSet out;
        out.namespaces = s.namespaces;
        for (auto i : idx) out.statements.push_back(s.statements[i]);
        return out;
    }
    return s;
}

// Tokenized C, CC, CI, I, II sets for one base pair. CC and CI take 2 to
// `max_parts` parts. Each base part is replaced by a label-preserving subset
// with probability `subset_prob`.
inline std::array<TokenizedSet, kSlots> build_group(const EncodedSet& c, const EncodedSet& i, const EncodedPools& pools,
                                                    Rng& rng, double subset_prob = 0.0, std::size_t max_parts = 2) {
    std::vector<const EncodedSet*> cc{&c}, ci{&i}, ii{&i};
    const auto hi = static_cast<std::int64_t>(std::max<std::size_t>(max_parts, 2));
    add_partners(cc, pools.consistent, static_cast<std::size_t>(rng.between(2, hi)), rng);
    add_partners(ci, pools.consistent, static_cast<std::size_t>(rng.between(2, hi)), rng);
    add_partners(ii, pools.inconsistent, 2, rng);
    std::vector<EncodedSet> dropped;
    dropped.reserve(static_cast<std::size_t>(2 * hi + 2));
    auto maybe_drop = [&](const EncodedSet*& p, bool inconsistent) {
        if (subset_prob > 0.0 && rng.uniform() < subset_prob) {
            dropped.push_back(drop_statements(*p, inconsistent, rng));
            p = &dropped.back();
        }
    };
    const EncodedSet *base_c = &c, *base_i = &i;
    maybe_drop(base_c, false);
    maybe_drop(base_i, true);
    cc[0] = base_c;
    ci[0] = ii[0] = base_i;
    for (std::size_t k = 1; k < cc.size(); ++k) maybe_drop(cc[k], false);
    for (std::size_t k = 1; k < ci.size(); ++k) maybe_drop(ci[k], false);
    maybe_drop(ii[1], true);
    std::array<TokenizedSet, kSlots> g;
    g[kSlotC] = assemble({base_c});
    g[kSlotI] = assemble({base_i});
    g[kSlotCC] = assemble(cc);
    g[kSlotCI] = assemble(ci);
    g[kSlotII] = assemble(ii);
    return g;
}

// Validation1 sets per slot, fixed for the whole run.
struct ValidationSets {
    std::array<std::vector<TokenizedSet>, kSlots> slots;
};

inline ValidationSets build_validation(const BasePools& val, const Vocabulary& vocab, std::size_t per_class,
                                       std::uint64_t seed) {
    ValidationSets v;
    Rng rng(seed);
    for (std::size_t s = 0; s < kSlots; ++s)
        for (std::size_t n = 0; n < per_class; ++n) {
            StatementSet u = sample_union(kSlotTags[s], val, rng);
            v.slots[s].push_back(serialize_set(u, vocab, rng.next()));
        }
    return v;
}

inline bool all_finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

using ScoreFn = std::function<double(const Model&, const TokenizedSet&)>;

inline std::pair<Threshold, std::array<double, kSlots>> evaluate_validation(const Model& m, const ValidationSets& v,
                                                                           const ScoreFn& score, ScoreSource src) {
    std::vector<double> scores;
    std::vector<bool> inc;
    std::array<double, kSlots> med{};
    for (std::size_t s = 0; s < kSlots; ++s) {
        std::vector<double> es;
        for (const auto& t : v.slots[s]) es.push_back(score(m, t));
        med[s] = median_of(es);
        for (double e : es) {
            scores.push_back(e);
            inc.push_back(s == kSlotCI || s == kSlotI || s == kSlotII);
        }
    }
    return {learn_threshold(scores, inc, src), med};
}

// Loss and gradient contribution of one group; returns the summed loss.
using GroupStep = std::function<double(const Model&, const std::array<TokenizedSet, kSlots>&, std::vector<double>&,
                                       std::size_t& terms)>;

inline GroupStep energy_step(const TrainerConfig& cfg) {
    auto kinds = contrasts_of(cfg.regime);
    return [kinds, alpha = cfg.alpha](const Model& m, const std::array<TokenizedSet, kSlots>& g,
                                      std::vector<double>& grad, std::size_t& terms) {
        std::array<Model::Cache, kSlots> cache;
        std::array<bool, kSlots> used{};
        for (auto k : kinds) {
            auto [a, b] = contrast_slots(k);
            used[a] = used[b] = true;
        }
        for (std::size_t s = 0; s < kSlots; ++s)
            if (used[s]) m.forward(g[s], cache[s]);
        std::array<double, kSlots> coef{};
        double loss = 0.0;
        for (auto k : kinds) {
            auto [a, b] = contrast_slots(k);
            double l = hinge_loss(cache[a].energy, cache[b].energy, alpha);
            loss += l;
            ++terms;
            if (l > 0.0) {
                coef[a] += 1.0;
                coef[b] -= 1.0;
            }
        }
        for (std::size_t s = 0; s < kSlots; ++s)
            if (coef[s] != 0.0) m.backward(g[s], cache[s], coef[s], {0.0, 0.0}, grad);
        return loss;
    };
}

inline GroupStep binary_step() {
    return [](const Model& m, const std::array<TokenizedSet, kSlots>& g, std::vector<double>& grad,
              std::size_t& terms) {
        double loss = 0.0;
        for (std::size_t s = 0; s < kSlots; ++s) {
            Model::Cache c;
            m.forward(g[s], c);
            const int y = (s == kSlotCI || s == kSlotI || s == kSlotII) ? 1 : 0;
            const double mx = std::max(c.logits[0], c.logits[1]);
            const double z0 = std::exp(c.logits[0] - mx), z1 = std::exp(c.logits[1] - mx);
            const double p1 = z1 / (z0 + z1), p0 = 1.0 - p1;
            loss += -(c.logits[y] - mx - std::log(z0 + z1));
            ++terms;
            m.backward(g[s], c, 0.0, {p0 - (y == 0), p1 - (y == 1)}, grad);
        }
        return loss;
    };
}

struct LoopSpec {
    // Base pairs for one epoch as (consistent index, inconsistent index, domain).
    std::function<std::vector<std::array<std::size_t, 3>>(std::size_t epoch, Rng&)> schedule;
    std::vector<const EncodedPools*> domains;
    GroupStep step;
    ScoreFn score;
    ScoreSource source = ScoreSource::Energy;
    const ValidationSets* validation = nullptr;
    std::vector<double> l2_anchor;  // empty: no regularization
    bool select_best = true;
};

inline TrainResult run_loop(Model model, const TrainerConfig& cfg, const LoopSpec& spec) {
    TrainResult res;
    Optimizer opt(cfg.optimizer, model.num_params());
    std::vector<double> grad(model.num_params());
    std::optional<Model> best;
    Threshold best_th;
    double best_acc = -1.0;
    bool first_batch = true;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(derive_seed(cfg.rng_seed, 0x5EED0000ull + epoch));
        auto plan = spec.schedule(epoch, rng);
        double loss_sum = 0.0;
        std::size_t terms_sum = 0;
        for (std::size_t b = 0; b < plan.size(); b += cfg.batch_size) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double loss = 0.0;
            std::size_t terms = 0;
            const std::size_t end = std::min(plan.size(), b + cfg.batch_size);
            for (std::size_t k = b; k < end; ++k) {
                const auto& pools = *spec.domains[plan[k][2]];
                auto g = build_group(pools.consistent[plan[k][0]], pools.inconsistent[plan[k][1]], pools, rng,
                                     cfg.subset_prob, cfg.max_union_parts);
                loss += spec.step(model, g, grad, terms);
            }
            if (!spec.l2_anchor.empty() && cfg.l2_weight > 0.0) {
                auto th = model.params();
                for (std::size_t i = 0; i < th.size(); ++i) {
                    const double diff = th[i] - spec.l2_anchor[i];
                    loss += cfg.l2_weight * diff * diff;
                    grad[i] += 2.0 * cfg.l2_weight * diff;
                }
            }
            if (!std::isfinite(loss) || !all_finite(grad))
                throw Error(ErrorKind::Divergence,
                            "non-finite loss at epoch " + std::to_string(epoch) + " step " + std::to_string(b / cfg.batch_size));
            if (first_batch) {
                res.initial_loss = terms ? loss / static_cast<double>(terms) : 0.0;
                first_batch = false;
            }
            loss_sum += loss;
            terms_sum += terms;
            opt.step(model.params(), grad);
            if (!all_finite(model.params()))
                throw Error(ErrorKind::Divergence, "non-finite parameters at epoch " + std::to_string(epoch));
        }

        EpochLog row;
        row.epoch = epoch + 1;
        row.mean_loss = terms_sum ? loss_sum / static_cast<double>(terms_sum) : 0.0;
        if (spec.validation) {
            auto [th, med] = evaluate_validation(model, *spec.validation, spec.score, spec.source);
            th.learned_epoch = static_cast<int>(epoch + 1);
            row.val1_macro_acc = th.macro_accuracy;
            row.threshold = th.value;
            row.median_energy = med;
            if (!spec.select_best || th.macro_accuracy >= best_acc) {
                best_acc = th.macro_accuracy;
                best = model;
                best_th = th;
            }
        }
        res.log.push_back(row);
    }
    res.model = best ? std::move(*best) : std::move(model);
    res.threshold = best_th;
    return res;
}

inline std::vector<std::array<std::size_t, 3>> paired_schedule(std::size_t nc, std::size_t ni, Rng& rng) {
    const std::size_t n = std::min(nc, ni);
    std::vector<std::size_t> pc(nc), pi(ni);
    for (std::size_t i = 0; i < nc; ++i) pc[i] = i;
    for (std::size_t i = 0; i < ni; ++i) pi[i] = i;
    rng.shuffle(pc);
    rng.shuffle(pi);
    std::vector<std::array<std::size_t, 3>> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back({pc[k], pi[k], 0});
    return out;
}

}  // namespace detail

inline double energy_score(const Model& m, const TokenizedSet& t) { return m.energy(t); }
inline double softmax_score(const Model& m, const TokenizedSet& t) { return inconsistent_prob(m.logits(t)); }

/// Contrastive training of the energy head; returns the best epoch by
/// validation1 macro accuracy (later epochs win ties).
inline TrainResult train(const DatasetSplit& splits, const TrainerConfig& cfg,
                         std::optional<Model> init_model = std::nullopt) {
    if (cfg.alpha <= 0.0) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
    if (cfg.optimizer.lr <= 0.0) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
    if (splits.train.consistent.empty() || splits.train.inconsistent.empty())
        throw Error(ErrorKind::PoolExhausted, "empty training pools");
    if (splits.validation1.consistent.empty() || splits.validation1.inconsistent.empty())
        throw Error(ErrorKind::EmptyValidation, "validation1 needs both labels");
    Model model = init_model ? *init_model : Model::init(cfg.dims, build_vocabulary(splits.train), cfg.rng_seed);
    std::map<std::string, std::uint32_t, std::less<>> ns;
    auto enc = detail::encode_pools(splits.train, model.vocab(), ns);
    auto val = detail::build_validation(splits.validation1, model.vocab(), cfg.val_per_class,
                                        derive_seed(cfg.rng_seed, 0xA11));
    detail::LoopSpec spec;
    spec.domains = {&enc};
    spec.schedule = [&](std::size_t, Rng& rng) {
        return detail::paired_schedule(enc.consistent.size(), enc.inconsistent.size(), rng);
    };
    spec.step = detail::energy_step(cfg);
    spec.score = energy_score;
    spec.source = ScoreSource::Energy;
    spec.validation = &val;
    return detail::run_loop(std::move(model), cfg, spec);
}

/// Cross-entropy training of the class head on {C, CC} vs {I, CI, II}.
inline TrainResult train_binary(const DatasetSplit& splits, const TrainerConfig& cfg) {
    if (cfg.optimizer.lr <= 0.0) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
    if (splits.train.consistent.empty() || splits.train.inconsistent.empty())
        throw Error(ErrorKind::PoolExhausted, "empty training pools");
    if (splits.validation1.consistent.empty() || splits.validation1.inconsistent.empty())
        throw Error(ErrorKind::EmptyValidation, "validation1 needs both labels");
    Model model = Model::init(cfg.dims, build_vocabulary(splits.train), cfg.rng_seed);
    std::map<std::string, std::uint32_t, std::less<>> ns;
    auto enc = detail::encode_pools(splits.train, model.vocab(), ns);
    auto val = detail::build_validation(splits.validation1, model.vocab(), cfg.val_per_class,
                                        derive_seed(cfg.rng_seed, 0xA11));
    detail::LoopSpec spec;
    spec.domains = {&enc};
    spec.schedule = [&](std::size_t, Rng& rng) {
        return detail::paired_schedule(enc.consistent.size(), enc.inconsistent.size(), rng);
    };
    spec.step = detail::binary_step();
    spec.score = softmax_score;
    spec.source = ScoreSource::InconsistentSoftmax;
    spec.validation = &val;
    return detail::run_loop(std::move(model), cfg, spec);
}

/// Base pairs used by one fine-tuning epoch: n from the source pools
/// (domain 0) and n from the target pools (domain 1).
inline std::vector<std::array<std::size_t, 3>> fine_tune_sample(const BasePools& source, const BasePools& target,
                                                                std::size_t n, Rng& rng) {
    auto pick = [&](const BasePools& p, std::size_t domain, std::vector<std::array<std::size_t, 3>>& out) {
        auto ic = rng.sample_indices(p.consistent.size(), n);
        auto ii = rng.sample_indices(p.inconsistent.size(), n);
        for (std::size_t k = 0; k < n; ++k) out.push_back({ic[k], ii[k], domain});
    };
    std::vector<std::array<std::size_t, 3>> out;
    pick(source, 0, out);
    pick(target, 1, out);
    rng.shuffle(out);
    return out;
}

/// Continues contrastive training on n source + n target base pairs per
/// epoch with an L2 penalty (towards zero, or the starting weights).
inline Model fine_tune(const Model& source_model, const BasePools& source_pool, const BasePools& target_pool,
                       std::size_t n, const TrainerConfig& cfg) {
    const std::size_t cap = std::min({source_pool.consistent.size(), source_pool.inconsistent.size(),
                                      target_pool.consistent.size(), target_pool.inconsistent.size()});
    if (n == 0 || n > cap) throw Error(ErrorKind::PoolExhausted, "fine-tune sample size exceeds pool size");
    std::map<std::string, std::uint32_t, std::less<>> ns;
    auto src = detail::encode_pools(source_pool, source_model.vocab(), ns);
    auto tgt = detail::encode_pools(target_pool, source_model.vocab(), ns);
    detail::LoopSpec spec;
    spec.domains = {&src, &tgt};
    spec.schedule = [&](std::size_t, Rng& rng) { return fine_tune_sample(source_pool, target_pool, n, rng); };
    spec.step = detail::energy_step(cfg);
    spec.score = energy_score;
    spec.select_best = false;
    if (cfg.l2_anchor == L2Anchor::Zero)
        spec.l2_anchor.assign(source_model.num_params(), 0.0);
    else
        spec.l2_anchor.assign(source_model.params().begin(), source_model.params().end());
    return detail::run_loop(source_model, cfg, spec).model;
}

/// Threshold for a trained model on validation1 (classes C, CC vs I, CI, II).
inline Threshold learn_threshold(const Model& m, const BasePools& validation1, std::size_t per_class,
                                 std::uint64_t seed, ScoreSource source = ScoreSource::Energy) {
    auto val = detail::build_validation(validation1, m.vocab(), per_class, seed);
    return detail::evaluate_validation(m, val, source == ScoreSource::Energy ? detail::ScoreFn(energy_score)
                                                                             : detail::ScoreFn(softmax_score),
                                       source)
        .first;
}

}  // namespace setcoh

#endif  // SETCOH_TRAINER_HPP
