// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
//
//   acceptance <path to setcoh cli> <scratch dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "setcoh/setcoh.hpp"

using namespace setcoh;
namespace fs = std::filesystem;

namespace {

std::map<int, std::pair<bool, std::string>> results;

void report(int id, bool ok, const std::string& detail) {
    results[id] = {ok, detail};
    std::fprintf(stderr, "[done %d]\n", id);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Shared settings for every trained model below.
TrainerConfig acceptance_config() {
    TrainerConfig cfg;
    cfg.epochs = 60;
    cfg.regime = Regime::Eight;
    cfg.rng_seed = 1;
    return cfg;
}

constexpr std::uint64_t kCorpusSeed = 11;
constexpr std::size_t kMixturePerClass = 200;

// 1 ---------------------------------------------------------------------------
void degenerate_scores(const DatasetSplit& qa) {
    EvalMixture mix = build_eval_mixture(qa.test, kMixturePerClass, 5);
    auto gold = gold_labels(mix);
    double c = macro_f1(std::vector<Label>(gold.size(), Label::Consistent), gold).macro_f1;
    double i = macro_f1(std::vector<Label>(gold.size(), Label::Inconsistent), gold).macro_f1;
    // 10/24 = 0.41667 prints as 0.416 only when truncated, so the reported
    // values are compared after truncation to three places
    auto trunc3 = [](double x) { return std::floor(x * 1000.0) / 1000.0; };
    bool ok = std::abs(c - 4.0 / 18.0) <= 0.0005 && std::abs(i - 10.0 / 24.0) <= 0.0005 && trunc3(c) == 0.222 &&
              trunc3(i) == 0.416 && mix.sets.size() == 2800;
    report(1, ok,
           fmt("all-consistent %.5f (4/18, reported 0.222), all-inconsistent %.5f (10/24, reported 0.416), tol 0.0005",
               c, i));
}

// 2 ---------------------------------------------------------------------------
void oracle_agreement(const DatasetSplit& qa, const DatasetSplit& snli) {
    std::size_t n = 0, bad = 0;
    auto check = [&](const StatementSet& s) {
        ++n;
        try {
            if (!validate_with_oracle(s)) ++bad;
        } catch (const Error&) {
            ++bad;
        }
    };
    for (const DatasetSplit* d : {&qa, &snli})
        for (const BasePools* p : {&d->train, &d->validation1, &d->validation2, &d->test}) {
            for (const auto& s : p->consistent) check(s);
            for (const auto& s : p->inconsistent) check(s);
        }
    // every rule, many seeds
    for (const auto& r : rule_table())
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            std::vector<SeedPair> seeds{gen_seed_pair(derive_seed(seed, 1), r.relation())};
            if (r.seed_count() == 2) seeds.push_back(gen_seed_pair(derive_seed(seed, 2), r.relation(), {seeds[0].ns}));
            check(apply_rule(r.id, seeds));
        }
    // all 14 union classes from both corpora
    for (const DatasetSplit* d : {&qa, &snli})
        for (const auto& s : build_eval_mixture(d->test, 50, 77).sets) check(s);
    report(2, bad == 0 && n >= 10000, fmt("%.0f sets checked, %.0f disagreements (need >= 10000, 0)", double(n), double(bad)));
}

// 3 ---------------------------------------------------------------------------
void pairwise_blindness(const DatasetSplit& snli) {
    OracleScorer oracle;
    std::size_t witnesses = 0, flagged = 0, missed_by_pairs = 0;
    for (const BasePools* p : {&snli.train, &snli.test})
        for (const auto& s : p->inconsistent) {
            bool blind = true;
            for (std::size_t i = 0; i < s.size() && blind; ++i)
                for (std::size_t j = i + 1; j < s.size() && blind; ++j)
                    if (!is_satisfiable(formulas_of(s, {i, j}))) blind = false;
            if (!blind) continue;
            ++witnesses;
            flagged += verify_set(oracle, s).label == Label::Inconsistent;
            missed_by_pairs += verify_elementwise(oracle, s, 0.0).label == Label::Consistent;
        }
    bool ok = witnesses > 0 && flagged == witnesses && missed_by_pairs == witnesses;
    report(3, ok, fmt("%.0f pairwise-blind inconsistent sets; set-level flags %.0f, element-wise (mtr 0) passes %.0f",
                      double(witnesses), double(flagged), double(missed_by_pairs)));
}

// 4 ---------------------------------------------------------------------------
void gradient_check(const DatasetSplit& qa) {
    Vocabulary vocab = build_vocabulary(qa.train);
    const double step = 1e-4;
    double worst = 0.0;
    std::size_t probes = 0;
    Rng rng(404);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        Model m = Model::init(ModelDims{0, 8, 8, 8}, vocab, 100 + trial);
        StatementSet s = sample_union(trial % 2 ? "CI" : "CC", qa.test, rng);
        TokenizedSet ts = serialize_set(s, vocab, trial);
        auto ge = m.grad_energy(ts);
        auto gl = m.grad_logits(ts);
        // the embedding rows that this input touches, plus every other block
        std::vector<std::size_t> candidates;
        const std::size_t emb = m.block_offset(Model::Emb), d = m.dims().d;
        for (auto t : ts.tokens)
            for (std::size_t a = 0; a < d; ++a) candidates.push_back(emb + static_cast<std::size_t>(t) * d + a);
        for (std::size_t i = m.block_offset(Model::Ws); i < m.num_params(); ++i) candidates.push_back(i);
        for (int k = 0; k < 12; ++k, ++probes) {
            std::size_t i = candidates[rng.below(candidates.size())];
            double orig = m.params()[i];
            m.params()[i] = orig + step;
            double ep = m.energy(ts);
            auto lp = m.logits(ts);
            m.params()[i] = orig - step;
            double em = m.energy(ts);
            auto lm = m.logits(ts);
            m.params()[i] = orig;
            std::pair<double, double> pairs[3] = {{(ep - em) / (2 * step), ge[i]},
                                                  {(lp[0] - lm[0]) / (2 * step), gl[0][i]},
                                                  {(lp[1] - lm[1]) / (2 * step), gl[1][i]}};
            for (auto [num, ana] : pairs) {
                double scale = std::max({std::abs(num), std::abs(ana), 1e-6});
                worst = std::max(worst, std::abs(num - ana) / scale);
            }
        }
    }
    report(4, probes >= 100 && worst <= 1e-4,
           fmt("%.0f probes, step 1e-4, max relative error %.3g (tol 1e-4)", double(probes), worst));
}

// 9 ---------------------------------------------------------------------------
void threshold_optimality() {
    Rng rng(909);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 2 + rng.below(40);
        std::vector<double> s(n);
        std::vector<bool> inc(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = rng.below(4) == 0 ? static_cast<double>(rng.below(5)) : rng.uniform(-2, 2);
            inc[i] = rng.below(2) == 1;
        }
        inc[0] = false;
        inc[1] = true;
        std::vector<double> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> cands{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        for (std::size_t i = 0; i + 1 < n; ++i) cands.push_back((sorted[i] + sorted[i + 1]) / 2);
        double best = 0;
        for (double c : cands) best = std::max(best, macro_accuracy_at(s, inc, c));
        Threshold t = learn_threshold(s, inc);
        if (macro_accuracy_at(s, inc, t.value) != best || t.macro_accuracy != best) ++mismatches;
    }
    report(9, mismatches == 0, fmt("1000 random configurations, %.0f differ from the exhaustive scan (exact)", double(mismatches)));
}

// 5, 7, 8 ----------------------------------------------------------------------
void qa_training(const DatasetSplit& qa) {
    auto t0 = std::chrono::steady_clock::now();
    TrainerConfig cfg = acceptance_config();
    TrainResult energy = train(qa, cfg);
    double t_energy = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    TrainResult binary = train_binary(qa, cfg);
    double t_binary = seconds_since(t0);

    auto em = std::make_shared<const Model>(energy.model);
    auto bm = std::make_shared<const Model>(binary.model);
    EnergyScorer es(em, energy.threshold.value);
    BinaryScorer bs(bm, binary.threshold.value);
    EvalMixture mix = build_eval_mixture(qa.test, kMixturePerClass, 5);
    auto gold = gold_labels(mix);
    double f_energy = macro_f1(predict_set_level(es, mix), gold).macro_f1;
    double f_binary = macro_f1(predict_set_level(bs, mix), gold).macro_f1;
    report(5, f_energy >= 0.95 && f_binary >= 0.90,
           fmt("energy macro-F1 %.4f (>= 0.95, %.0fs), binary %.4f (>= 0.90, %.0fs)", f_energy, t_energy, f_binary,
               t_binary));

    auto q = energy_quartiles(energy.model, qa.validation2, kMixturePerClass, 9);
    double c = q[kSlotC].median, ci = q[kSlotCI].median, i = q[kSlotI].median, ii = q[kSlotII].median;
    report(7, c < ci && ci < i && i < ii,
           fmt("validation2 medians C %.3f < CI %.3f < I %.3f < II %.3f", c, ci, i, ii));

    EvalMixture loc = build_locate_mixture(qa.test, 50, 6);
    OracleScorer oracle;
    LocateReport ro = run_locate(oracle, loc);
    LocateReport rm = run_locate(es, loc);
    bool ok = ro.em == 1.0 && ro.f1 == 1.0 && rm.em >= 0.80 && rm.f1 >= 0.90;
    report(8, ok,
           fmt("oracle EM %.3f F1 %.3f (= 1); trained EM %.3f (>= 0.80) F1 %.3f (>= 0.90)", ro.em, ro.f1, rm.em, rm.f1));
}

// 6 ---------------------------------------------------------------------------
void strategy_gap(const DatasetSplit& snli) {
    TrainerConfig cfg = acceptance_config();
    TrainResult tr = train(snli, cfg);
    auto m = std::make_shared<const Model>(tr.model);
    EnergyScorer es(m, tr.threshold.value);
    EvalMixture val = build_eval_mixture(snli.validation2, kMixturePerClass, 3);
    double mtr = best_mtr(mtr_sweep(es, val, default_mtr_grid()));
    EvalMixture mix = build_eval_mixture(snli.test, kMixturePerClass, 5);
    auto gold = gold_labels(mix);
    double set_level = macro_f1(predict_set_level(es, mix), gold).macro_f1;
    auto pairs = mixture_pair_verdicts(es, mix);
    std::vector<Label> ew;
    for (const auto& p : pairs) ew.push_back(elementwise_from_pairs(p, mtr).label);
    double element = macro_f1(ew, gold).macro_f1;
    report(6, element < set_level,
           fmt("sentence corpus: element-wise %.4f (mtr %.2f from validation2) < set-level %.4f", element, mtr, set_level));
}

// 10 --------------------------------------------------------------------------
int run(const std::string& cmd) {
    int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    return rc;
}

void determinism(const std::string& cli, const fs::path& scratch) {
    std::vector<std::string> files{"gen/data.jsonl",        "train/model.bin",   "train/threshold.txt",
                                   "train/train_log.csv",   "verify/metrics.csv", "verify/predictions.csv",
                                   "locate/metrics.csv",    "locate/locate.csv"};
    bool ran = true;
    for (const char* tag : {"a", "b"}) {
        fs::path root = scratch / tag;
        fs::remove_all(root);
        fs::create_directories(root);
        std::string r = root.string(), data = r + "/gen/data.jsonl", model = r + "/train/model.bin";
        ran = ran && run(cli + " gen --style qa --seed 7 --counts 200,60,60,60 --out " + r + "/gen") == 0;
        ran = ran && run(cli + " train --seed 7 --epochs 3 --val-per-class 30 --data " + data + " --out " + r + "/train") == 0;
        ran = ran && run(cli + " verify --seed 7 --model " + model + " --mixture-per-class 10 --data " + data +
                         " --out " + r + "/verify") == 0;
        ran = ran && run(cli + " locate --seed 7 --model " + model + " --mixture-per-class 10 --data " + data +
                         " --out " + r + "/locate") == 0;
    }
    std::size_t same = 0;
    for (const auto& f : files) {
        fs::path a = scratch / "a" / f, b = scratch / "b" / f;
        if (fs::exists(a) && fs::exists(b) && slurp(a) == slurp(b)) ++same;
    }
    report(10, ran && same == files.size(),
           fmt("two gen/train/verify/locate runs: %.0f of %.0f output files byte-identical", double(same),
               double(files.size())));
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <setcoh cli> <scratch dir>\n");
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path scratch = argv[2];
    fs::create_directories(scratch);

    SplitConfig qa_cfg;
    qa_cfg.style = CorpusStyle::Qa;
    SplitConfig snli_cfg;
    snli_cfg.style = CorpusStyle::Snli;
    DatasetSplit qa = build_splits(qa_cfg, kCorpusSeed);
    DatasetSplit snli = build_splits(snli_cfg, kCorpusSeed);

    try {
        degenerate_scores(qa);
        oracle_agreement(qa, snli);
        pairwise_blindness(snli);
        gradient_check(qa);
        qa_training(qa);
        strategy_gap(snli);
        threshold_optimality();
        determinism(cli, scratch);
    } catch (const std::exception& e) {
        std::printf("aborted: %s\n", e.what());
    }
    int failures = 0;
    std::ostringstream out;
    for (int id = 1; id <= 10; ++id) {
        auto it = results.find(id);
        bool ok = it != results.end() && it->second.first;
        char line[32];
        std::snprintf(line, sizeof line, "criterion %2d: %s  ", id, ok ? "PASS" : "FAIL");
        out << line << (it == results.end() ? "not run" : it->second.second) << '\n';
        failures += !ok;
    }
    out << failures << " criteria failed\n";
    std::fputs(out.str().c_str(), stdout);
    std::ofstream(scratch / "report.txt") << out.str();
    return failures ? 1 : 0;
}
