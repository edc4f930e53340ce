#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "setcoh/setcoh.hpp"

namespace fs = std::filesystem;
using namespace setcoh;

namespace {

enum Exit { kOk = 0, kBadFlags = 2, kDataError = 3, kDiverged = 4 };

std::string num17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + p.string());
    return os;
}

// threshold.txt: key=value lines
void write_threshold(const fs::path& p, const Threshold& t, const std::string& arch) {
    auto os = open_out(p);
    os << "threshold=" << num17(t.value) << '\n'
       << "source=" << to_string(t.source) << '\n'
       << "learned_epoch=" << t.learned_epoch << '\n'
       << "val1_macro_acc=" << num17(t.macro_accuracy) << '\n'
       << "degenerate=" << (t.degenerate ? 1 : 0) << '\n'
       << "arch=" << arch << '\n';
}

struct SavedThreshold {
    double value = 0.0;
    std::string arch = "energy";
};

SavedThreshold read_threshold(const fs::path& p) {
    std::ifstream is(p);
    if (!is) throw Error(ErrorKind::Io, "cannot read " + p.string());
    SavedThreshold t;
    bool seen = false;
    std::string line;
    while (std::getline(is, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        if (k == "threshold") {
            try {
                t.value = std::stod(v);
            } catch (const std::exception&) {
                throw Error(ErrorKind::MalformedRecord, p.string() + ": bad threshold '" + v + "'");
            }
            seen = true;
        } else if (k == "arch") {
            t.arch = v;
        }
    }
    if (!seen) throw Error(ErrorKind::MalformedRecord, p.string() + " has no threshold line");
    return t;
}

// Flags shared by the commands that need a scorer.
struct ScorerFlags {
    std::string kind = "model";  // model | oracle | external
    std::string model;
    std::string threshold;  // defaults to threshold.txt beside the model
    std::string scores;
};

std::unique_ptr<Scorer> make_scorer(const ScorerFlags& f) {
    if (f.kind == "oracle") return std::make_unique<OracleScorer>();
    if (f.kind == "external") {
        if (f.scores.empty()) throw Error(ErrorKind::InvalidArgument, "--scores is required with --scorer external");
        return external_scorer_from_file(f.scores);
    }
    if (f.model.empty()) throw Error(ErrorKind::InvalidArgument, "--model is required with --scorer model");
    auto m = std::make_shared<const Model>(Model::load(f.model));
    fs::path tp = f.threshold.empty() ? fs::path(f.model).parent_path() / "threshold.txt" : fs::path(f.threshold);
    SavedThreshold t = read_threshold(tp);
    if (t.arch == "binary") return std::make_unique<BinaryScorer>(m, t.value);
    return std::make_unique<EnergyScorer>(m, t.value);
}

void add_scorer_flags(CLI::App* c, ScorerFlags& f) {
    c->add_option("--scorer", f.kind, "model | oracle | external")
        ->check(CLI::IsMember({"model", "oracle", "external"}))
        ->capture_default_str();
    c->add_option("--model", f.model, "model.bin path");
    c->add_option("--threshold", f.threshold, "threshold.txt path (default: next to the model)");
    c->add_option("--scores", f.scores, "external score CSV (threshold=<t> header, then id,score rows)");
}

// Replayable with `setcoh --config <out>/config.snapshot <command>`.
void snapshot(const fs::path& out, const CLI::App* sub) {
    auto os = open_out(out / "config.snapshot");
    os << "# setcoh " << sub->get_name() << '\n' << "[" << sub->get_name() << "]\n" << sub->config_to_str(true, false);
}

std::vector<std::size_t> parse_counts(const std::string& s) {
    std::vector<std::size_t> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            long long x = std::stoll(tok, &pos);
            if (pos != tok.size() || x <= 0) throw std::invalid_argument(tok);
            v.push_back(static_cast<std::size_t>(x));
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "bad --counts entry '" + tok + "'");
        }
    }
    if (v.size() == 1) v.assign(4, v[0]);
    if (v.size() != 4) throw Error(ErrorKind::InvalidArgument, "--counts takes 1 or 4 comma-separated values");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set-level consistency verification toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file with flag values; flags on the command line win");

    std::uint64_t seed = 0;
    std::string out = ".";
    std::string data;

    auto add_common = [&](CLI::App* c, bool needs_data) {
        c->add_option("--seed", seed, "RNG seed")->envname("SETCOH_SEED")->capture_default_str();
        c->add_option("--out", out, "output directory")->capture_default_str();
        if (needs_data) c->add_option("--data", data, "data.jsonl from gen")->required();
    };

    // gen
    auto* gen = app.add_subcommand("gen", "generate base-set splits");
    std::string style = "qa", counts = "2000,200,200,200";
    std::size_t qa_min = 1, qa_max = 4;
    gen->add_option("--style", style, "snli | qa")->check(CLI::IsMember({"snli", "qa"}))->capture_default_str();
    gen->add_option("--counts", counts, "sets per label for train,val1,val2,test (or one value)")
        ->capture_default_str();
    gen->add_option("--qa-min-distractors", qa_min)->capture_default_str();
    gen->add_option("--qa-max-distractors", qa_max)->capture_default_str();
    add_common(gen, false);

    // train
    auto* trn = app.add_subcommand("train", "train an energy or binary model");
    TrainerConfig tc;
    std::string regime = "eight", arch = "energy", optimizer = "adam";
    trn->add_option("--regime", regime)->check(CLI::IsMember({"basic", "six", "eight"}))->capture_default_str();
    trn->add_option("--arch", arch)->check(CLI::IsMember({"energy", "binary"}))->capture_default_str();
    trn->add_option("--alpha", tc.alpha, "hinge margin")->capture_default_str();
    trn->add_option("--lr", tc.optimizer.lr)->capture_default_str();
    trn->add_option("--optimizer", optimizer)->check(CLI::IsMember({"sgd", "adam"}))->capture_default_str();
    trn->add_option("--beta1", tc.optimizer.beta1)->capture_default_str();
    trn->add_option("--beta2", tc.optimizer.beta2)->capture_default_str();
    trn->add_option("--eps", tc.optimizer.eps)->capture_default_str();
    trn->add_option("--epochs", tc.epochs)->capture_default_str();
    trn->add_option("--batch-size", tc.batch_size, "base pairs per step")->capture_default_str();
    trn->add_option("--dim", tc.dims.d, "embedding width")->capture_default_str();
    trn->add_option("--hidden", tc.dims.h, "statement and pair width")->capture_default_str();
    trn->add_option("--head", tc.dims.k, "head width")->capture_default_str();
    trn->add_option("--val-per-class", tc.val_per_class)->capture_default_str();
    trn->add_option("--subset-prob", tc.subset_prob)->capture_default_str();
    trn->add_option("--max-union-parts", tc.max_union_parts)->capture_default_str();
    add_common(trn, true);

    // verify
    auto* ver = app.add_subcommand("verify", "set-level or element-wise verification on a 14-class mixture");
    ScorerFlags vf;
    std::string strategy = "set";
    double mtr = 0.0;
    std::size_t per_class = 200;
    add_scorer_flags(ver, vf);
    ver->add_option("--strategy", strategy)->check(CLI::IsMember({"set", "elementwise"}))->capture_default_str();
    ver->add_option("--mtr", mtr, "max tolerated fraction of inconsistent pairs")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    ver->add_option("--mixture-per-class", per_class)->capture_default_str();
    add_common(ver, true);

    // locate
    auto* loc = app.add_subcommand("locate", "greedy leave-one-out localization");
    ScorerFlags lf;
    std::size_t loc_per_class = 50, min_size = 4;
    add_scorer_flags(loc, lf);
    loc->add_option("--mixture-per-class", loc_per_class)->capture_default_str();
    loc->add_option("--min-size", min_size, "minimum size of the inconsistent part")->capture_default_str();
    add_common(loc, true);

    // sweep
    auto* swp = app.add_subcommand("sweep", "element-wise macro-F1 over an mtr grid");
    ScorerFlags sf;
    std::size_t swp_per_class = 200;
    std::string split = "val2";
    add_scorer_flags(swp, sf);
    swp->add_option("--mixture-per-class", swp_per_class)->capture_default_str();
    swp->add_option("--split", split, "mixture source")->check(CLI::IsMember({"val2", "test"}))->capture_default_str();
    add_common(swp, true);

    // ablate
    auto* abl = app.add_subcommand("ablate", "train basic, six and eight regimes and report energy quartiles");
    TrainerConfig ac;
    std::size_t abl_per_class = 200;
    abl->add_option("--epochs", ac.epochs)->capture_default_str();
    abl->add_option("--lr", ac.optimizer.lr)->capture_default_str();
    abl->add_option("--alpha", ac.alpha)->capture_default_str();
    abl->add_option("--batch-size", ac.batch_size)->capture_default_str();
    abl->add_option("--mixture-per-class", abl_per_class)->capture_default_str();
    add_common(abl, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kBadFlags;
    }

    try {
        fs::create_directories(out);
        const fs::path od(out);
        CLI::App* sub = app.get_subcommands().front();

        if (sub == gen) {
            auto c = parse_counts(counts);
            SplitConfig cfg;
            cfg.style = parse_style(style);
            cfg.train_per_label = c[0];
            cfg.val1_per_label = c[1];
            cfg.val2_per_label = c[2];
            cfg.test_per_label = c[3];
            cfg.qa_min_distractors = qa_min;
            cfg.qa_max_distractors = qa_max;
            DatasetSplit d = build_splits(cfg, seed);
            save_splits((od / "data.jsonl").string(), d);
        } else if (sub == trn) {
            DatasetSplit d = load_splits(data);
            tc.regime = parse_regime(regime);
            tc.optimizer.kind = parse_optimizer(optimizer);
            tc.rng_seed = seed;
            TrainResult r = arch == "binary" ? train_binary(d, tc) : train(d, tc);
            r.model.save((od / "model.bin").string());
            write_threshold(od / "threshold.txt", r.threshold, arch);
            auto os = open_out(od / "train_log.csv");
            write_training_log(os, r.log);
            std::cout << "best epoch " << r.threshold.learned_epoch << ", val1 macro accuracy "
                      << fmt_num(r.threshold.macro_accuracy) << ", threshold " << fmt_num(r.threshold.value) << '\n';
        } else if (sub == ver) {
            DatasetSplit d = load_splits(data);
            auto scorer = make_scorer(vf);
            EvalMixture mix = build_eval_mixture(d.test, per_class, seed);
            std::vector<Label> pred;
            for (const auto& s : mix.sets)
                pred.push_back(strategy == "set" ? verify_set(*scorer, s).label
                                                 : verify_elementwise(*scorer, s, mtr).label);
            MetricsReport rep = macro_f1(pred, gold_labels(mix));
            auto os = open_out(od / "metrics.csv");
            write_metrics_csv(os, rep);
            auto ps = open_out(od / "predictions.csv");
            ps << "set_id,provenance,gold,predicted\n";
            for (std::size_t i = 0; i < mix.sets.size(); ++i)
                ps << mix.sets[i].id << ',' << mix.sets[i].provenance << ',' << to_string(mix.sets[i].label) << ','
                   << to_string(pred[i]) << '\n';
            std::cout << "macro_f1 " << fmt_num(rep.macro_f1) << '\n';
        } else if (sub == loc) {
            DatasetSplit d = load_splits(data);
            auto scorer = make_scorer(lf);
            EvalMixture mix = build_locate_mixture(d.test, loc_per_class, seed, min_size);
            std::vector<LocateResult> res;
            LocateReport rep = run_locate(*scorer, mix, &res);
            auto os = open_out(od / "metrics.csv");
            write_locate_csv(os, rep);
            auto ps = open_out(od / "locate.csv");
            ps << "set_id,gold,predicted,terminal,scorer_calls\n";
            auto join = [](const std::vector<std::size_t>& v) {
                std::string s;
                for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
                return s;
            };
            for (std::size_t i = 0; i < mix.sets.size(); ++i)
                ps << mix.sets[i].id << ',' << join(*mix.sets[i].gold_inconsistent_indices) << ','
                   << join(res[i].removed_indices) << ',' << to_string(res[i].terminal) << ','
                   << res[i].scorer_calls << '\n';
            std::cout << "em " << fmt_num(rep.em) << " f1 " << fmt_num(rep.f1) << '\n';
        } else if (sub == swp) {
            DatasetSplit d = load_splits(data);
            auto scorer = make_scorer(sf);
            EvalMixture mix = build_eval_mixture(split == "test" ? d.test : d.validation2, swp_per_class, seed);
            auto rows = mtr_sweep(*scorer, mix, default_mtr_grid());
            auto os = open_out(od / "sweep.csv");
            write_sweep_csv(os, rows);
            std::cout << "best mtr " << fmt_num(best_mtr(rows)) << '\n';
        } else if (sub == abl) {
            DatasetSplit d = load_splits(data);
            ac.rng_seed = seed;
            auto rows = ablation_report(d, {Regime::Basic, Regime::Six, Regime::Eight}, ac, abl_per_class);
            auto os = open_out(od / "ablation.csv");
            write_ablation_csv(os, rows);
        }
        snapshot(od, sub);
    } catch (const Error& e) {
        std::cerr << "setcoh: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::Divergence: return kDiverged;
            case ErrorKind::InvalidArgument: return kBadFlags;
            default: return kDataError;
        }
    } catch (const std::exception& e) {
        std::cerr << "setcoh: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}
