#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "setcoh/jsonl.hpp"

using namespace setcoh;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("setcoh_test_" + name)).string();
}

DatasetSplit small_splits(CorpusStyle style) {
    SplitConfig cfg;
    cfg.style = style;
    cfg.train_per_label = 20;
    cfg.val1_per_label = cfg.val2_per_label = cfg.test_per_label = 5;
    return build_splits(cfg, 12);
}

}  // namespace

TEST(Jsonl, RoundTripSets) {
    for (auto style : {CorpusStyle::Qa, CorpusStyle::Snli}) {
        DatasetSplit d = small_splits(style);
        std::vector<StatementSet> sets = d.train.consistent;
        sets.insert(sets.end(), d.train.inconsistent.begin(), d.train.inconsistent.end());
        Rng rng(1);
        sets.push_back(sample_union("CCI", d.train, rng));
        std::string path = tmp_path("roundtrip.jsonl");
        save_jsonl(path, sets);
        auto back = load_jsonl(path);
        ASSERT_EQ(back.size(), sets.size());
        for (std::size_t i = 0; i < sets.size(); ++i) EXPECT_EQ(back[i], sets[i]) << i;
        std::filesystem::remove(path);
    }
}

TEST(Jsonl, RoundTripSplits) {
    DatasetSplit d = small_splits(CorpusStyle::Qa);
    std::string path = tmp_path("splits.jsonl");
    save_splits(path, d);
    DatasetSplit back = load_splits(path);
    EXPECT_EQ(back.train.consistent, d.train.consistent);
    EXPECT_EQ(back.validation1.inconsistent, d.validation1.inconsistent);
    EXPECT_EQ(back.validation2.consistent, d.validation2.consistent);
    EXPECT_EQ(back.test.inconsistent, d.test.inconsistent);
    std::filesystem::remove(path);
}

TEST(Jsonl, MissingLabelReportsLine) {
    std::istringstream is(
        "{\"id\":\"a\",\"statements\":[{\"kind\":\"sentence\",\"text\":\"x\"}],\"label\":\"consistent\"}\n"
        "{\"id\":\"b\",\"statements\":[{\"kind\":\"sentence\",\"text\":\"x\"}]}\n");
    try {
        read_jsonl(is);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MalformedRecord);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("label"), std::string::npos) << e.what();
    }
}

TEST(Jsonl, NotJson) {
    std::istringstream is("{\"id\":\n");
    EXPECT_THROW(read_jsonl(is), Error);
}

TEST(Jsonl, ExternalRecordWithoutSemantics) {
    std::istringstream is(
        "{\"id\":\"ext\",\"statements\":[{\"kind\":\"qa\",\"question\":\"is it red?\",\"answer\":\"yes\"},"
        "{\"kind\":\"qa\",\"question\":\"is it red?\",\"answer\":\"no\"}],\"label\":\"inconsistent\"}\n");
    auto recs = read_jsonl(is);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_FALSE(recs[0].set.has_semantics());
    EXPECT_EQ(recs[0].set.provenance, "I");
    try {
        validate_with_oracle(recs[0].set);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingSemantics);
    }
}

TEST(Jsonl, LabelProvenanceConflict) {
    std::istringstream is(
        "{\"id\":\"x\",\"statements\":[],\"label\":\"consistent\",\"provenance\":\"CI\"}\n");
    EXPECT_THROW(read_jsonl(is), Error);
}
