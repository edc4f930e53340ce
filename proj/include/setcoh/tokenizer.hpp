#ifndef SETCOH_TOKENIZER_HPP
#define SETCOH_TOKENIZER_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "setcoh/error.hpp"
#include "setcoh/rng.hpp"
#include "setcoh/statement.hpp"

namespace setcoh {

inline constexpr std::int32_t kCls = 0;
inline constexpr std::int32_t kUnk = 1;

/// Lowercases and splits on whitespace; punctuation becomes its own token.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            flush();
        } else if (std::ispunct(c) && c != '\'' && c != '-') {
            flush();
            out.emplace_back(1, ch);
        } else {
            cur.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    flush();
    return out;
}

/// Text fed to the encoder for one statement.
inline std::string statement_text(const Statement& s) {
    if (s.kind == StatementKind::Sentence) return s.text;
    return s.question + " The answer is " + s.answer + ".";
}

class Vocabulary {
public:
    Vocabulary() : tokens_{"<cls>", "<unk>"} { reindex(); }

    /// Reserved tokens first, then every training token in sorted order.
    static Vocabulary build(const std::vector<const StatementSet*>& sets) {
        std::set<std::string> seen;
        for (const auto* s : sets)
            for (const auto& st : s->statements)
                for (auto& t : tokenize(statement_text(st))) seen.insert(std::move(t));
        Vocabulary v;
        for (const auto& t : seen)
            if (t != "<cls>" && t != "<unk>") v.tokens_.push_back(t);
        v.reindex();
        return v;
    }

    static Vocabulary from_tokens(std::vector<std::string> tokens) {
        if (tokens.size() < 2 || tokens[0] != "<cls>" || tokens[1] != "<unk>")
            throw Error(ErrorKind::CorruptFile, "vocabulary lacks reserved tokens");
        Vocabulary v;
        v.tokens_ = std::move(tokens);
        v.reindex();
        if (v.index_.size() != v.tokens_.size()) throw Error(ErrorKind::CorruptFile, "duplicate vocabulary token");
        return v;
    }

    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    std::int32_t lookup(const std::string& tok) const {
        auto it = index_.find(tok);
        return it == index_.end() ? kUnk : it->second;
    }

    /// FNV-1a over the token list.
    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (const auto& t : tokens_) {
            for (unsigned char c : t) h = (h ^ c) * 0x100000001b3ull;
            h = (h ^ 0x0Au) * 0x100000001b3ull;
        }
        return h;
    }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

private:
    void reindex() {
        index_.clear();
        for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], static_cast<std::int32_t>(i));
    }

    std::vector<std::string> tokens_;
    std::map<std::string, std::int32_t> index_;
};

/// CLS followed by the statements' tokens; offsets[i]..offsets[i+1] is
/// statement i (in serialized order).
struct TokenizedSet {
    std::vector<std::int32_t> tokens;
    std::vector<std::size_t> offsets;

    std::size_t statements() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

inline TokenizedSet serialize_set(const StatementSet& s, const Vocabulary& vocab, std::uint64_t shuffle_seed) {
    std::vector<std::size_t> order(s.statements.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(shuffle_seed);
    rng.shuffle(order);
    TokenizedSet t;
    t.tokens.push_back(kCls);
    t.offsets.push_back(1);
    for (auto i : order) {
        for (const auto& tok : tokenize(statement_text(s.statements[i]))) t.tokens.push_back(vocab.lookup(tok));
        t.offsets.push_back(t.tokens.size());
    }
    return t;
}

}  // namespace setcoh

#endif  // SETCOH_TOKENIZER_HPP
