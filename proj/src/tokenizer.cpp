#include "lshalign/tokenizer.hpp"

#include <fstream>

#include "lshalign/seq_io.hpp"

namespace lshalign {

namespace {

bool pure_acgt(std::string_view word) {
    for (char c : word) {
        if (c != 'A' && c != 'C' && c != 'G' && c != 'T') return false;
    }
    return true;
}

} // namespace

Dictionary::Dictionary(std::uint32_t word_size) : w_(word_size) {
    if (word_size == 0) throw ConfigError("word size must be >= 1");
}

TokenId Dictionary::add(std::string_view word) {
    if (word.size() != w_) {
        throw ConfigError("word length " + std::to_string(word.size()) +
                          " does not match dictionary word size " + std::to_string(w_));
    }
    if (!pure_acgt(word)) {
        throw ValidationError("dictionary words must be pure ACGT: \"" + std::string(word) + "\"");
    }
    auto it = ids_.find(std::string(word));
    if (it != ids_.end()) return it->second;
    const TokenId id = static_cast<TokenId>(words_.size());
    words_.emplace_back(word);
    ids_.emplace(words_.back(), id);
    return id;
}

TokenId Dictionary::lookup(std::string_view word) const {
    auto it = ids_.find(std::string(word));
    return it == ids_.end() ? unk_id() : it->second;
}

const std::string& Dictionary::word(TokenId id) const {
    if (id >= words_.size()) throw ValidationError("word id out of range: " + std::to_string(id));
    return words_[id];
}

void Dictionary::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write dictionary: " + path);
    out << "LSHALIGN-DICT v1 w=" << w_ << '\n';
    for (const auto& word : words_) out << word << '\n';
}

Dictionary Dictionary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dictionary: " + path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError(path + ": empty dictionary file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const std::string prefix = "LSHALIGN-DICT v1 w=";
    if (header.rfind(prefix, 0) != 0) throw ParseError(path + ": bad dictionary header");
    std::uint32_t w = 0;
    try {
        w = static_cast<std::uint32_t>(std::stoul(header.substr(prefix.size())));
    } catch (const std::exception&) {
        throw ParseError(path + ": bad word size in dictionary header");
    }
    Dictionary dict(w);
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.size() != w) {
            throw ParseError(path + ": word of length " + std::to_string(line.size()) +
                             " at line " + std::to_string(line_no) + ", expected " + std::to_string(w));
        }
        dict.add(line);
    }
    return dict;
}

std::vector<TokenId> tokenize(std::string_view seq, Dictionary& dict, TokenizeMode mode) {
    const std::uint32_t w = dict.word_size();
    if (mode == TokenizeMode::Train) {
        // add first, emit second: the UNK id is the word count, so ids are
        // only stable against the dictionary state after all insertions
        for (std::size_t pos = 0; pos + w <= seq.size(); pos += w) {
            const std::string_view word = seq.substr(pos, w);
            if (pure_acgt(word)) dict.add(word);
        }
    }
    std::vector<TokenId> out;
    out.reserve(seq.size() / w);
    for (std::size_t pos = 0; pos + w <= seq.size(); pos += w) {
        const std::string_view word = seq.substr(pos, w);
        out.push_back(pure_acgt(word) ? dict.lookup(word) : dict.unk_id());
    }
    return out;
}

std::vector<TokenId> tokenize_frozen(std::string_view seq, const Dictionary& dict) {
    return tokenize(seq, const_cast<Dictionary&>(dict), TokenizeMode::Frozen);
}

std::vector<TokenId> reverse_complement_table(const Dictionary& dict) {
    std::vector<TokenId> table(dict.vocab_size());
    for (TokenId id = 0; id < dict.size(); ++id) {
        table[id] = dict.lookup(reverse_complement(dict.word(id)));
    }
    table[dict.unk_id()] = dict.unk_id();
    return table;
}

EpochPlan build_epoch(const std::vector<TokenId>& tokens, std::uint32_t b, std::uint32_t M) {
    if (b < 1) throw ConfigError("batch size b must be >= 1");
    if (M < 2) throw ConfigError("words per sequence M must be >= 2");
    const std::size_t per_batch = static_cast<std::size_t>(b) * M;
    const std::size_t n_batches = tokens.size() / per_batch;
    if (n_batches == 0) {
        throw ValidationError("empty epoch: " + std::to_string(tokens.size()) +
                              " tokens < one batch of " + std::to_string(per_batch));
    }
    EpochPlan plan;
    plan.batches.reserve(n_batches);
    for (std::size_t i = 0; i < n_batches; ++i) {
        Batch batch;
        batch.seqs_per_batch = b;
        batch.words_per_seq = M;
        const auto begin = tokens.begin() + static_cast<std::ptrdiff_t>(i * per_batch);
        batch.tokens.assign(begin, begin + static_cast<std::ptrdiff_t>(per_batch));
        plan.batches.push_back(std::move(batch));
    }
    return plan;
}

} // namespace lshalign
