#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lshalign/common.hpp"

namespace lshalign {

// Bijection between fixed-width ACGT words and dense integer ids.
// UNK is a reserved implicit entry: its id equals the number of stored
// words, so the total vocabulary is size() + 1 and never exceeds 4^w + 1.
class Dictionary {
public:
    explicit Dictionary(std::uint32_t word_size);

    std::uint32_t word_size() const { return w_; }
    std::size_t size() const { return words_.size(); } // stored words, without UNK
    std::uint32_t vocab_size() const { return static_cast<std::uint32_t>(words_.size()) + 1; }
    TokenId unk_id() const { return static_cast<TokenId>(words_.size()); }

    // Returns the id, inserting the word first when absent.
    TokenId add(std::string_view word);
    // Returns the id or unk_id() when the word is unknown.
    TokenId lookup(std::string_view word) const;
    const std::string& word(TokenId id) const;

    void save(const std::string& path) const;
    static Dictionary load(const std::string& path);

private:
    std::uint32_t w_;
    std::vector<std::string> words_;
    std::unordered_map<std::string, TokenId> ids_;
};

enum class TokenizeMode { Train, Frozen };

// Non-overlapping windows of width w, left to right; the trailing
// remainder is dropped. Windows containing a non-ACGT byte map to UNK.
std::vector<TokenId> tokenize(std::string_view seq, Dictionary& dict, TokenizeMode mode);
std::vector<TokenId> tokenize_frozen(std::string_view seq, const Dictionary& dict);

// Token-level reverse complement: rc_table[id] is the id of the
// Watson-Crick complement word (UNK maps to UNK, and so does any
// complement word absent from the dictionary).
std::vector<TokenId> reverse_complement_table(const Dictionary& dict);

struct Batch {
    std::uint32_t seqs_per_batch = 0; // b
    std::uint32_t words_per_seq = 0;  // M
    std::vector<TokenId> tokens;      // b*M ids, row-major

    const TokenId* row(std::uint32_t r) const { return tokens.data() + static_cast<std::size_t>(r) * words_per_seq; }
};

struct EpochPlan {
    std::vector<Batch> batches;
    std::size_t num_batches() const { return batches.size(); }
};

// Partitions the stream row-major into b*M-token batches; the final
// partial batch is dropped.
EpochPlan build_epoch(const std::vector<TokenId>& tokens, std::uint32_t b, std::uint32_t M);

} // namespace lshalign
