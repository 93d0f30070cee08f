#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lshalign/lstm.hpp"

namespace lshalign {

// Fixed-length representation of one token window: the concatenated
// final hidden states of both LSTM directions.
struct SeqVector {
    std::vector<double> v; // dimension 2H
    std::optional<std::uint64_t> ref_offset; // global character offset of the window start
};

struct RefVectorStore {
    std::uint32_t dim = 0;          // 2H
    std::uint32_t window_words = 0; // tokens per window
    std::uint32_t word_size = 0;    // characters per token
    std::uint64_t stride_chars = 0; // characters between consecutive windows
    std::vector<std::uint64_t> offsets; // character offset per window
    std::vector<float> vectors;         // count x dim, row-major

    std::size_t count() const { return offsets.size(); }
    std::uint64_t window_len() const { return static_cast<std::uint64_t>(window_words) * word_size; }
    std::span<const float> window(std::size_t i) const {
        return {vectors.data() + i * dim, dim};
    }
};

struct QueryVector {
    std::string query_id;
    std::uint32_t dim_per_chunk = 0;
    std::vector<std::vector<double>> chunks; // ceil(tokens/M) chunk embeddings in order
};

// [h_fwd_final ; h_bwd_final] for one token sequence.
std::vector<double> embed_sequence(const LstmParams& model, std::span<const TokenId> ids,
                                   const std::vector<TokenId>& rc_table);

// Embeds sliding windows of window_words tokens at the given word stride.
// Offsets are recorded in characters (token index * word size).
RefVectorStore build_ref_store(const LstmParams& model, const std::vector<TokenId>& tokens,
                               const std::vector<TokenId>& rc_table,
                               std::uint32_t window_words, std::uint32_t stride_words);

// Tokenizes the read with the frozen dictionary, splits into M-word
// chunks (the trailing chunk is right-padded with UNK) and embeds each.
QueryVector embed_query(const LstmParams& model, const Dictionary& dict,
                        const std::vector<TokenId>& rc_table,
                        const std::string& query_id, std::string_view read_seq);

// Expected window count; the store count law.
std::uint64_t expected_window_count(std::uint64_t tokens, std::uint32_t window_words,
                                    std::uint32_t stride_words);

void save_store(const std::string& path, const RefVectorStore& store);
RefVectorStore load_store(const std::string& path);

} // namespace lshalign
