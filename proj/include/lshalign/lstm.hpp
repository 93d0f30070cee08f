#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lshalign/common.hpp"
#include "lshalign/tokenizer.hpp"

namespace lshalign {

// Dense row-major matrix of doubles. Vectors are Mat with cols == 1.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
    std::size_t size() const { return a.size(); }
};

// Gate weights for one direction. Naming follows the forget/input/
// candidate/output split; *_h maps the previous hidden state, *_x the
// input embedding.
struct LstmDirParams {
    Mat W_fh, W_fx, b_f;
    Mat W_ih, W_ix, b_i;
    Mat W_ch, W_cx, b_c;
    Mat W_oh, W_ox, b_o;
};

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;

    explicit LstmState(std::size_t hidden = 0) : h(hidden, 0.0), c(hidden, 0.0) {}
};

// Gate activations cached by cell_step for backpropagation through time.
struct GateCache {
    TokenId token = 0;            // id of the embedded input
    std::vector<double> h_prev, c_prev;
    std::vector<double> f, i, o, ctilde, c, tanh_c, h;
};

struct LstmParams {
    std::uint32_t V = 0; // vocabulary size (including UNK)
    std::uint32_t E = 0; // input embedding size
    std::uint32_t H = 0; // hidden size
    std::uint32_t w = 0; // word size the dictionary was built with
    std::uint32_t M = 0; // words per sequence used in training

    Mat emb;             // V x E input embedding table
    LstmDirParams fwd;
    LstmDirParams bwd;
    Mat W_y;             // V x 2H output projection
    Mat b_y;             // V

    LstmParams() = default;
    LstmParams(std::uint32_t V, std::uint32_t E, std::uint32_t H, std::uint32_t w, std::uint32_t M);

    // Visits every tensor in checkpoint order: emb, forward gates,
    // backward gates, output projection.
    void for_each_tensor(const std::function<void(Mat&)>& fn);
    void for_each_tensor(const std::function<void(const Mat&)>& fn) const;
    std::size_t num_params() const;
};

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
    double learning_rate = 1e-3;
    double clip_norm = 5.0;
    std::uint32_t epochs = 1;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::Adam;
    std::uint32_t H = 1000;
    std::uint32_t E = 64;
    std::uint32_t w = 10;
    std::uint32_t M = 100;
    std::uint32_t b = 1;

    void validate() const;
};

// Uniform(-1/sqrt(H), +1/sqrt(H)) weights, zero biases except the forget
// bias which starts at +1.
LstmParams init_params(std::uint32_t V, const TrainConfig& cfg);

LstmParams make_zero_like(const LstmParams& params);

// One LSTM cell step; caches gate values for BPTT.
LstmState cell_step(const LstmDirParams& dir, std::span<const double> x,
                    const LstmState& prev, GateCache* cache = nullptr);

struct SequenceForward {
    // Probability rows, one per prediction position t = 0..M-2; row t is
    // the next-word distribution for position t+1. Flattened (M-1) x V.
    std::vector<double> probs;
    std::vector<double> final_fwd; // forward hidden state after all M steps
    std::vector<double> final_bwd; // backward hidden state after all M steps
    std::uint32_t V = 0;

    std::span<const double> row(std::size_t t) const {
        return {probs.data() + t * V, V};
    }
};

// Full bidirectional pass over one M-token sequence. The forward
// direction consumes the tokens as-is; the backward direction consumes
// the reverse-complement token sequence. Prediction row t combines the
// forward state that has read tokens 0..t with the backward state that
// has read tokens t+2..M-1, so the target at t+1 is visible to neither.
SequenceForward forward_sequence(const LstmParams& model, std::span<const TokenId> ids,
                                 const std::vector<TokenId>& rc_table);

// Final hidden states of both directions over an arbitrary-length token
// span (no output layer). This is the fixed-length sequence embedding.
struct BiFinalStates {
    std::vector<double> fwd;
    std::vector<double> bwd;
};
BiFinalStates run_bidirectional(const LstmParams& model, std::span<const TokenId> ids,
                                const std::vector<TokenId>& rc_table);

// Mean next-word cross-entropy over the batch plus exact BPTT gradients.
// Row gradients are accumulated into per-row buffers and summed in row
// order, so results do not depend on evaluation interleaving.
std::pair<double, LstmParams> loss_and_grads(const LstmParams& model, const Batch& batch,
                                             const std::vector<TokenId>& rc_table);

struct OptimizerState {
    std::uint64_t step = 0;
    std::vector<double> m; // adam first moment, flat over all tensors
    std::vector<double> v; // adam second moment
};

// Rescales the global gradient norm to <= clip_norm, then applies one
// optimizer step in place.
void clip_and_update(LstmParams& model, const LstmParams& grads, OptimizerState& opt,
                     const TrainConfig& cfg);

double global_grad_norm(const LstmParams& grads);

// exp(mean next-word cross-entropy) over the stream, segmented into
// M-word windows as in training; a trailing window of >= 2 tokens is kept.
double perplexity(const LstmParams& model, std::span<const TokenId> stream,
                  const std::vector<TokenId>& rc_table);

void save_checkpoint(const std::string& path, const LstmParams& model);
LstmParams load_checkpoint(const std::string& path);

} // namespace lshalign
