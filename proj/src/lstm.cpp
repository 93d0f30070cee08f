#include "lshalign/lstm.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace lshalign {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// out = W*x + b
void affine(const Mat& W, std::span<const double> x, const Mat& b, std::vector<double>& out) {
    const std::size_t R = W.rows, C = W.cols;
    out.assign(R, 0.0);
    for (std::size_t r = 0; r < R; ++r) {
        const double* row = W.a.data() + r * C;
        double acc = b.a[r];
        for (std::size_t c = 0; c < C; ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
}

// acc += W*x
void matvec_add(const Mat& W, std::span<const double> x, std::vector<double>& acc) {
    const std::size_t R = W.rows, C = W.cols;
    for (std::size_t r = 0; r < R; ++r) {
        const double* row = W.a.data() + r * C;
        double s = 0.0;
        for (std::size_t c = 0; c < C; ++c) s += row[c] * x[c];
        acc[r] += s;
    }
}

// acc += W^T * y
void matvec_t_add(const Mat& W, std::span<const double> y, std::vector<double>& acc) {
    const std::size_t R = W.rows, C = W.cols;
    for (std::size_t r = 0; r < R; ++r) {
        const double v = y[r];
        if (v == 0.0) continue;
        const double* row = W.a.data() + r * C;
        for (std::size_t c = 0; c < C; ++c) acc[c] += row[c] * v;
    }
}

// dW += y (outer) x
void outer_add(Mat& dW, std::span<const double> y, std::span<const double> x) {
    const std::size_t R = dW.rows, C = dW.cols;
    for (std::size_t r = 0; r < R; ++r) {
        const double v = y[r];
        if (v == 0.0) continue;
        double* row = dW.a.data() + r * C;
        for (std::size_t c = 0; c < C; ++c) row[c] += v * x[c];
    }
}

void add_to(std::vector<double>& acc, const std::vector<double>& inc) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += inc[i];
}

struct DirectionRun {
    std::vector<GateCache> steps;
    LstmState final_state;
};

std::span<const double> emb_row(const LstmParams& model, TokenId id) {
    return {model.emb.a.data() + static_cast<std::size_t>(id) * model.E, model.E};
}

void check_ids(const LstmParams& model, std::span<const TokenId> ids) {
    for (TokenId id : ids) {
        if (id >= model.V) {
            throw ValidationError("token id " + std::to_string(id) + " >= vocabulary size " +
                                  std::to_string(model.V));
        }
    }
}

// Runs one direction over the given ids (already reverse-complemented for
// the backward layer), caching gates when requested.
DirectionRun run_direction(const LstmParams& model, const LstmDirParams& dir,
                           std::span<const TokenId> ids, bool keep_cache) {
    DirectionRun run;
    run.final_state = LstmState(model.H);
    if (keep_cache) run.steps.reserve(ids.size());
    LstmState state(model.H);
    GateCache cache;
    for (TokenId id : ids) {
        state = cell_step(dir, emb_row(model, id), state, keep_cache ? &cache : nullptr);
        if (keep_cache) {
            cache.token = id;
            run.steps.push_back(cache);
        }
    }
    run.final_state = std::move(state);
    return run;
}

std::vector<TokenId> rc_ids(std::span<const TokenId> ids, const std::vector<TokenId>& rc_table) {
    std::vector<TokenId> out(ids.size());
    for (std::size_t s = 0; s < ids.size(); ++s) {
        out[s] = rc_table.at(ids[ids.size() - 1 - s]);
    }
    return out;
}

// log(sum(exp(z))) with max subtraction; also writes softmax into p.
double softmax_rows(std::span<const double> z, std::vector<double>& p) {
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    double sum = 0.0;
    p.resize(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        p[k] = std::exp(z[k] - zmax);
        sum += p[k];
    }
    const double inv = 1.0 / sum;
    for (double& v : p) v *= inv;
    return zmax + std::log(sum);
}

struct RowGrads {
    LstmParams g;
    double ce = 0.0; // summed (not yet averaged) cross-entropy
};

// Forward + BPTT for one M-token row. scale multiplies the per-row dz so
// the batch loss is a mean over all prediction positions.
RowGrads row_loss_and_grads(const LstmParams& model, std::span<const TokenId> ids,
                            const std::vector<TokenId>& rc_table, double scale) {
    const std::uint32_t M = static_cast<std::uint32_t>(ids.size());
    const std::uint32_t H = model.H;
    RowGrads out{make_zero_like(model), 0.0};

    // Training pass: forward needs M-1 steps (tokens 0..M-2), backward
    // needs M-2 steps of the reverse-complement sequence.
    const auto fwd_run = run_direction(model, model.fwd, ids.first(M - 1), true);
    const auto ids_bwd = rc_ids(ids, rc_table);
    const auto bwd_run = run_direction(model, model.bwd,
                                       std::span<const TokenId>(ids_bwd).first(M - 2), true);

    std::vector<double> dh_fwd(static_cast<std::size_t>(M - 1) * H, 0.0);
    std::vector<double> dh_bwd(static_cast<std::size_t>(M - 2) * H, 0.0);

    std::vector<double> u(2 * H, 0.0), z, p, dz(model.V);
    for (std::uint32_t t = 0; t + 1 < M; ++t) {
        const std::uint32_t k = M - t - 2; // backward steps visible at row t
        const auto& hf = fwd_run.steps[t].h;
        std::memcpy(u.data(), hf.data(), H * sizeof(double));
        if (k > 0) {
            const auto& hb = bwd_run.steps[k - 1].h;
            std::memcpy(u.data() + H, hb.data(), H * sizeof(double));
        } else {
            std::memset(u.data() + H, 0, H * sizeof(double));
        }
        affine(model.W_y, u, model.b_y, z);
        const double lse = softmax_rows(z, p);
        const TokenId target = ids[t + 1];
        out.ce += lse - z[target];

        for (std::size_t v = 0; v < model.V; ++v) dz[v] = p[v] * scale;
        dz[target] -= scale;

        outer_add(out.g.W_y, dz, u);
        add_to(out.g.b_y.a, dz);
        // dh halves: W_y columns [0,H) feed the forward state, [H,2H) the
        // backward state.
        for (std::size_t v = 0; v < model.V; ++v) {
            const double g = dz[v];
            if (g == 0.0) continue;
            const double* row = model.W_y.a.data() + v * 2 * H;
            double* df = dh_fwd.data() + static_cast<std::size_t>(t) * H;
            for (std::size_t j = 0; j < H; ++j) df[j] += row[j] * g;
            if (k > 0) {
                double* db = dh_bwd.data() + static_cast<std::size_t>(k - 1) * H;
                for (std::size_t j = 0; j < H; ++j) db[j] += row[H + j] * g;
            }
        }
    }

    auto bptt = [&](const LstmDirParams& dir, LstmDirParams& grads,
                    const std::vector<GateCache>& steps, const std::vector<double>& dh_inject) {
        std::vector<double> dh(H, 0.0), dc(H, 0.0);
        std::vector<double> dz_f(H), dz_i(H), dz_c(H), dz_o(H), dx(model.E);
        for (std::size_t s = steps.size(); s-- > 0;) {
            const GateCache& st = steps[s];
            for (std::size_t j = 0; j < H; ++j) dh[j] += dh_inject[s * H + j];
            for (std::size_t j = 0; j < H; ++j) {
                const double dht = dh[j];
                const double dot = dht * st.tanh_c[j];
                dz_o[j] = dot * st.o[j] * (1.0 - st.o[j]);
                const double dct = dc[j] + dht * st.o[j] * (1.0 - st.tanh_c[j] * st.tanh_c[j]);
                dz_f[j] = dct * st.c_prev[j] * st.f[j] * (1.0 - st.f[j]);
                dz_i[j] = dct * st.ctilde[j] * st.i[j] * (1.0 - st.i[j]);
                dz_c[j] = dct * st.i[j] * (1.0 - st.ctilde[j] * st.ctilde[j]);
                dc[j] = dct * st.f[j];
            }
            const std::span<const double> x = emb_row(model, st.token);
            outer_add(grads.W_fh, dz_f, st.h_prev); outer_add(grads.W_fx, dz_f, x); add_to(grads.b_f.a, dz_f);
            outer_add(grads.W_ih, dz_i, st.h_prev); outer_add(grads.W_ix, dz_i, x); add_to(grads.b_i.a, dz_i);
            outer_add(grads.W_ch, dz_c, st.h_prev); outer_add(grads.W_cx, dz_c, x); add_to(grads.b_c.a, dz_c);
            outer_add(grads.W_oh, dz_o, st.h_prev); outer_add(grads.W_ox, dz_o, x); add_to(grads.b_o.a, dz_o);

            std::fill(dh.begin(), dh.end(), 0.0);
            matvec_t_add(dir.W_fh, dz_f, dh);
            matvec_t_add(dir.W_ih, dz_i, dh);
            matvec_t_add(dir.W_ch, dz_c, dh);
            matvec_t_add(dir.W_oh, dz_o, dh);

            std::fill(dx.begin(), dx.end(), 0.0);
            matvec_t_add(dir.W_fx, dz_f, dx);
            matvec_t_add(dir.W_ix, dz_i, dx);
            matvec_t_add(dir.W_cx, dz_c, dx);
            matvec_t_add(dir.W_ox, dz_o, dx);
            double* erow = out.g.emb.a.data() + static_cast<std::size_t>(st.token) * model.E;
            for (std::size_t e = 0; e < model.E; ++e) erow[e] += dx[e];
        }
    };
    bptt(model.fwd, out.g.fwd, fwd_run.steps, dh_fwd);
    bptt(model.bwd, out.g.bwd, bwd_run.steps, dh_bwd);
    return out;
}

constexpr char kModelMagic[16] = {'L','S','H','A','L','I','G','N','-','M','O','D','E','L',0,0};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw ParseError(path + ": truncated checkpoint");
    }
    return v;
}

} // namespace

LstmParams::LstmParams(std::uint32_t V_, std::uint32_t E_, std::uint32_t H_,
                       std::uint32_t w_, std::uint32_t M_)
    : V(V_), E(E_), H(H_), w(w_), M(M_) {
    emb = Mat(V, E);
    for (LstmDirParams* d : {&fwd, &bwd}) {
        d->W_fh = Mat(H, H); d->W_fx = Mat(H, E); d->b_f = Mat(H, 1);
        d->W_ih = Mat(H, H); d->W_ix = Mat(H, E); d->b_i = Mat(H, 1);
        d->W_ch = Mat(H, H); d->W_cx = Mat(H, E); d->b_c = Mat(H, 1);
        d->W_oh = Mat(H, H); d->W_ox = Mat(H, E); d->b_o = Mat(H, 1);
    }
    W_y = Mat(V, 2 * static_cast<std::size_t>(H));
    b_y = Mat(V, 1);
}

void LstmParams::for_each_tensor(const std::function<void(Mat&)>& fn) {
    fn(emb);
    for (LstmDirParams* d : {&fwd, &bwd}) {
        fn(d->W_fh); fn(d->W_fx); fn(d->b_f);
        fn(d->W_ih); fn(d->W_ix); fn(d->b_i);
        fn(d->W_ch); fn(d->W_cx); fn(d->b_c);
        fn(d->W_oh); fn(d->W_ox); fn(d->b_o);
    }
    fn(W_y);
    fn(b_y);
}

void LstmParams::for_each_tensor(const std::function<void(const Mat&)>& fn) const {
    const_cast<LstmParams*>(this)->for_each_tensor([&](Mat& m) { fn(m); });
}

std::size_t LstmParams::num_params() const {
    std::size_t n = 0;
    for_each_tensor([&](const Mat& m) { n += m.size(); });
    return n;
}

void TrainConfig::validate() const {
    if (learning_rate <= 0) throw ConfigError("learning rate must be positive");
    if (clip_norm <= 0) throw ConfigError("clip norm must be positive");
    if (H < 1 || E < 1 || w < 1 || M < 2 || b < 1) {
        throw ConfigError("model dimensions must satisfy H,E,w,b >= 1 and M >= 2");
    }
}

LstmParams init_params(std::uint32_t V, const TrainConfig& cfg) {
    cfg.validate();
    if (V < 2) throw ConfigError("vocabulary size must be >= 2");
    LstmParams p(V, cfg.E, cfg.H, cfg.w, cfg.M);
    std::mt19937_64 rng(cfg.seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.H));
    std::uniform_real_distribution<double> dist(-bound, bound);
    p.for_each_tensor([&](Mat& m) {
        if (m.cols == 1) return; // biases stay zero
        for (double& v : m.a) v = dist(rng);
    });
    // Forget bias +1 keeps early memory alive.
    for (LstmDirParams* d : {&p.fwd, &p.bwd}) {
        std::fill(d->b_f.a.begin(), d->b_f.a.end(), 1.0);
    }
    return p;
}

LstmParams make_zero_like(const LstmParams& params) {
    return LstmParams(params.V, params.E, params.H, params.w, params.M);
}

LstmState cell_step(const LstmDirParams& dir, std::span<const double> x,
                    const LstmState& prev, GateCache* cache) {
    const std::size_t H = dir.W_fh.rows;
    if (x.size() != dir.W_fx.cols || prev.h.size() != H) {
        throw ConfigError("cell_step shape mismatch");
    }
    std::vector<double> zf, zi, zc, zo;
    affine(dir.W_fh, prev.h, dir.b_f, zf); matvec_add(dir.W_fx, x, zf);
    affine(dir.W_ih, prev.h, dir.b_i, zi); matvec_add(dir.W_ix, x, zi);
    affine(dir.W_ch, prev.h, dir.b_c, zc); matvec_add(dir.W_cx, x, zc);
    affine(dir.W_oh, prev.h, dir.b_o, zo); matvec_add(dir.W_ox, x, zo);

    LstmState next(H);
    std::vector<double> f(H), i(H), o(H), ct(H), tc(H);
    for (std::size_t j = 0; j < H; ++j) {
        f[j] = sigmoid(zf[j]);
        i[j] = sigmoid(zi[j]);
        o[j] = sigmoid(zo[j]);
        ct[j] = std::tanh(zc[j]);
        next.c[j] = f[j] * prev.c[j] + i[j] * ct[j];
        tc[j] = std::tanh(next.c[j]);
        next.h[j] = o[j] * tc[j];
        if (!std::isfinite(next.h[j]) || !std::isfinite(next.c[j])) {
            throw NumericError("non-finite LSTM state at hidden unit " + std::to_string(j));
        }
    }
    if (cache) {
        cache->h_prev = prev.h;
        cache->c_prev = prev.c;
        cache->f = std::move(f);
        cache->i = std::move(i);
        cache->o = std::move(o);
        cache->ctilde = std::move(ct);
        cache->c = next.c;
        cache->tanh_c = std::move(tc);
        cache->h = next.h;
    }
    return next;
}

SequenceForward forward_sequence(const LstmParams& model, std::span<const TokenId> ids,
                                 const std::vector<TokenId>& rc_table) {
    if (ids.size() < 2) throw ValidationError("forward_sequence needs at least 2 tokens");
    check_ids(model, ids);
    const std::uint32_t M = static_cast<std::uint32_t>(ids.size());
    const std::uint32_t H = model.H;

    const auto fwd_run = run_direction(model, model.fwd, ids, true);
    const auto ids_bwd = rc_ids(ids, rc_table);
    const auto bwd_run = run_direction(model, model.bwd, ids_bwd, true);

    SequenceForward out;
    out.V = model.V;
    out.final_fwd = fwd_run.final_state.h;
    out.final_bwd = bwd_run.final_state.h;
    out.probs.resize(static_cast<std::size_t>(M - 1) * model.V);

    std::vector<double> u(2 * H, 0.0), z, p;
    for (std::uint32_t t = 0; t + 1 < M; ++t) {
        const std::uint32_t k = M - t - 2;
        std::memcpy(u.data(), fwd_run.steps[t].h.data(), H * sizeof(double));
        if (k > 0) {
            std::memcpy(u.data() + H, bwd_run.steps[k - 1].h.data(), H * sizeof(double));
        } else {
            std::memset(u.data() + H, 0, H * sizeof(double));
        }
        affine(model.W_y, u, model.b_y, z);
        softmax_rows(z, p);
        std::memcpy(out.probs.data() + static_cast<std::size_t>(t) * model.V, p.data(),
                    model.V * sizeof(double));
    }
    return out;
}

BiFinalStates run_bidirectional(const LstmParams& model, std::span<const TokenId> ids,
                                const std::vector<TokenId>& rc_table) {
    if (ids.empty()) throw ValidationError("cannot embed an empty token sequence");
    check_ids(model, ids);
    const auto fwd_run = run_direction(model, model.fwd, ids, false);
    const auto ids_bwd = rc_ids(ids, rc_table);
    const auto bwd_run = run_direction(model, model.bwd, ids_bwd, false);
    return {fwd_run.final_state.h, bwd_run.final_state.h};
}

std::pair<double, LstmParams> loss_and_grads(const LstmParams& model, const Batch& batch,
                                             const std::vector<TokenId>& rc_table) {
    if (batch.words_per_seq < 2) throw ValidationError("batch rows need M >= 2");
    check_ids(model, batch.tokens);
    const std::uint32_t b = batch.seqs_per_batch;
    const std::uint32_t M = batch.words_per_seq;
    const double t_pred = static_cast<double>(b) * (M - 1);
    const double scale = 1.0 / t_pred;

    LstmParams grads = make_zero_like(model);
    std::vector<Mat*> dst;
    grads.for_each_tensor([&](Mat& m) { dst.push_back(&m); });
    double ce = 0.0;
    for (std::uint32_t r = 0; r < b; ++r) {
        RowGrads rg = row_loss_and_grads(model, {batch.row(r), M}, rc_table, scale);
        ce += rg.ce;
        std::vector<const Mat*> src;
        rg.g.for_each_tensor([&](const Mat& m) { src.push_back(&m); });
        for (std::size_t i = 0; i < dst.size(); ++i) {
            for (std::size_t j = 0; j < dst[i]->a.size(); ++j) dst[i]->a[j] += src[i]->a[j];
        }
    }
    const double loss = ce / t_pred;
    if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
    return {loss, std::move(grads)};
}

double global_grad_norm(const LstmParams& grads) {
    double sq = 0.0;
    grads.for_each_tensor([&](const Mat& m) {
        for (double v : m.a) sq += v * v;
    });
    return std::sqrt(sq);
}

void clip_and_update(LstmParams& model, const LstmParams& grads, OptimizerState& opt,
                     const TrainConfig& cfg) {
    const double norm = global_grad_norm(grads);
    const double rescale = (norm > cfg.clip_norm && norm > 0.0) ? cfg.clip_norm / norm : 1.0;

    if (cfg.optimizer == Optimizer::Sgd) {
        std::vector<const Mat*> gs;
        grads.for_each_tensor([&](const Mat& m) { gs.push_back(&m); });
        std::size_t idx = 0;
        model.for_each_tensor([&](Mat& m) {
            const Mat& g = *gs[idx++];
            for (std::size_t j = 0; j < m.a.size(); ++j) m.a[j] -= cfg.learning_rate * rescale * g.a[j];
        });
    } else {
        const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        if (opt.m.empty()) {
            const std::size_t n = model.num_params();
            opt.m.assign(n, 0.0);
            opt.v.assign(n, 0.0);
        }
        ++opt.step;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(opt.step));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(opt.step));
        std::vector<const Mat*> gs;
        grads.for_each_tensor([&](const Mat& m) { gs.push_back(&m); });
        std::size_t idx = 0, flat = 0;
        model.for_each_tensor([&](Mat& m) {
            const Mat& g = *gs[idx++];
            for (std::size_t j = 0; j < m.a.size(); ++j, ++flat) {
                const double gj = g.a[j] * rescale;
                opt.m[flat] = beta1 * opt.m[flat] + (1.0 - beta1) * gj;
                opt.v[flat] = beta2 * opt.v[flat] + (1.0 - beta2) * gj * gj;
                const double mhat = opt.m[flat] / bc1;
                const double vhat = opt.v[flat] / bc2;
                m.a[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + eps);
            }
        });
    }
    model.for_each_tensor([&](Mat& m) {
        for (double v : m.a) {
            if (!std::isfinite(v)) throw NumericError("non-finite parameter after update");
        }
    });
}

double perplexity(const LstmParams& model, std::span<const TokenId> stream,
                  const std::vector<TokenId>& rc_table) {
    if (stream.size() < 2) throw ValidationError("perplexity needs a stream of >= 2 tokens");
    check_ids(model, stream);
    const std::uint32_t M = model.M;
    double ce = 0.0;
    std::size_t n_pred = 0;
    std::size_t pos = 0;
    while (pos < stream.size()) {
        const std::size_t len = std::min<std::size_t>(M, stream.size() - pos);
        if (len < 2) break;
        const auto window = stream.subspan(pos, len);
        const SequenceForward f = forward_sequence(model, window, rc_table);
        for (std::size_t t = 0; t + 1 < len; ++t) {
            const double p = f.row(t)[window[t + 1]];
            ce += -std::log(std::max(p, 1e-300));
            ++n_pred;
        }
        pos += len;
    }
    if (n_pred == 0) throw ValidationError("perplexity stream has no usable window");
    return std::exp(ce / static_cast<double>(n_pred));
}

void save_checkpoint(const std::string& path, const LstmParams& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write checkpoint: " + path);
    out.write(kModelMagic, sizeof(kModelMagic));
    write_pod(out, std::uint32_t{1});
    write_pod(out, model.V);
    write_pod(out, model.E);
    write_pod(out, model.H);
    write_pod(out, model.w);
    write_pod(out, model.M);
    model.for_each_tensor([&](const Mat& m) {
        out.write(reinterpret_cast<const char*>(m.a.data()),
                  static_cast<std::streamsize>(m.a.size() * sizeof(double)));
    });
    if (!out) throw ValidationError("short write on checkpoint: " + path);
}

LstmParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open checkpoint: " + path);
    char magic[16];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        throw ParseError(path + ": not a model checkpoint");
    }
    const auto version = read_pod<std::uint32_t>(in, path);
    if (version != 1) throw ParseError(path + ": unsupported checkpoint version " + std::to_string(version));
    const auto V = read_pod<std::uint32_t>(in, path);
    const auto E = read_pod<std::uint32_t>(in, path);
    const auto H = read_pod<std::uint32_t>(in, path);
    const auto w = read_pod<std::uint32_t>(in, path);
    const auto M = read_pod<std::uint32_t>(in, path);
    LstmParams model(V, E, H, w, M);
    model.for_each_tensor([&](Mat& m) {
        if (!in.read(reinterpret_cast<char*>(m.a.data()),
                     static_cast<std::streamsize>(m.a.size() * sizeof(double)))) {
            throw ParseError(path + ": truncated checkpoint tensors");
        }
    });
    return model;
}

} // namespace lshalign
