#include "lshalign/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lshalign {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum Layer : int { LH = 0, LI = 1, LD = 2 }; // M/X, gap-in-y (up), gap-in-x (left)

struct DpTables {
    std::size_t n = 0, m = 0; // |x|, |y|
    std::vector<double> h, gi, gd; // (n+1) x (m+1) each

    DpTables(std::size_t n_, std::size_t m_)
        : n(n_), m(m_),
          h((n_ + 1) * (m_ + 1), kNegInf),
          gi((n_ + 1) * (m_ + 1), kNegInf),
          gd((n_ + 1) * (m_ + 1), kNegInf) {}

    std::size_t idx(std::size_t i, std::size_t j) const { return i * (m + 1) + j; }
};

struct TracebackResult {
    std::uint64_t r = 0, t = 0;
    std::string transcript;
};

// Walks predecessors from (i, j) in the given layer down to the
// alignment start. Tie priority: diagonal (H) > up (I) > left (D); in
// local mode a zero-score start wins over a zero-score extension.
TracebackResult traceback(const DpTables& dp, std::string_view x, std::string_view y,
                          const ScoringScheme& s, std::size_t i, std::size_t j, int layer,
                          bool local) {
    // Predecessor checks recompute the exact additions fill_tables made,
    // so comparisons are bitwise-safe for any real-valued scheme.
    std::string rev;
    while (i > 0 || j > 0) {
        const std::size_t at = dp.idx(i, j);
        if (layer == LH) {
            const double sub = s.substitution(x[i - 1], y[j - 1]);
            rev.push_back(sub == s.match ? 'M' : 'X');
            const double cur = dp.h[at];
            const std::size_t prev = dp.idx(i - 1, j - 1);
            if (local && cur == sub) { --i; --j; break; } // fresh start beats a zero-score prefix
            if (dp.h[prev] + sub == cur) { layer = LH; }
            else if (dp.gi[prev] + sub == cur) { layer = LI; }
            else if (dp.gd[prev] + sub == cur) { layer = LD; }
            else throw NumericError("alignment traceback lost the diagonal predecessor");
            --i; --j;
        } else if (layer == LI) {
            rev.push_back('I');
            const std::size_t prev = dp.idx(i - 1, j);
            const double v = dp.gi[at];
            if (dp.h[prev] + s.gap_block_open == v) { layer = LH; }
            else if (dp.gi[prev] + s.gap_extend == v) { layer = LI; }
            else if (dp.gd[prev] + s.gap_block_open == v) { layer = LD; }
            else throw NumericError("alignment traceback lost the up predecessor");
            --i;
        } else {
            rev.push_back('D');
            const std::size_t prev = dp.idx(i, j - 1);
            const double v = dp.gd[at];
            if (dp.h[prev] + s.gap_block_open == v) { layer = LH; }
            else if (dp.gd[prev] + s.gap_extend == v) { layer = LD; }
            else if (dp.gi[prev] + s.gap_block_open == v) { layer = LI; }
            else throw NumericError("alignment traceback lost the left predecessor");
            --j;
        }
        // dp.h[idx(0,0)] == 0 terminates global tracebacks through the corner.
        if (i == 0 && j == 0) break;
        if (layer == LH && (i == 0 || j == 0)) break;
    }
    TracebackResult out;
    out.r = i;
    out.t = j;
    out.transcript.assign(rev.rbegin(), rev.rend());
    return out;
}

void fill_tables(DpTables& dp, std::string_view x, std::string_view y,
                 const ScoringScheme& s, bool local) {
    const std::size_t n = dp.n, m = dp.m;
    dp.h[dp.idx(0, 0)] = 0.0;
    if (!local) {
        // incremental fill keeps boundary values bitwise-consistent with
        // the traceback's recomputed additions
        dp.gi[dp.idx(1, 0)] = s.gap_block_open;
        for (std::size_t i = 2; i <= n; ++i) {
            dp.gi[dp.idx(i, 0)] = dp.gi[dp.idx(i - 1, 0)] + s.gap_extend;
        }
        dp.gd[dp.idx(0, 1)] = s.gap_block_open;
        for (std::size_t j = 2; j <= m; ++j) {
            dp.gd[dp.idx(0, j)] = dp.gd[dp.idx(0, j - 1)] + s.gap_extend;
        }
    }
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t at = dp.idx(i, j);
            const std::size_t di = dp.idx(i - 1, j - 1);
            const std::size_t up = dp.idx(i - 1, j);
            const std::size_t lf = dp.idx(i, j - 1);

            double best_prev = std::max(dp.h[di], std::max(dp.gi[di], dp.gd[di]));
            if (local) best_prev = std::max(best_prev, 0.0);
            if (best_prev > kNegInf) {
                dp.h[at] = best_prev + s.substitution(x[i - 1], y[j - 1]);
            }

            double gi_val = kNegInf;
            if (dp.h[up] > kNegInf) gi_val = dp.h[up] + s.gap_block_open;
            if (dp.gi[up] > kNegInf) gi_val = std::max(gi_val, dp.gi[up] + s.gap_extend);
            if (dp.gd[up] > kNegInf) gi_val = std::max(gi_val, dp.gd[up] + s.gap_block_open);
            dp.gi[at] = gi_val;

            double gd_val = kNegInf;
            if (dp.h[lf] > kNegInf) gd_val = dp.h[lf] + s.gap_block_open;
            if (dp.gd[lf] > kNegInf) gd_val = std::max(gd_val, dp.gd[lf] + s.gap_extend);
            if (dp.gi[lf] > kNegInf) gd_val = std::max(gd_val, dp.gi[lf] + s.gap_block_open);
            dp.gd[at] = gd_val;
        }
    }
}

std::string trim(std::string_view v) {
    const auto b = v.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = v.find_last_not_of(" \t\r\n");
    return std::string(v.substr(b, e - b + 1));
}

} // namespace

void ScoringScheme::validate() const {
    if (!(gap_block_open < gap_extend && gap_extend < 0.0 && 0.0 < match)) {
        throw ConfigError("scoring scheme must satisfy gap_block_open < gap_extend < 0 < match");
    }
}

double ScoringScheme::substitution(char a, char b) const {
    if (a == 'N' || b == 'N') return mismatch;
    return a == b ? match : mismatch;
}

ScoringScheme load_scheme(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scheme: " + path);
    ScoringScheme s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path + ": expected key=value at line " + std::to_string(line_no));
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        try {
            if (key == "match") s.match = std::stod(value);
            else if (key == "mismatch") s.mismatch = std::stod(value);
            else if (key == "gap_block_open") s.gap_block_open = std::stod(value);
            else if (key == "gap_extend") s.gap_extend = std::stod(value);
            else if (key == "mode") {
                if (value == "local") s.mode = AlignMode::Local;
                else if (value == "global") s.mode = AlignMode::Global;
                else throw ParseError(path + ": mode must be local or global");
            } else {
                throw ParseError(path + ": unknown scheme key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw ParseError(path + ": bad number for '" + key + "' at line " + std::to_string(line_no));
        }
    }
    s.validate();
    return s;
}

void save_scheme(const std::string& path, const ScoringScheme& scheme) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write scheme: " + path);
    out << "match=" << scheme.match << '\n'
        << "mismatch=" << scheme.mismatch << '\n'
        << "gap_block_open=" << scheme.gap_block_open << '\n'
        << "gap_extend=" << scheme.gap_extend << '\n'
        << "mode=" << (scheme.mode == AlignMode::Local ? "local" : "global") << '\n';
}

std::optional<Alignment> align(std::string_view x, std::string_view y, const ScoringScheme& scheme) {
    scheme.validate();
    if (x.empty() || y.empty()) throw ValidationError("align requires non-empty sequences");
    for (std::string_view s : {x, y}) {
        for (char c : s) {
            if (c != 'A' && c != 'C' && c != 'G' && c != 'T' && c != 'N') {
                throw ValidationError("align alphabet is {A,C,G,T,N}, got '" + std::string(1, c) + "'");
            }
        }
    }
    const bool local = scheme.mode == AlignMode::Local;
    DpTables dp(x.size(), y.size());
    fill_tables(dp, x, y, scheme, local);

    Alignment out;
    if (local) {
        double best = 0.0;
        for (std::size_t i = 1; i <= x.size(); ++i) {
            for (std::size_t j = 1; j <= y.size(); ++j) {
                best = std::max(best, dp.h[dp.idx(i, j)]);
            }
        }
        if (best <= 0.0) return std::nullopt;
        // all maxima, then the start with the smallest (t, r)
        bool have = false;
        std::pair<std::uint64_t, std::uint64_t> best_start{0, 0};
        std::string best_transcript;
        for (std::size_t i = 1; i <= x.size(); ++i) {
            for (std::size_t j = 1; j <= y.size(); ++j) {
                if (dp.h[dp.idx(i, j)] != best) continue;
                TracebackResult tb = traceback(dp, x, y, scheme, i, j, LH, true);
                const std::pair<std::uint64_t, std::uint64_t> start{tb.t, tb.r};
                if (!have || start < best_start) {
                    have = true;
                    best_start = start;
                    best_transcript = std::move(tb.transcript);
                }
            }
        }
        out.score = best;
        out.t = best_start.first;
        out.r = best_start.second;
        out.transcript = std::move(best_transcript);
    } else {
        const std::size_t at = dp.idx(x.size(), y.size());
        int layer = LH;
        double best = dp.h[at];
        if (dp.gi[at] > best) { best = dp.gi[at]; layer = LI; }
        if (dp.gd[at] > best) { best = dp.gd[at]; layer = LD; }
        TracebackResult tb = traceback(dp, x, y, scheme, x.size(), y.size(), layer, false);
        out.score = best;
        out.t = tb.t;
        out.r = tb.r;
        out.transcript = std::move(tb.transcript);
    }
    out.length = out.transcript.size();
    return out;
}

double replay_score(std::string_view x, std::string_view y, const Alignment& alignment,
                    const ScoringScheme& scheme) {
    std::size_t i = alignment.r, j = alignment.t;
    double score = 0.0;
    char prev = 0;
    for (char col : alignment.transcript) {
        switch (col) {
            case 'M':
            case 'X': {
                if (i >= x.size() || j >= y.size()) throw ValidationError("transcript overruns sequences");
                const double s = scheme.substitution(x[i], y[j]);
                if ((col == 'M') != (s == scheme.match)) {
                    throw ValidationError("transcript column does not match sequence content");
                }
                score += s;
                ++i; ++j;
                break;
            }
            case 'I':
                if (i >= x.size()) throw ValidationError("transcript overruns query");
                score += (prev == 'I') ? scheme.gap_extend : scheme.gap_block_open;
                ++i;
                break;
            case 'D':
                if (j >= y.size()) throw ValidationError("transcript overruns reference");
                score += (prev == 'D') ? scheme.gap_extend : scheme.gap_block_open;
                ++j;
                break;
            default:
                throw ValidationError("transcript alphabet is {M,X,I,D}");
        }
        prev = col;
    }
    return score;
}

std::optional<Alignment> best_candidate(std::string_view read,
                                        const std::vector<CandidateRegion>& regions,
                                        const ScoringScheme& scheme) {
    std::optional<Alignment> best;
    for (const auto& region : regions) {
        if (region.text.empty()) continue;
        auto aln = align(read, region.text, scheme);
        if (!aln) continue;
        aln->t += region.t0;
        if (!best || aln->score > best->score ||
            (aln->score == best->score &&
             std::pair(aln->t, aln->r) < std::pair(best->t, best->r))) {
            best = std::move(aln);
        }
    }
    return best;
}

} // namespace lshalign
