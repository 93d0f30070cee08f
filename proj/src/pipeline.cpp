#include "lshalign/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace lshalign {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

constexpr char kBases[4] = {'A', 'C', 'G', 'T'};

std::string generate_uniform(std::uint64_t length, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> base(0, 3);
    std::string g(length, 'A');
    for (auto& c : g) c = kBases[base(rng)];
    return g;
}

// Order-k Markov chain with Dirichlet(alpha) transition rows. Low alpha
// concentrates the rows, which gives the language model something to
// learn while keeping long exact repeats vanishingly unlikely.
std::string generate_markov(std::uint64_t length, std::uint32_t order, double alpha,
                            std::mt19937_64& rng) {
    if (order < 1 || order > 10) throw ConfigError("markov order must be in [1, 10]");
    if (alpha <= 0) throw ConfigError("markov concentration must be positive");
    const std::size_t contexts = static_cast<std::size_t>(1) << (2 * order);
    std::vector<double> table(contexts * 4);
    std::gamma_distribution<double> gamma(alpha, 1.0);
    for (std::size_t ctx = 0; ctx < contexts; ++ctx) {
        double sum = 0.0;
        for (int b = 0; b < 4; ++b) {
            double v = gamma(rng);
            if (v <= 0) v = 1e-12;
            table[ctx * 4 + b] = v;
            sum += v;
        }
        for (int b = 0; b < 4; ++b) table[ctx * 4 + b] /= sum;
    }
    std::uniform_int_distribution<int> base(0, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::string g(length, 'A');
    const std::size_t mask = contexts - 1;
    std::size_t ctx = 0;
    for (std::uint64_t i = 0; i < length; ++i) {
        int b;
        if (i < order) {
            b = base(rng);
        } else {
            const double u = unit(rng);
            double acc = 0.0;
            b = 3;
            for (int k = 0; k < 4; ++k) {
                acc += table[ctx * 4 + k];
                if (u < acc) { b = k; break; }
            }
        }
        g[i] = kBases[b];
        ctx = ((ctx << 2) | static_cast<std::size_t>(b)) & mask;
    }
    return g;
}

void inject_repeats(std::string& g, double fraction, std::mt19937_64& rng) {
    if (fraction <= 0.0) return;
    if (fraction >= 1.0) throw ConfigError("repeat fraction must be < 1");
    const std::uint64_t target = static_cast<std::uint64_t>(fraction * static_cast<double>(g.size()));
    std::uint64_t copied = 0;
    std::uniform_int_distribution<std::uint64_t> seg_len_dist(200, 800);
    while (copied < target) {
        const std::uint64_t seg = std::min<std::uint64_t>(seg_len_dist(rng), g.size() / 2);
        if (seg == 0) break;
        std::uniform_int_distribution<std::uint64_t> pos(0, g.size() - seg);
        const std::uint64_t src = pos(rng);
        const std::uint64_t dst = pos(rng);
        const std::string tmp = g.substr(src, seg);
        g.replace(dst, seg, tmp);
        copied += seg;
    }
}

void write_fastq(const std::string& path, const std::vector<PlantedRead>& reads) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write reads: " + path);
    for (const auto& r : reads) {
        out << '@' << r.id << '\n' << r.seq << "\n+\n" << std::string(r.seq.size(), 'I') << '\n';
    }
}

void write_truth(const std::string& path, const std::vector<PlantedRead>& reads) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write truth file: " + path);
    for (const auto& r : reads) {
        out << r.id << '\t' << r.true_t << "\t0\n";
    }
}

struct TruthEntry {
    std::uint64_t t = 0;
    std::uint64_t r = 0;
};

std::unordered_map<std::string, TruthEntry> load_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open truth file: " + path);
    std::unordered_map<std::string, TruthEntry> truth;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            throw ParseError(path + ": expected 3 tab-separated columns at line " + std::to_string(line_no));
        }
        try {
            TruthEntry e;
            e.t = std::stoull(line.substr(tab1 + 1, tab2 - tab1 - 1));
            e.r = std::stoull(line.substr(tab2 + 1));
            truth[line.substr(0, tab1)] = e;
        } catch (const std::exception&) {
            throw ParseError(path + ": bad offsets at line " + std::to_string(line_no));
        }
    }
    return truth;
}

QuerySet load_queries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open reads: " + path);
    char first = 0;
    while (in.get(first) && (first == '\n' || first == '\r')) {}
    if (first == '>') return load_fasta_queries(path);
    if (first == '@') return load_fastq(path);
    throw ParseError(path + ": queries must be FASTA ('>') or FASTQ ('@')");
}

void check_model_dict(const LstmParams& model, const Dictionary& dict) {
    if (model.w != dict.word_size()) {
        throw ConfigError("model word size " + std::to_string(model.w) +
                          " != dictionary word size " + std::to_string(dict.word_size()));
    }
    if (model.V != dict.vocab_size()) {
        throw ConfigError("model vocabulary " + std::to_string(model.V) +
                          " != dictionary vocabulary " + std::to_string(dict.vocab_size()));
    }
}

struct Region {
    std::int64_t start = 0;
    std::int64_t end = 0; // exclusive
};

// Read-anchored candidate regions, merged and capped at 4x read length
// (longer spans split with read-length overlap).
std::vector<Region> build_regions(std::vector<Region> raw, std::int64_t genome_len,
                                  std::int64_t read_len) {
    std::vector<Region> merged;
    std::sort(raw.begin(), raw.end(), [](const Region& a, const Region& b) {
        return std::pair(a.start, a.end) < std::pair(b.start, b.end);
    });
    for (Region r : raw) {
        r.start = std::max<std::int64_t>(0, r.start);
        r.end = std::min<std::int64_t>(genome_len, r.end);
        if (r.end - r.start <= 0) continue;
        if (!merged.empty() && r.start <= merged.back().end) {
            merged.back().end = std::max(merged.back().end, r.end);
        } else {
            merged.push_back(r);
        }
    }
    const std::int64_t cap = 4 * read_len;
    std::vector<Region> out;
    for (const Region& r : merged) {
        if (r.end - r.start <= cap) {
            out.push_back(r);
            continue;
        }
        const std::int64_t step = cap - read_len;
        for (std::int64_t s = r.start; s < r.end; s += step) {
            const std::int64_t e = std::min(r.end, s + cap);
            out.push_back({s, e});
            if (e == r.end) break;
        }
    }
    return out;
}

void write_config_echo(std::ofstream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
    out << "# config:";
    for (const auto& [k, v] : kv) out << ' ' << k << '=' << v;
    out << '\n';
}

} // namespace

std::string generate_genome(const RunConfig& cfg) {
    if (cfg.gen_length < 1) throw ConfigError("genome length must be >= 1");
    std::mt19937_64 rng(cfg.train.seed);
    std::string g;
    if (cfg.gen_mode == "uniform") {
        g = generate_uniform(cfg.gen_length, rng);
    } else if (cfg.gen_mode == "markov") {
        g = generate_markov(cfg.gen_length, cfg.markov_order, cfg.markov_alpha, rng);
    } else {
        throw ConfigError("gen mode must be uniform or markov");
    }
    inject_repeats(g, cfg.repeat_fraction, rng);
    return g;
}

std::vector<PlantedRead> generate_reads(const std::string& genome, const RunConfig& cfg) {
    if (cfg.read_len < 1) throw ConfigError("read length must be >= 1");
    if (genome.size() < cfg.read_len) {
        throw ValidationError("genome shorter than read length");
    }
    // separate streams so the same seed plants the same positions with or
    // without mutations; offsets keep them off the genome stream
    std::mt19937_64 pos_rng(cfg.train.seed + 1);
    std::mt19937_64 mut_rng(cfg.train.seed + 2);
    std::uniform_int_distribution<std::uint64_t> pos_dist(0, genome.size() - cfg.read_len);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> alt(1, 3);
    std::vector<PlantedRead> reads;
    reads.reserve(cfg.num_reads);
    for (std::uint32_t i = 0; i < cfg.num_reads; ++i) {
        PlantedRead r;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "r%06u", i);
        r.id = buf;
        r.true_t = pos_dist(pos_rng);
        r.seq = genome.substr(r.true_t, cfg.read_len);
        if (cfg.mutation_rate > 0.0) {
            for (auto& c : r.seq) {
                if (unit(mut_rng) < cfg.mutation_rate) {
                    const char* p = std::strchr(kBases, c);
                    const int idx = p ? static_cast<int>(p - kBases) : 0;
                    c = kBases[(idx + alt(mut_rng)) & 3];
                }
            }
        }
        reads.push_back(std::move(r));
    }
    return reads;
}

void cmd_gen(const RunConfig& cfg) {
    if (cfg.out_path.empty()) throw ConfigError("gen requires --out for the reference FASTA");
    const std::string genome = generate_genome(cfg);
    RefGenome g;
    g.id = "synthetic";
    g.seq = genome;
    g.records.push_back({"synthetic", 0, genome.size()});
    write_fasta(cfg.out_path, g);
    std::cerr << "[gen] wrote " << genome.size() << " bases to " << cfg.out_path << '\n';
    if (cfg.num_reads > 0) {
        if (cfg.reads_out.empty()) throw ConfigError("gen with reads requires --reads-out");
        const auto reads = generate_reads(genome, cfg);
        write_fastq(cfg.reads_out, reads);
        if (!cfg.truth_out.empty()) write_truth(cfg.truth_out, reads);
        std::cerr << "[gen] wrote " << reads.size() << " reads of length " << cfg.read_len
                  << " (mutation rate " << cfg.mutation_rate << ")\n";
    }
}

TrainResult cmd_train(const RunConfig& cfg) {
    cfg.train.validate();
    if (cfg.ref_path.empty() || cfg.model_path.empty() || cfg.dict_path.empty()) {
        throw ConfigError("train requires --ref, --model and --dict");
    }
    const auto t0 = Clock::now();
    const RefGenome genome = load_fasta(cfg.ref_path);

    Dictionary dict(cfg.train.w);
    tokenize(genome.seq, dict, TokenizeMode::Train); // pass 1: vocabulary
    dict.save(cfg.dict_path);
    const std::vector<TokenId> tokens = tokenize_frozen(genome.seq, dict);

    const std::size_t held_count = static_cast<std::size_t>(
        static_cast<double>(tokens.size()) * cfg.heldout_fraction);
    const std::size_t held_start = tokens.size() - held_count;
    const std::vector<TokenId> train_tokens(tokens.begin(),
                                            tokens.begin() + static_cast<std::ptrdiff_t>(held_start));
    const std::span<const TokenId> held(tokens.data() + held_start, held_count);

    LstmParams model = init_params(dict.vocab_size(), cfg.train);
    const std::vector<TokenId> rc_table = reverse_complement_table(dict);

    TrainResult result;
    result.vocab_size = dict.vocab_size();

    std::ofstream ppl_log(cfg.effective_ppl_log());
    if (!ppl_log) throw ValidationError("cannot write perplexity log: " + cfg.effective_ppl_log());

    if (cfg.train.epochs == 0) {
        save_checkpoint(cfg.model_path, model);
        std::cerr << "[train] warning: epochs=0, wrote initialized checkpoint only\n";
        return result;
    }

    const EpochPlan plan = build_epoch(train_tokens, cfg.train.b, cfg.train.M);
    std::cerr << "[train] " << train_tokens.size() << " train tokens, " << held.size()
              << " held-out tokens, " << plan.num_batches() << " batches/epoch, V="
              << dict.vocab_size() << '\n';

    OptimizerState opt;
    for (std::uint32_t epoch = 1; epoch <= cfg.train.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (const Batch& batch : plan.batches) {
            auto [loss, grads] = loss_and_grads(model, batch, rc_table);
            epoch_loss += loss;
            clip_and_update(model, grads, opt, cfg.train);
        }
        epoch_loss /= static_cast<double>(plan.num_batches());
        save_checkpoint(cfg.model_path, model);
        if (held.size() >= 2) {
            const double ppl = perplexity(model, held, rc_table);
            result.epoch_perplexity.push_back(ppl);
            ppl_log << epoch << '\t' << format_double(ppl) << '\n';
            ppl_log.flush();
            std::cerr << "[train] epoch " << epoch << '/' << cfg.train.epochs
                      << " loss=" << format_double(epoch_loss)
                      << " heldout_ppl=" << format_double(ppl)
                      << " (" << format_double(seconds_since(t0)) << "s)\n";
        } else {
            std::cerr << "[train] epoch " << epoch << '/' << cfg.train.epochs
                      << " loss=" << format_double(epoch_loss) << " (no held-out tokens)\n";
        }
    }
    return result;
}

IndexResult cmd_index(const RunConfig& cfg) {
    if (cfg.ref_path.empty() || cfg.model_path.empty() || cfg.dict_path.empty() ||
        cfg.store_path.empty() || cfg.index_path.empty()) {
        throw ConfigError("index requires --ref, --model, --dict, --store and --index");
    }
    const LstmParams model = load_checkpoint(cfg.model_path);
    const Dictionary dict = Dictionary::load(cfg.dict_path);
    check_model_dict(model, dict);

    const RefGenome genome = load_fasta(cfg.ref_path);
    const std::vector<TokenId> tokens = tokenize_frozen(genome.seq, dict);
    const std::vector<TokenId> rc_table = reverse_complement_table(dict);

    const std::uint32_t window_words = cfg.window_words ? cfg.window_words : model.M;
    const std::uint32_t stride_words = cfg.stride_words ? cfg.stride_words : window_words;

    const auto t0 = Clock::now();
    const RefVectorStore store = build_ref_store(model, tokens, rc_table, window_words, stride_words);
    save_store(cfg.store_path, store);
    std::cerr << "[index] embedded " << store.count() << " windows of " << window_words
              << " words (stride " << stride_words << ") in "
              << format_double(seconds_since(t0)) << "s\n";

    const HashFamily family = make_hash_family(cfg.lsh_bits, cfg.lsh_tables,
                                               store.dim, cfg.train.seed);
    const BucketIndex index = build_index(family, store);
    save_index(cfg.index_path, index, family);
    IndexResult result{store.count(), index.total_entries()};
    std::cerr << "[index] " << result.bucket_entries << " bucket entries across "
              << cfg.lsh_tables << " tables\n";
    return result;
}

EvalReport cmd_align(const RunConfig& cfg) {
    if (cfg.ref_path.empty() || cfg.reads_path.empty() || cfg.model_path.empty() ||
        cfg.dict_path.empty() || cfg.store_path.empty() || cfg.index_path.empty() ||
        cfg.out_path.empty()) {
        throw ConfigError("align requires --ref, --reads, --model, --dict, --store, --index and --out");
    }
    const auto t_load = Clock::now();
    const LstmParams model = load_checkpoint(cfg.model_path);
    const Dictionary dict = Dictionary::load(cfg.dict_path);
    check_model_dict(model, dict);
    const RefGenome genome = load_fasta(cfg.ref_path);
    const RefVectorStore store = load_store(cfg.store_path);
    auto [index, family] = load_index(cfg.index_path);
    if (store.dim != index.dim) throw ConfigError("store/index dimension mismatch");
    if (store.dim != 2 * model.H) throw ConfigError("store dimension does not match model hidden size");
    const QuerySet queries = load_queries(cfg.reads_path);
    const std::vector<TokenId> rc_table = reverse_complement_table(dict);

    ScoringScheme scheme;
    if (!cfg.scheme_path.empty()) scheme = load_scheme(cfg.scheme_path);
    scheme.validate();

    std::unordered_map<std::string, TruthEntry> truth;
    if (!cfg.truth_path.empty()) truth = load_truth(cfg.truth_path);

    const std::uint32_t w = model.w;
    const std::uint32_t P = store.window_words;
    const std::int64_t margin = cfg.margin >= 0
        ? cfg.margin
        : static_cast<std::int64_t>(model.M) * w / 2;

    EvalReport report;
    report.reads = queries.reads.size();
    report.stage_seconds.emplace_back("load", seconds_since(t_load));

    std::ofstream tsv(cfg.out_path);
    if (!tsv) throw ValidationError("cannot write alignment report: " + cfg.out_path);
    tsv << "# lshalign-align v1\n";
    write_config_echo(tsv, {
        {"ref", cfg.ref_path}, {"reads", cfg.reads_path}, {"model", cfg.model_path},
        {"store", cfg.store_path}, {"index", cfg.index_path},
        {"window_words", std::to_string(P)},
        {"K", std::to_string(index.K)}, {"L", std::to_string(index.L)},
        {"margin", std::to_string(margin)},
        {"query_probes", std::to_string(cfg.query_probes)},
        {"frame_sweep", cfg.frame_sweep ? "1" : "0"},
        {"seed", std::to_string(cfg.train.seed)},
        {"match", format_double(scheme.match)}, {"mismatch", format_double(scheme.mismatch)},
        {"gap_block_open", format_double(scheme.gap_block_open)},
        {"gap_extend", format_double(scheme.gap_extend)},
    });
    tsv << "#query_id\tq\tr\tt\tlength\tscore\ttranscript\n";

    const auto t_align = Clock::now();
    std::uint64_t strict_hits = 0, relaxed_hits = 0, truth_seen = 0;

    for (std::size_t q = 0; q < queries.reads.size(); ++q) {
        const ReadRecord& read = queries.reads[q];
        if (read.seq.size() < w) {
            ++report.skipped;
            std::cerr << "[align] skipping read " << read.id << ": shorter than one word\n";
            tsv << read.id << '\t' << q << "\t-1\t-1\t0\t0\t*\n";
            continue;
        }
        const std::int64_t read_len = static_cast<std::int64_t>(read.seq.size());

        // retrieval probes: P-word subwindows of the read's token stream,
        // in every tokenization frame so grid-offset copies still collide
        std::set<std::pair<std::uint32_t, std::uint64_t>> seen; // (window idx, est read start)
        std::vector<Region> raw_regions;
        const std::uint32_t frames = cfg.frame_sweep ? std::min<std::uint32_t>(w, static_cast<std::uint32_t>(read.seq.size())) : 1;
        for (std::uint32_t frame = 0; frame < frames; ++frame) {
            std::vector<TokenId> ids = tokenize_frozen(
                std::string_view(read.seq).substr(frame), dict);
            if (ids.empty()) continue;
            std::vector<std::size_t> probe_offsets;
            if (ids.size() <= P) {
                probe_offsets.push_back(0);
                ids.resize(P, dict.unk_id()); // right-pad the short probe
            } else {
                const std::size_t span = ids.size() - P;
                const std::uint32_t n_probes = std::max<std::uint32_t>(1, cfg.query_probes);
                for (std::uint32_t k = 0; k < n_probes; ++k) {
                    const std::size_t off = n_probes == 1
                        ? 0
                        : (span * k + (n_probes - 1) / 2) / (n_probes - 1);
                    probe_offsets.push_back(off);
                }
                std::sort(probe_offsets.begin(), probe_offsets.end());
                probe_offsets.erase(std::unique(probe_offsets.begin(), probe_offsets.end()),
                                    probe_offsets.end());
            }
            for (const std::size_t off : probe_offsets) {
                const std::vector<double> v = embed_sequence(
                    model, {ids.data() + off, P}, rc_table);
                for (const std::uint32_t widx : candidates(index, family, v)) {
                    const std::int64_t win_off = static_cast<std::int64_t>(store.offsets[widx]);
                    const std::int64_t est_start = win_off -
                        static_cast<std::int64_t>(off * w + frame);
                    if (!seen.emplace(widx, static_cast<std::uint64_t>(std::max<std::int64_t>(0, est_start))).second) continue;
                    raw_regions.push_back({est_start - margin, est_start + read_len + margin});
                }
            }
        }

        const auto regions = build_regions(std::move(raw_regions),
                                           static_cast<std::int64_t>(genome.length()), read_len);
        std::vector<CandidateRegion> cand;
        cand.reserve(regions.size());
        for (const Region& r : regions) {
            cand.push_back({static_cast<std::uint64_t>(r.start),
                            std::string_view(genome.seq).substr(
                                static_cast<std::size_t>(r.start),
                                static_cast<std::size_t>(r.end - r.start))});
        }
        auto best = best_candidate(read.seq, cand, scheme);
        if (!best) {
            tsv << read.id << '\t' << q << "\t-1\t-1\t0\t0\t*\n";
            continue;
        }
        best->q = static_cast<std::int64_t>(q);
        ++report.aligned;
        tsv << read.id << '\t' << q << '\t' << best->r << '\t' << best->t << '\t'
            << best->length << '\t' << format_double(best->score) << '\t'
            << best->transcript << '\n';

        if (!truth.empty()) {
            auto it = truth.find(read.id);
            if (it != truth.end()) {
                ++truth_seen;
                const auto dt = static_cast<std::int64_t>(best->t) - static_cast<std::int64_t>(it->second.t);
                const auto dr = static_cast<std::int64_t>(best->r) - static_cast<std::int64_t>(it->second.r);
                if (dt == 0 && dr == 0) ++strict_hits;
                if (std::llabs(dt) <= 5 && std::llabs(dr) <= 5) ++relaxed_hits;
            }
        }
    }
    report.stage_seconds.emplace_back("align", seconds_since(t_align));
    report.sensitivity = report.reads == 0
        ? 0.0
        : static_cast<double>(report.aligned) / static_cast<double>(report.reads);
    if (!truth.empty()) {
        // unmatched truth rows still count in the denominator
        const auto denom = static_cast<double>(std::max<std::uint64_t>(truth.size(), 1));
        report.accuracy_strict = static_cast<double>(strict_hits) / denom;
        report.accuracy_relaxed = static_cast<double>(relaxed_hits) / denom;
        (void)truth_seen;
    }

    if (!cfg.report_path.empty()) {
        nlohmann::json j;
        j["reads"] = report.reads;
        j["aligned"] = report.aligned;
        j["skipped"] = report.skipped;
        j["sensitivity"] = report.sensitivity;
        if (report.accuracy_strict) j["accuracy_strict"] = *report.accuracy_strict;
        else j["accuracy_strict"] = nullptr;
        if (report.accuracy_relaxed) j["accuracy_relaxed"] = *report.accuracy_relaxed;
        else j["accuracy_relaxed"] = nullptr;
        for (const auto& [stage, secs] : report.stage_seconds) j["runtime_seconds"][stage] = secs;
        std::ofstream out(cfg.report_path);
        if (!out) throw ValidationError("cannot write eval report: " + cfg.report_path);
        out << j.dump(2) << '\n';
    }
    std::cerr << "[align] " << report.aligned << '/' << report.reads << " aligned, "
              << report.skipped << " skipped\n";
    return report;
}

double cmd_eval(const RunConfig& cfg) {
    if (cfg.ref_path.empty() || cfg.model_path.empty() || cfg.dict_path.empty()) {
        throw ConfigError("eval requires --ref, --model and --dict");
    }
    const LstmParams model = load_checkpoint(cfg.model_path);
    const Dictionary dict = Dictionary::load(cfg.dict_path);
    check_model_dict(model, dict);
    const RefGenome genome = load_fasta(cfg.ref_path);
    const std::vector<TokenId> tokens = tokenize_frozen(genome.seq, dict);
    const std::vector<TokenId> rc_table = reverse_complement_table(dict);
    const double ppl = perplexity(model, tokens, rc_table);
    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path);
        if (!out) throw ValidationError("cannot write perplexity: " + cfg.out_path);
        out << "perplexity\t" << format_double(ppl) << '\n';
    }
    std::cout << "perplexity\t" << format_double(ppl) << '\n';
    return ppl;
}

SensitivityReport cmd_eval_lsh(const RunConfig& cfg, std::uint32_t dim, double d1, double d2,
                               std::uint64_t trials) {
    const SensitivityReport report = estimate_sensitivity(cfg.lsh_bits, dim, d1, d2, trials,
                                                          cfg.train.seed);
    nlohmann::json j;
    j["d1"] = report.d1;
    j["d2"] = report.d2;
    j["p1_hat"] = report.p1_hat;
    j["p2_hat"] = report.p2_hat;
    j["trials"] = report.trials;
    j["K"] = report.K;
    j["sensitive"] = report.sensitive();
    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path);
        if (!out) throw ValidationError("cannot write sensitivity report: " + cfg.out_path);
        out << j.dump(2) << '\n';
    }
    std::cout << j.dump(2) << '\n';
    return report;
}

} // namespace lshalign
