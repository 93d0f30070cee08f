#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lshalign/aligner.hpp"
#include "lshalign/embed.hpp"
#include "lshalign/lsh_index.hpp"
#include "lshalign/lstm.hpp"
#include "lshalign/seq_io.hpp"
#include "lshalign/tokenizer.hpp"

namespace lshalign {

struct RunConfig {
    // paths
    std::string ref_path;
    std::string reads_path;
    std::string model_path;
    std::string dict_path;
    std::string store_path;
    std::string index_path;
    std::string out_path;
    std::string scheme_path;
    std::string truth_path;
    std::string ppl_log_path; // defaults to model_path + ".ppl"
    std::string report_path;

    TrainConfig train;

    // indexing
    std::uint32_t stride_words = 0; // 0 -> window_words (non-overlapping)
    std::uint32_t window_words = 0; // 0 -> model M
    std::uint32_t lsh_bits = 12;    // K
    std::uint32_t lsh_tables = 8;   // L

    // alignment
    std::int64_t margin = -1;      // <0 -> (M*w)/2
    std::uint32_t query_probes = 3; // probe subwindows per frame for long reads
    bool frame_sweep = true;
    double heldout_fraction = 0.05;

    // synthetic data generation
    std::uint64_t gen_length = 100000;
    std::string gen_mode = "markov"; // uniform | markov
    std::uint32_t markov_order = 3;
    double markov_alpha = 0.35;
    double repeat_fraction = 0.0;
    std::uint32_t num_reads = 0;
    std::uint32_t read_len = 151;
    double mutation_rate = 0.0;
    std::string reads_out;
    std::string truth_out;

    std::string effective_ppl_log() const {
        return ppl_log_path.empty() ? model_path + ".ppl" : ppl_log_path;
    }
};

struct TrainResult {
    std::vector<double> epoch_perplexity;
    std::uint32_t vocab_size = 0;
};

struct IndexResult {
    std::uint64_t windows = 0;
    std::uint64_t bucket_entries = 0;
};

struct EvalReport {
    std::uint64_t reads = 0;
    std::uint64_t aligned = 0;
    std::uint64_t skipped = 0;
    double sensitivity = 0.0;
    std::optional<double> accuracy_strict;
    std::optional<double> accuracy_relaxed;
    std::vector<std::pair<std::string, double>> stage_seconds;
};

// Synthetic reference genome: seeded uniform or low-order Markov base
// sequence, with optional repeat injection (segments copied over random
// destinations).
std::string generate_genome(const RunConfig& cfg);

struct PlantedRead {
    std::string id;
    std::uint64_t true_t = 0;
    std::string seq;
};

std::vector<PlantedRead> generate_reads(const std::string& genome, const RunConfig& cfg);

void cmd_gen(const RunConfig& cfg);
TrainResult cmd_train(const RunConfig& cfg);
IndexResult cmd_index(const RunConfig& cfg);
EvalReport cmd_align(const RunConfig& cfg);
double cmd_eval(const RunConfig& cfg);
// Returns the report; writes it to cfg.out_path when set.
SensitivityReport cmd_eval_lsh(const RunConfig& cfg, std::uint32_t dim, double d1, double d2,
                               std::uint64_t trials);

} // namespace lshalign
