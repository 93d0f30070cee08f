#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "lshalign/pipeline.hpp"
#include "test_util.hpp"

using namespace lshalign;
namespace fs = std::filesystem;

namespace {

// shared scratch directory; each test uses distinct file names
struct WorkDir {
    fs::path dir;
    WorkDir() : dir("pipeline_work") { fs::create_directories(dir); }
    std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// small but end-to-end: 4kb markov genome, w=3, H=8 model
RunConfig mini_config(const WorkDir& work, const std::string& tag) {
    RunConfig cfg;
    cfg.train.seed = 1234;
    cfg.train.w = 3;
    cfg.train.H = 8;
    cfg.train.E = 8;
    cfg.train.M = 10;
    cfg.train.b = 2;
    cfg.train.epochs = 2;
    cfg.gen_length = 4000;
    cfg.gen_mode = "markov";
    cfg.markov_order = 2;
    cfg.markov_alpha = 0.4;
    cfg.ref_path = work("ref_" + tag + ".fa");
    cfg.model_path = work("model_" + tag + ".bin");
    cfg.dict_path = work("dict_" + tag + ".txt");
    cfg.store_path = work("store_" + tag + ".bin");
    cfg.index_path = work("index_" + tag + ".bin");
    cfg.out_path = cfg.ref_path;
    return cfg;
}

} // namespace

TEST_CASE("generated genomes are deterministic and well-formed") {
    WorkDir work;
    RunConfig cfg;
    cfg.train.seed = 7;
    cfg.gen_length = 5000;
    cfg.gen_mode = "markov";
    const std::string a = generate_genome(cfg);
    const std::string b = generate_genome(cfg);
    CHECK(a == b);
    CHECK(a.size() == 5000);
    CHECK(a.find_first_not_of("ACGT") == std::string::npos);

    cfg.gen_mode = "uniform";
    const std::string u = generate_genome(cfg);
    CHECK(u.size() == 5000);
    CHECK(u.find_first_not_of("ACGT") == std::string::npos);

    cfg.repeat_fraction = 0.3;
    const std::string r = generate_genome(cfg);
    CHECK(r.size() == 5000);

    cfg.gen_mode = "nonsense";
    CHECK_THROWS_AS(generate_genome(cfg), ConfigError);
}

TEST_CASE("planted reads are exact copies until mutated") {
    RunConfig cfg;
    cfg.train.seed = 9;
    cfg.gen_length = 3000;
    cfg.num_reads = 20;
    cfg.read_len = 60;
    const std::string genome = generate_genome(cfg);
    const auto exact = generate_reads(genome, cfg);
    REQUIRE(exact.size() == 20);
    for (const auto& r : exact) {
        CHECK(r.seq == genome.substr(r.true_t, 60));
    }
    cfg.mutation_rate = 0.05;
    const auto mutated = generate_reads(genome, cfg);
    std::size_t diffs = 0;
    for (std::size_t i = 0; i < mutated.size(); ++i) {
        CHECK(mutated[i].true_t == exact[i].true_t); // same seed, same plants
        for (std::size_t j = 0; j < 60; ++j) {
            if (mutated[i].seq[j] != exact[i].seq[j]) ++diffs;
        }
    }
    CHECK(diffs > 10); // ~60 expected at 5%
}

TEST_CASE("training writes a checkpoint, dictionary and perplexity log") {
    WorkDir work;
    RunConfig cfg = mini_config(work, "train");
    cmd_gen(cfg);
    const TrainResult result = cmd_train(cfg);
    REQUIRE(result.epoch_perplexity.size() == 2);
    CHECK(result.vocab_size <= 65); // 4^3 + 1
    CHECK(result.epoch_perplexity[0] < result.vocab_size); // learning started
    CHECK(fs::exists(cfg.model_path));
    CHECK(fs::exists(cfg.dict_path));
    const std::string log = slurp(cfg.effective_ppl_log());
    CHECK(log.find("1\t") == 0);
    CHECK(log.find("\n2\t") != std::string::npos);
}

TEST_CASE("training with epochs=0 writes an initialized checkpoint and empty log") {
    WorkDir work;
    RunConfig cfg = mini_config(work, "zeroep");
    cfg.train.epochs = 0;
    cmd_gen(cfg);
    const TrainResult result = cmd_train(cfg);
    CHECK(result.epoch_perplexity.empty());
    CHECK(fs::exists(cfg.model_path));
    CHECK(slurp(cfg.effective_ppl_log()).empty());
}

TEST_CASE("a reference shorter than one batch fails before training") {
    WorkDir work;
    RunConfig cfg = mini_config(work, "short");
    cfg.gen_length = 30; // 10 tokens < b*M = 20
    cmd_gen(cfg);
    CHECK_THROWS_AS(cmd_train(cfg), ValidationError);
}

TEST_CASE("indexing validates inputs and matches the window count law") {
    WorkDir work;
    RunConfig cfg = mini_config(work, "index");
    cmd_gen(cfg);
    cmd_train(cfg);

    cfg.window_words = 10;
    cfg.stride_words = 10;
    const IndexResult r1 = cmd_index(cfg);
    // 4000/3 = 1333 tokens; floor((1333-10)/10)+1
    CHECK(r1.windows == 133);
    CHECK(r1.bucket_entries == 133 * cfg.lsh_tables);

    cfg.stride_words = 1;
    const IndexResult r2 = cmd_index(cfg);
    CHECK(r2.windows == 1324);

    RunConfig missing = cfg;
    missing.model_path = work("missing_model.bin");
    CHECK_THROWS_WITH_AS(cmd_index(missing), doctest::Contains("missing_model.bin"), ValidationError);
}

TEST_CASE("a dictionary from a different run is rejected") {
    WorkDir work;
    RunConfig cfg = mini_config(work, "mismatch");
    cmd_gen(cfg);
    cmd_train(cfg);
    // dictionary with a different word size
    Dictionary other(2);
    other.add("AC");
    other.save(work("other_dict.txt"));
    RunConfig bad = cfg;
    bad.dict_path = work("other_dict.txt");
    CHECK_THROWS_AS(cmd_index(bad), ConfigError);
}

TEST_CASE("mini end-to-end alignment recovers planted reads deterministically") {
    WorkDir work;
    RunConfig cfg = mini_config(work, "e2e");
    cfg.num_reads = 25;
    cfg.read_len = 60;
    cfg.reads_out = work("reads_e2e.fq");
    cfg.truth_out = work("truth_e2e.tsv");
    cmd_gen(cfg);
    cmd_train(cfg);

    cfg.window_words = 18; // read tokens (20) >= window, so exact probes exist
    cfg.stride_words = 1;
    cfg.lsh_bits = 8;
    cfg.lsh_tables = 4;
    cmd_index(cfg);

    cfg.reads_path = cfg.reads_out;
    cfg.truth_path = cfg.truth_out;
    cfg.out_path = work("aln_e2e.tsv");
    cfg.report_path = work("report_e2e.json");
    const EvalReport report = cmd_align(cfg);

    CHECK(report.reads == 25);
    CHECK(report.skipped == 0);
    CHECK(report.sensitivity == 1.0); // exact reads always collide in the aligned frame
    REQUIRE(report.accuracy_strict.has_value());
    CHECK(*report.accuracy_strict >= 0.9);
    CHECK(*report.accuracy_strict <= report.sensitivity);
    CHECK(*report.accuracy_relaxed >= *report.accuracy_strict);

    // byte-identical rerun
    const std::string first = slurp(cfg.out_path);
    cfg.out_path = work("aln_e2e_rerun.tsv");
    cmd_align(cfg);
    CHECK(slurp(cfg.out_path) == first);
}

TEST_CASE("alignment without truth reports sensitivity only") {
    WorkDir work;
    RunConfig cfg = mini_config(work, "notruth");
    cfg.num_reads = 5;
    cfg.read_len = 60;
    cfg.reads_out = work("reads_nt.fq");
    cmd_gen(cfg);
    cmd_train(cfg);
    cfg.window_words = 18;
    cfg.stride_words = 2;
    cmd_index(cfg);
    cfg.reads_path = cfg.reads_out;
    cfg.out_path = work("aln_nt.tsv");
    const EvalReport report = cmd_align(cfg);
    CHECK_FALSE(report.accuracy_strict.has_value());
    CHECK(report.sensitivity <= 1.0);
}

TEST_CASE("reads shorter than one word are skipped but reported") {
    WorkDir work;
    RunConfig cfg = mini_config(work, "skip");
    cmd_gen(cfg);
    cmd_train(cfg);
    cfg.window_words = 18;
    cfg.stride_words = 2;
    cmd_index(cfg);
    std::ofstream reads(work("tiny_reads.fq"));
    reads << "@tiny\nAC\n+\nII\n"; // shorter than w=3
    reads.close();
    cfg.reads_path = work("tiny_reads.fq");
    cfg.out_path = work("aln_skip.tsv");
    const EvalReport report = cmd_align(cfg);
    CHECK(report.reads == 1);
    CHECK(report.skipped == 1);
    CHECK(report.aligned == 0);
    CHECK(slurp(cfg.out_path).find("tiny\t0\t-1\t-1\t0\t0\t*") != std::string::npos);
}

TEST_CASE("cmd_eval reports model perplexity on a stream") {
    WorkDir work;
    RunConfig cfg = mini_config(work, "eval");
    cmd_gen(cfg);
    cmd_train(cfg);
    cfg.out_path = work("eval.txt");
    const double ppl = cmd_eval(cfg);
    CHECK(ppl > 1.0);
    CHECK(slurp(cfg.out_path).find("perplexity\t") == 0);
}

TEST_CASE("cmd_eval_lsh writes a sensitivity report and validates inputs") {
    WorkDir work;
    RunConfig cfg;
    cfg.train.seed = 5;
    cfg.lsh_bits = 1;
    cfg.out_path = work("lsh_report.json");
    const double d15 = 15.0 * M_PI / 180.0;
    const double d75 = 75.0 * M_PI / 180.0;
    const SensitivityReport r = cmd_eval_lsh(cfg, 64, d15, d75, 10000);
    CHECK(r.p1_hat > r.p2_hat);
    CHECK(r.sensitive());
    CHECK(slurp(cfg.out_path).find("p1_hat") != std::string::npos);
    CHECK_THROWS_AS(cmd_eval_lsh(cfg, 64, d75, d75, 1000), ValidationError);
    CHECK_THROWS_AS(cmd_eval_lsh(cfg, 64, d15, d75, 0), ValidationError);
}
