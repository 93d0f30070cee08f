// lshalign command line: train a bidirectional LSTM language model over a
// reference genome, index its sequence embeddings with random-hyperplane
// LSH, and align short reads by DP-rescoring the retrieved candidates.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lshalign/pipeline.hpp"

namespace {

using lshalign::RunConfig;

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--seed", cfg.train.seed, "seed for every stochastic component");
}

void add_model_dims(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--w", cfg.train.w, "word size in characters");
    cmd->add_option("--hidden", cfg.train.H, "hidden size H");
    cmd->add_option("--embed-dim", cfg.train.E, "input embedding size E");
    cmd->add_option("--words-per-seq", cfg.train.M, "words per sequence M");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSH sequence alignment with a bidirectional LSTM embedding model"};
    app.require_subcommand(1);
    app.set_config("--config", "", "JSON/TOML config file; CLI flags take precedence");

    RunConfig cfg;
    double d1 = 0.0, d2 = 0.0;
    std::uint64_t trials = 10000;
    std::uint32_t lsh_dim = 128;

    auto* gen = app.add_subcommand("gen", "generate a synthetic reference genome and reads");
    gen->add_option("--out", cfg.out_path, "output reference FASTA")->required();
    gen->add_option("--length", cfg.gen_length, "genome length in bases");
    gen->add_option("--mode", cfg.gen_mode, "uniform | markov");
    gen->add_option("--markov-order", cfg.markov_order, "markov context length in bases");
    gen->add_option("--markov-alpha", cfg.markov_alpha, "dirichlet concentration of transition rows");
    gen->add_option("--repeat-fraction", cfg.repeat_fraction, "fraction of the genome overwritten by repeats");
    gen->add_option("--num-reads", cfg.num_reads, "planted reads to sample");
    gen->add_option("--read-len", cfg.read_len, "planted read length");
    gen->add_option("--mutation-rate", cfg.mutation_rate, "per-base substitution rate for planted reads");
    gen->add_option("--reads-out", cfg.reads_out, "output FASTQ for planted reads");
    gen->add_option("--truth-out", cfg.truth_out, "output truth TSV (read_id, true_t, true_r)");
    add_common_flags(gen, cfg);

    auto* train = app.add_subcommand("train", "train the bidirectional LSTM language model");
    train->add_option("--ref", cfg.ref_path, "reference FASTA")->required();
    train->add_option("--model", cfg.model_path, "output model checkpoint")->required();
    train->add_option("--dict", cfg.dict_path, "output dictionary")->required();
    train->add_option("--ppl-log", cfg.ppl_log_path, "per-epoch held-out perplexity log (default <model>.ppl)");
    train->add_option("--epochs", cfg.train.epochs, "training epochs");
    train->add_option("--batch-seqs", cfg.train.b, "sequences per batch b");
    train->add_option("--lr", cfg.train.learning_rate, "learning rate");
    train->add_option("--clip", cfg.train.clip_norm, "global gradient norm clip");
    train->add_option("--optimizer", [&cfg](const std::vector<std::string>& vals) {
        if (vals[0] == "sgd") cfg.train.optimizer = lshalign::Optimizer::Sgd;
        else if (vals[0] == "adam") cfg.train.optimizer = lshalign::Optimizer::Adam;
        else return false;
        return true;
    }, "sgd | adam (default adam)");
    train->add_option("--heldout-fraction", cfg.heldout_fraction, "trailing token fraction held out of training");
    add_model_dims(train, cfg);
    add_common_flags(train, cfg);

    auto* index = app.add_subcommand("index", "embed reference windows and build the LSH index");
    index->add_option("--ref", cfg.ref_path, "reference FASTA")->required();
    index->add_option("--model", cfg.model_path, "trained model checkpoint")->required();
    index->add_option("--dict", cfg.dict_path, "dictionary")->required();
    index->add_option("--store", cfg.store_path, "output vector store")->required();
    index->add_option("--index", cfg.index_path, "output LSH index")->required();
    index->add_option("--stride", cfg.stride_words, "window stride in words (default: window length)");
    index->add_option("--window-words", cfg.window_words, "window length in words (default: model M)");
    index->add_option("--lsh-bits", cfg.lsh_bits, "signature bits K");
    index->add_option("--lsh-tables", cfg.lsh_tables, "hash tables L");
    add_common_flags(index, cfg);

    auto* align = app.add_subcommand("align", "align reads against the indexed reference");
    align->add_option("--ref", cfg.ref_path, "reference FASTA")->required();
    align->add_option("--reads", cfg.reads_path, "query reads (FASTQ or FASTA)")->required();
    align->add_option("--model", cfg.model_path, "trained model checkpoint")->required();
    align->add_option("--dict", cfg.dict_path, "dictionary")->required();
    align->add_option("--store", cfg.store_path, "vector store")->required();
    align->add_option("--index", cfg.index_path, "LSH index")->required();
    align->add_option("--out", cfg.out_path, "output alignment TSV")->required();
    align->add_option("--report", cfg.report_path, "output evaluation report JSON");
    align->add_option("--scheme", cfg.scheme_path, "scoring scheme file (key=value)");
    align->add_option("--truth", cfg.truth_path, "truth TSV for accuracy evaluation");
    align->add_option("--margin", cfg.margin, "candidate widening margin in characters (default (M*w)/2)");
    align->add_option("--query-probes", cfg.query_probes, "probe subwindows per tokenization frame");
    align->add_flag("--no-frame-sweep", [&cfg](std::int64_t) { cfg.frame_sweep = false; },
                    "probe only the frame-0 tokenization");
    add_common_flags(align, cfg);

    auto* eval = app.add_subcommand("eval", "held-out perplexity of a model on a sequence stream");
    eval->add_option("--ref", cfg.ref_path, "FASTA stream to evaluate")->required();
    eval->add_option("--model", cfg.model_path, "model checkpoint")->required();
    eval->add_option("--dict", cfg.dict_path, "dictionary")->required();
    eval->add_option("--out", cfg.out_path, "optional output file");
    add_common_flags(eval, cfg);

    auto* evallsh = app.add_subcommand("eval-lsh", "empirical (d1,d2,p1,p2)-sensitivity of the hash family");
    evallsh->add_option("--d1", d1, "near angular distance, radians")->required();
    evallsh->add_option("--d2", d2, "far angular distance, radians")->required();
    evallsh->add_option("--trials", trials, "sampled pairs per distance");
    evallsh->add_option("--dim", lsh_dim, "vector dimension");
    evallsh->add_option("--lsh-bits", cfg.lsh_bits, "signature bits K");
    evallsh->add_option("--out", cfg.out_path, "output report JSON");
    add_common_flags(evallsh, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) {
            lshalign::cmd_gen(cfg);
        } else if (train->parsed()) {
            lshalign::cmd_train(cfg);
        } else if (index->parsed()) {
            lshalign::cmd_index(cfg);
        } else if (align->parsed()) {
            const auto report = lshalign::cmd_align(cfg);
            if (report.accuracy_strict) {
                std::cout << "sensitivity\t" << report.sensitivity
                          << "\naccuracy_strict\t" << *report.accuracy_strict
                          << "\naccuracy_relaxed\t" << *report.accuracy_relaxed << '\n';
            } else {
                std::cout << "sensitivity\t" << report.sensitivity << "\naccuracy\tn/a\n";
            }
        } else if (eval->parsed()) {
            lshalign::cmd_eval(cfg);
        } else if (evallsh->parsed()) {
            const auto report = lshalign::cmd_eval_lsh(cfg, lsh_dim, d1, d2, trials);
            if (!report.sensitive()) {
                std::cerr << "error: sensitivity violated: p1_hat < p2_hat\n";
                return 2;
            }
        }
    } catch (const lshalign::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const lshalign::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const lshalign::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
