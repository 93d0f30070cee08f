#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lshalign/aligner.hpp"
#include "oracles/brute_align.hpp"
#include "test_util.hpp"

using namespace lshalign;
using testutil::TempFile;

namespace {

ScoringScheme scheme_for(AlignMode mode) {
    ScoringScheme s;
    s.mode = mode;
    return s;
}

std::string random_seq(std::size_t len, std::mt19937_64& rng) {
    return testutil::random_dna(len, rng);
}

// all sequences over ACGT of exactly the given length
std::vector<std::string> all_seqs(std::size_t len) {
    std::vector<std::string> out{""};
    for (std::size_t i = 0; i < len; ++i) {
        std::vector<std::string> next;
        for (const auto& s : out) {
            for (char c : {'A', 'C', 'G', 'T'}) next.push_back(s + c);
        }
        out = std::move(next);
    }
    return out;
}

} // namespace

TEST_CASE("exact match scores length times match") {
    const auto aln = align("ACGT", "ACGT", scheme_for(AlignMode::Local));
    REQUIRE(aln.has_value());
    CHECK(aln->score == 8.0);
    CHECK(aln->transcript == "MMMM");
    CHECK(aln->r == 0);
    CHECK(aln->t == 0);
}

TEST_CASE("all-mismatch local alignment reports nothing") {
    CHECK_FALSE(align("AAAA", "TTTT", scheme_for(AlignMode::Local)).has_value());
}

TEST_CASE("hand-derived global alignments") {
    const auto a = align("ACG", "AG", scheme_for(AlignMode::Global));
    REQUIRE(a.has_value());
    CHECK(a->score == -6.0); // M I M
    CHECK(a->transcript == "MIM");

    const auto b = align("AATT", "AA", scheme_for(AlignMode::Global));
    REQUIRE(b.has_value());
    CHECK(b->score == -7.0); // M M then an I-block of two: -10 + -1
    CHECK(b->transcript == "MMII");
}

TEST_CASE("the spec's global example equals the oracle") {
    const auto aln = align("ACGTACGT", "ACGACGT", scheme_for(AlignMode::Global));
    REQUIRE(aln.has_value());
    CHECK(aln->score == oracle::global_score("ACGTACGT", "ACGACGT"));
    CHECK(replay_score("ACGTACGT", "ACGACGT", *aln, scheme_for(AlignMode::Global)) == aln->score);
}

TEST_CASE("DP equals brute force exhaustively at short lengths") {
    const ScoringScheme local = scheme_for(AlignMode::Local);
    const ScoringScheme global = scheme_for(AlignMode::Global);
    std::vector<std::string> seqs;
    for (std::size_t len = 1; len <= 3; ++len) {
        for (auto& s : all_seqs(len)) seqs.push_back(std::move(s));
    }
    for (const auto& x : seqs) {
        for (const auto& y : seqs) {
            const auto g = align(x, y, global);
            REQUIRE(g.has_value());
            CHECK(g->score == oracle::global_score(x, y));
            const auto l = align(x, y, local);
            const auto lo = oracle::local_score(x, y);
            if (lo.has_value()) {
                REQUIRE(l.has_value());
                CHECK(l->score == *lo);
            } else {
                CHECK_FALSE(l.has_value());
            }
        }
    }
}

TEST_CASE("DP equals brute force on random pairs up to length 6") {
    const ScoringScheme local = scheme_for(AlignMode::Local);
    const ScoringScheme global = scheme_for(AlignMode::Global);
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::string x = random_seq(1 + rng() % 6, rng);
        const std::string y = random_seq(1 + rng() % 6, rng);
        CHECK(align(x, y, global)->score == oracle::global_score(x, y));
        const auto l = align(x, y, local);
        const auto lo = oracle::local_score(x, y);
        CHECK(l.has_value() == lo.has_value());
        if (l && lo) CHECK(l->score == *lo);
    }
}

TEST_CASE("alignment scores are symmetric with I/D roles swapped") {
    std::mt19937_64 rng(321);
    const ScoringScheme global = scheme_for(AlignMode::Global);
    for (int trial = 0; trial < 200; ++trial) {
        const std::string x = random_seq(1 + rng() % 8, rng);
        const std::string y = random_seq(1 + rng() % 8, rng);
        const auto a = align(x, y, global);
        const auto b = align(y, x, global);
        CHECK(a->score == b->score);
        std::string swapped = b->transcript;
        for (char& c : swapped) {
            if (c == 'I') c = 'D';
            else if (c == 'D') c = 'I';
        }
        CHECK(replay_score(x, y, *a, global) == a->score);
    }
}

TEST_CASE("transcripts replay to their scores on fuzzed inputs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const ScoringScheme s = scheme_for(trial % 2 ? AlignMode::Local : AlignMode::Global);
        const std::string x = random_seq(1 + rng() % 30, rng);
        const std::string y = random_seq(1 + rng() % 30, rng);
        const auto aln = align(x, y, s);
        if (!aln) continue;
        CHECK(replay_score(x, y, *aln, s) == aln->score);
        CHECK(aln->length == aln->transcript.size());
    }
}

TEST_CASE("local alignment of identical strings is n times match") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const std::string x = random_seq(1 + rng() % 50, rng);
        const auto aln = align(x, x, scheme_for(AlignMode::Local));
        REQUIRE(aln.has_value());
        CHECK(aln->score == 2.0 * static_cast<double>(x.size()));
    }
}

TEST_CASE("N scores as a mismatch against everything") {
    const auto aln = align("AN", "AN", scheme_for(AlignMode::Global));
    REQUIRE(aln.has_value());
    CHECK(aln->score == 1.0); // M then X: 2 - 1
    CHECK(aln->transcript == "MX");
}

TEST_CASE("empty inputs are validation errors") {
    CHECK_THROWS_AS(align("", "ACGT", scheme_for(AlignMode::Local)), ValidationError);
    CHECK_THROWS_AS(align("ACGT", "", scheme_for(AlignMode::Global)), ValidationError);
}

TEST_CASE("scheme files round-trip and validate") {
    ScoringScheme s;
    s.match = 3.0;
    s.mismatch = -2.0;
    s.gap_block_open = -12.0;
    s.gap_extend = -0.5;
    s.mode = AlignMode::Global;
    TempFile f("scheme.txt");
    save_scheme(f.str(), s);
    const ScoringScheme back = load_scheme(f.str());
    CHECK(back.match == 3.0);
    CHECK(back.mismatch == -2.0);
    CHECK(back.gap_block_open == -12.0);
    CHECK(back.gap_extend == -0.5);
    CHECK(back.mode == AlignMode::Global);

    TempFile bad("badscheme.txt", "match=2\ngap_block_open=-0.1\ngap_extend=-5\n");
    CHECK_THROWS_AS(load_scheme(bad.str()), ConfigError); // open must be < extend
    TempFile junk("junkscheme.txt", "match: 2\n");
    CHECK_THROWS_AS(load_scheme(junk.str()), ParseError);
}

TEST_CASE("best_candidate recovers a planted read") {
    std::mt19937_64 rng(7);
    const std::string genome = random_seq(8000, rng);
    const std::string read = genome.substr(5000, 151);
    std::vector<CandidateRegion> regions;
    regions.push_back({4900, std::string_view(genome).substr(4900, 400)});
    const auto aln = best_candidate(read, regions, scheme_for(AlignMode::Local));
    REQUIRE(aln.has_value());
    CHECK(aln->t == 5000);
    CHECK(aln->r == 0);
    CHECK(aln->score == 302.0);
    CHECK(aln->transcript == std::string(151, 'M'));
}

TEST_CASE("equal-scoring candidates resolve to the smaller reference offset") {
    std::mt19937_64 rng(8);
    std::string genome = random_seq(2000, rng);
    const std::string read = genome.substr(100, 50);
    std::copy(read.begin(), read.end(), genome.begin() + 900); // duplicate locus
    std::vector<CandidateRegion> regions;
    regions.push_back({850, std::string_view(genome).substr(850, 200)});
    regions.push_back({50, std::string_view(genome).substr(50, 200)});
    const auto aln = best_candidate(read, regions, scheme_for(AlignMode::Local));
    REQUIRE(aln.has_value());
    CHECK(aln->t == 100);
}

TEST_CASE("an empty candidate set aligns nothing") {
    CHECK_FALSE(best_candidate("ACGT", {}, scheme_for(AlignMode::Local)).has_value());
}

TEST_CASE("widening a candidate region never lowers the best score") {
    std::mt19937_64 rng(9);
    const std::string genome = random_seq(4000, rng);
    std::string read = genome.substr(2000, 120);
    read[10] = read[10] == 'A' ? 'C' : 'A'; // one mismatch
    const ScoringScheme s = scheme_for(AlignMode::Local);
    double prev = -1e300;
    for (std::uint64_t margin : {0ULL, 20ULL, 60ULL, 150ULL, 400ULL}) {
        const std::uint64_t start = 2000 - margin;
        const std::uint64_t len = 120 + 2 * margin;
        std::vector<CandidateRegion> regions{{start, std::string_view(genome).substr(start, len)}};
        const auto aln = best_candidate(read, regions, s);
        REQUIRE(aln.has_value());
        CHECK(aln->score >= prev);
        prev = aln->score;
    }
}
