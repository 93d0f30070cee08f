#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lshalign/embed.hpp"
#include "test_util.hpp"

using namespace lshalign;
using testutil::TempFile;

namespace {

TrainConfig cfg_of(std::uint32_t H, std::uint32_t E, std::uint32_t w, std::uint32_t M,
                   std::uint64_t seed) {
    TrainConfig cfg;
    cfg.H = H;
    cfg.E = E;
    cfg.w = w;
    cfg.M = M;
    cfg.b = 1;
    cfg.seed = seed;
    return cfg;
}

std::vector<TokenId> iota_rc(std::uint32_t V) {
    std::vector<TokenId> t(V);
    for (std::uint32_t i = 0; i < V; ++i) t[i] = V - 1 - i;
    return t;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / std::sqrt(na * nb);
}

} // namespace

TEST_CASE("a zero-weight model embeds everything to the zero vector") {
    LstmParams model(5, 3, 4, 2, 6);
    const auto rc = iota_rc(5);
    const std::vector<TokenId> ids{1, 2, 3, 0, 4, 2};
    const auto v = embed_sequence(model, ids, rc);
    REQUIRE(v.size() == 8);
    for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("embedding is deterministic bitwise") {
    LstmParams model = init_params(9, cfg_of(6, 4, 2, 5, 3));
    const auto rc = iota_rc(9);
    const std::vector<TokenId> ids{1, 8, 3, 0, 7};
    CHECK(embed_sequence(model, ids, rc) == embed_sequence(model, ids, rc));
}

TEST_CASE("inputs differing in the last word embed differently") {
    LstmParams model = init_params(9, cfg_of(6, 4, 2, 5, 4));
    const auto rc = iota_rc(9);
    std::vector<TokenId> a{1, 8, 3, 0, 7};
    std::vector<TokenId> b = a;
    b.back() = 2;
    CHECK(embed_sequence(model, a, rc) != embed_sequence(model, b, rc));
}

TEST_CASE("embedding norms stay under sqrt(2H)") {
    LstmParams model = init_params(9, cfg_of(6, 4, 2, 5, 8));
    const auto rc = iota_rc(9);
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TokenId> ids(1 + rng() % 40);
        for (auto& id : ids) id = static_cast<TokenId>(rng() % 9);
        const auto v = embed_sequence(model, ids, rc);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        CHECK(std::sqrt(norm) <= std::sqrt(12.0));
    }
}

TEST_CASE("store window counts follow the count law") {
    LstmParams model = init_params(5, cfg_of(2, 2, 2, 100, 0));
    const auto rc = iota_rc(5);
    const std::vector<TokenId> tokens(1000, 1);
    CHECK(build_ref_store(model, tokens, rc, 100, 100).count() == 10);
    CHECK(build_ref_store(model, tokens, rc, 100, 1).count() == 901);
    const std::vector<TokenId> few(99, 1);
    CHECK_THROWS_AS(build_ref_store(model, few, rc, 100, 1), ValidationError);
}

TEST_CASE("count law matches the arithmetic oracle on random configs") {
    std::mt19937_64 rng(77);
    LstmParams model = init_params(5, cfg_of(2, 2, 3, 10, 0));
    const auto rc = iota_rc(5);
    for (int trial = 0; trial < 25; ++trial) {
        const std::uint32_t window = 1 + rng() % 40;
        const std::uint32_t stride = 1 + rng() % 40;
        const std::size_t n = window + rng() % 400;
        const std::vector<TokenId> tokens(n, 2);
        const auto store = build_ref_store(model, tokens, rc, window, stride);
        const std::uint64_t expect = (n - window) / stride + 1; // arithmetic oracle
        CHECK(store.count() == expect);
        CHECK(store.count() == expected_window_count(n, window, stride));
        for (std::size_t i = 0; i < store.count(); ++i) {
            CHECK(store.offsets[i] == i * static_cast<std::uint64_t>(stride) * 3);
        }
    }
}

TEST_CASE("embed_query chunks and pads reads") {
    // Table-1 geometry: read 151bp, w=10, M=100 -> 15 tokens, one padded chunk
    LstmParams model = init_params(3, cfg_of(4, 3, 10, 100, 1));
    Dictionary dict(10);
    dict.add("ACGTACGTAC");
    dict.add("TTTTTTTTTT");
    REQUIRE(dict.vocab_size() == 3);
    const auto rc = reverse_complement_table(dict);
    std::mt19937_64 rng(5);

    const QueryVector q1 = embed_query(model, dict, rc, "r1", testutil::random_dna(151, rng));
    CHECK(q1.chunks.size() == 1);
    CHECK(q1.chunks[0].size() == 8); // 2H

    const QueryVector q2 = embed_query(model, dict, rc, "r2", testutil::random_dna(1000, rng));
    CHECK(q2.chunks.size() == 1); // l == M*w exactly

    const QueryVector q3 = embed_query(model, dict, rc, "r3", testutil::random_dna(2000, rng));
    CHECK(q3.chunks.size() == 2);
}

TEST_CASE("embed_query rejects reads shorter than one word") {
    LstmParams model = init_params(3, cfg_of(4, 3, 10, 100, 1));
    Dictionary dict(10);
    dict.add("ACGTACGTAC");
    dict.add("TTTTTTTTTT");
    const auto rc = reverse_complement_table(dict);
    CHECK_THROWS_AS(embed_query(model, dict, rc, "r", "ACG"), ValidationError);
}

TEST_CASE("a planted full-window read embeds identically to its window") {
    std::mt19937_64 rng(31);
    const std::uint32_t w = 3, M = 8;
    const std::string genome = testutil::random_dna(600, rng);
    Dictionary dict(w);
    tokenize(genome, dict, TokenizeMode::Train);
    const auto tokens = tokenize_frozen(genome, dict);
    const auto rc = reverse_complement_table(dict);
    TrainConfig cfg = cfg_of(5, 4, w, M, 7);
    LstmParams model = init_params(dict.vocab_size(), cfg);

    const auto store = build_ref_store(model, tokens, rc, M, 1);
    const std::size_t k = 37; // word-aligned plant
    const std::string read = genome.substr(k * w, static_cast<std::size_t>(M) * w);
    const QueryVector q = embed_query(model, dict, rc, "planted", read);
    REQUIRE(q.chunks.size() == 1);

    std::vector<double> window(store.window(k).begin(), store.window(k).end());
    std::vector<double> chunk = q.chunks[0];
    CHECK(cosine(chunk, window) == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t d = 0; d < chunk.size(); ++d) {
        CHECK(static_cast<float>(chunk[d]) == store.window(k)[d]);
    }
}

TEST_CASE("vector store round-trips through its file format") {
    LstmParams model = init_params(5, cfg_of(3, 2, 2, 4, 2));
    const auto rc = iota_rc(5);
    std::mt19937_64 rng(12);
    std::vector<TokenId> tokens(200);
    for (auto& t : tokens) t = static_cast<TokenId>(rng() % 5);
    const auto store = build_ref_store(model, tokens, rc, 4, 2);
    TempFile f("store.bin");
    save_store(f.str(), store);
    const auto back = load_store(f.str());
    CHECK(back.dim == store.dim);
    CHECK(back.window_words == store.window_words);
    CHECK(back.stride_chars == store.stride_chars);
    CHECK(back.offsets == store.offsets);
    CHECK(back.vectors == store.vectors);
}

TEST_CASE("store loader rejects foreign files") {
    TempFile f("notastore.bin", "garbage garbage garbage garbage!");
    CHECK_THROWS_AS(load_store(f.str()), ParseError);
}
