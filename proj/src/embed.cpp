#include "lshalign/embed.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace lshalign {

namespace {

constexpr char kStoreMagic[16] = {'L','S','H','A','L','I','G','N','-','V','E','C',0,0,0,0};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw ParseError(path + ": truncated vector store");
    }
    return v;
}

} // namespace

std::vector<double> embed_sequence(const LstmParams& model, std::span<const TokenId> ids,
                                   const std::vector<TokenId>& rc_table) {
    const BiFinalStates s = run_bidirectional(model, ids, rc_table);
    std::vector<double> v;
    v.reserve(s.fwd.size() + s.bwd.size());
    v.insert(v.end(), s.fwd.begin(), s.fwd.end());
    v.insert(v.end(), s.bwd.begin(), s.bwd.end());
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericError("non-finite embedding entry");
    }
    return v;
}

std::uint64_t expected_window_count(std::uint64_t tokens, std::uint32_t window_words,
                                    std::uint32_t stride_words) {
    if (tokens < window_words) return 0;
    return (tokens - window_words) / stride_words + 1;
}

RefVectorStore build_ref_store(const LstmParams& model, const std::vector<TokenId>& tokens,
                               const std::vector<TokenId>& rc_table,
                               std::uint32_t window_words, std::uint32_t stride_words) {
    if (window_words < 1) throw ConfigError("window_words must be >= 1");
    if (stride_words < 1) throw ConfigError("stride must be >= 1 word");
    if (tokens.size() < window_words) {
        throw ValidationError("empty store: " + std::to_string(tokens.size()) +
                              " tokens < window of " + std::to_string(window_words));
    }
    RefVectorStore store;
    store.dim = 2 * model.H;
    store.window_words = window_words;
    store.word_size = model.w;
    store.stride_chars = static_cast<std::uint64_t>(stride_words) * model.w;

    const std::uint64_t n = expected_window_count(tokens.size(), window_words, stride_words);
    store.offsets.reserve(n);
    store.vectors.reserve(n * store.dim);
    for (std::uint64_t wi = 0; wi < n; ++wi) {
        const std::size_t tok = static_cast<std::size_t>(wi) * stride_words;
        const auto v = embed_sequence(model, {tokens.data() + tok, window_words}, rc_table);
        store.offsets.push_back(static_cast<std::uint64_t>(tok) * model.w);
        for (double x : v) store.vectors.push_back(static_cast<float>(x));
    }
    return store;
}

QueryVector embed_query(const LstmParams& model, const Dictionary& dict,
                        const std::vector<TokenId>& rc_table,
                        const std::string& query_id, std::string_view read_seq) {
    if (read_seq.size() < dict.word_size()) {
        throw ValidationError("read shorter than one word: " + query_id);
    }
    const std::vector<TokenId> ids = tokenize_frozen(read_seq, dict);
    const std::uint32_t M = model.M;
    QueryVector q;
    q.query_id = query_id;
    q.dim_per_chunk = 2 * model.H;
    for (std::size_t pos = 0; pos < ids.size(); pos += M) {
        std::vector<TokenId> chunk(ids.begin() + static_cast<std::ptrdiff_t>(pos),
                                   ids.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(pos + M, ids.size())));
        chunk.resize(M, dict.unk_id()); // right-pad the trailing chunk
        q.chunks.push_back(embed_sequence(model, chunk, rc_table));
    }
    return q;
}

void save_store(const std::string& path, const RefVectorStore& store) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write vector store: " + path);
    out.write(kStoreMagic, sizeof(kStoreMagic));
    write_pod(out, std::uint32_t{1});
    write_pod(out, store.dim);
    write_pod(out, store.window_words);
    write_pod(out, store.word_size);
    write_pod(out, store.stride_chars);
    write_pod(out, static_cast<std::uint64_t>(store.count()));
    for (std::size_t i = 0; i < store.count(); ++i) {
        write_pod(out, store.offsets[i]);
        out.write(reinterpret_cast<const char*>(store.vectors.data() + i * store.dim),
                  static_cast<std::streamsize>(store.dim * sizeof(float)));
    }
    if (!out) throw ValidationError("short write on vector store: " + path);
}

RefVectorStore load_store(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open vector store: " + path);
    char magic[16];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kStoreMagic, sizeof(magic)) != 0) {
        throw ParseError(path + ": not a vector store");
    }
    const auto version = read_pod<std::uint32_t>(in, path);
    if (version != 1) throw ParseError(path + ": unsupported store version");
    RefVectorStore store;
    store.dim = read_pod<std::uint32_t>(in, path);
    store.window_words = read_pod<std::uint32_t>(in, path);
    store.word_size = read_pod<std::uint32_t>(in, path);
    store.stride_chars = read_pod<std::uint64_t>(in, path);
    const auto count = read_pod<std::uint64_t>(in, path);
    store.offsets.reserve(count);
    store.vectors.resize(count * store.dim);
    for (std::uint64_t i = 0; i < count; ++i) {
        store.offsets.push_back(read_pod<std::uint64_t>(in, path));
        if (!in.read(reinterpret_cast<char*>(store.vectors.data() + i * store.dim),
                     static_cast<std::streamsize>(store.dim * sizeof(float)))) {
            throw ParseError(path + ": truncated store vectors");
        }
    }
    return store;
}

} // namespace lshalign
