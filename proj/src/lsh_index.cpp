#include "lshalign/lsh_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace lshalign {

namespace {

constexpr char kIndexMagic[16] = {'L','S','H','A','L','I','G','N','-','I','D','X',0,0,0,0};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw ParseError(path + ": truncated index");
    }
    return v;
}

template <typename Scalar>
std::uint32_t signature_impl(const HashFamily& family, std::uint32_t table,
                             std::span<const Scalar> v) {
    if (v.size() != family.dim) {
        throw ConfigError("signature dimension mismatch: vector " + std::to_string(v.size()) +
                          ", family " + std::to_string(family.dim));
    }
    if (table >= family.L) throw ConfigError("table index out of range");
    std::uint32_t sig = 0;
    for (std::uint32_t k = 0; k < family.K; ++k) {
        const auto plane = family.plane(table, k);
        double dot = 0.0;
        for (std::uint32_t d = 0; d < family.dim; ++d) dot += plane[d] * static_cast<double>(v[d]);
        sig = (sig << 1) | (dot >= 0.0 ? 1u : 0u);
    }
    return sig;
}

// Random unit vector plus a partner at exactly angle theta from it.
void random_pair_at_angle(std::mt19937_64& rng, std::uint32_t dim, double theta,
                          std::vector<double>& x, std::vector<double>& y) {
    std::normal_distribution<double> normal(0.0, 1.0);
    x.resize(dim);
    y.resize(dim);
    double nx = 0.0;
    for (auto& v : x) { v = normal(rng); nx += v * v; }
    nx = std::sqrt(nx);
    for (auto& v : x) v /= nx;

    // Gram-Schmidt a second direction orthogonal to x.
    std::vector<double> u(dim);
    double dot = 0.0;
    for (std::uint32_t d = 0; d < dim; ++d) { u[d] = normal(rng); dot += u[d] * x[d]; }
    double nu = 0.0;
    for (std::uint32_t d = 0; d < dim; ++d) { u[d] -= dot * x[d]; nu += u[d] * u[d]; }
    nu = std::sqrt(nu);
    const double c = std::cos(theta), s = std::sin(theta);
    for (std::uint32_t d = 0; d < dim; ++d) y[d] = c * x[d] + s * (u[d] / nu);
}

} // namespace

HashFamily make_hash_family(std::uint32_t K, std::uint32_t L, std::uint32_t dim, std::uint64_t seed) {
    if (K < 1 || K > 32) throw ConfigError("K must be in [1, 32]");
    if (L < 1) throw ConfigError("L must be >= 1");
    if (dim < 1) throw ConfigError("dimension must be >= 1");
    HashFamily family;
    family.K = K;
    family.L = L;
    family.dim = dim;
    family.seed = seed;
    family.hyperplanes.resize(static_cast<std::size_t>(K) * L * dim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : family.hyperplanes) v = normal(rng);
    return family;
}

std::uint32_t signature(const HashFamily& family, std::uint32_t table, std::span<const double> v) {
    return signature_impl(family, table, v);
}

std::uint32_t signature(const HashFamily& family, std::uint32_t table, std::span<const float> v) {
    return signature_impl(family, table, v);
}

BucketIndex build_index(const HashFamily& family, const RefVectorStore& store) {
    if (store.count() == 0) throw ValidationError("cannot index an empty vector store");
    if (store.dim != family.dim) {
        throw ConfigError("store dimension " + std::to_string(store.dim) +
                          " != hash family dimension " + std::to_string(family.dim));
    }
    BucketIndex index;
    index.K = family.K;
    index.L = family.L;
    index.dim = family.dim;
    index.seed = family.seed;

    index.center.assign(family.dim, 0.0);
    for (std::size_t i = 0; i < store.count(); ++i) {
        const auto v = store.window(i);
        for (std::uint32_t d = 0; d < family.dim; ++d) index.center[d] += v[d];
    }
    for (auto& c : index.center) c /= static_cast<double>(store.count());

    index.tables.resize(family.L);
    std::vector<double> centered(family.dim);
    for (std::size_t i = 0; i < store.count(); ++i) {
        const auto v = store.window(i);
        for (std::uint32_t d = 0; d < family.dim; ++d) centered[d] = v[d] - index.center[d];
        for (std::uint32_t t = 0; t < family.L; ++t) {
            const std::uint32_t sig = signature(family, t, std::span<const double>(centered));
            index.tables[t][sig].push_back(static_cast<std::uint32_t>(i));
        }
    }
    return index;
}

std::vector<std::uint32_t> candidates(const BucketIndex& index, const HashFamily& family,
                                      std::span<const double> v) {
    if (v.size() != index.dim) throw ConfigError("candidate query dimension mismatch");
    std::vector<double> centered(index.dim);
    for (std::uint32_t d = 0; d < index.dim; ++d) centered[d] = v[d] - index.center[d];
    std::vector<std::uint32_t> out;
    for (std::uint32_t t = 0; t < index.L; ++t) {
        const std::uint32_t sig = signature(family, t, std::span<const double>(centered));
        auto it = index.tables[t].find(sig);
        if (it == index.tables[t].end()) continue;
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SensitivityReport estimate_sensitivity(std::uint32_t K, std::uint32_t dim, double d1, double d2,
                                       std::uint64_t trials, std::uint64_t seed) {
    if (!(d1 >= 0.0) || !(d2 > d1) || d2 > M_PI) {
        throw ValidationError("sensitivity estimation needs 0 <= d1 < d2 <= pi");
    }
    if (trials == 0) throw ValidationError("sensitivity estimation needs trials >= 1");
    if (dim < 2) throw ConfigError("sensitivity estimation needs dim >= 2");

    SensitivityReport report;
    report.d1 = d1;
    report.d2 = d2;
    report.trials = trials;
    report.K = K;

    std::mt19937_64 rng(seed);
    std::vector<double> x, y;
    std::uint64_t hits1 = 0, hits2 = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        const HashFamily f = make_hash_family(K, 1, dim, rng());
        random_pair_at_angle(rng, dim, d1, x, y);
        if (signature(f, 0, std::span<const double>(x)) ==
            signature(f, 0, std::span<const double>(y))) ++hits1;
        random_pair_at_angle(rng, dim, d2, x, y);
        if (signature(f, 0, std::span<const double>(x)) ==
            signature(f, 0, std::span<const double>(y))) ++hits2;
    }
    report.p1_hat = static_cast<double>(hits1) / static_cast<double>(trials);
    report.p2_hat = static_cast<double>(hits2) / static_cast<double>(trials);
    return report;
}

void save_index(const std::string& path, const BucketIndex& index, const HashFamily& family) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write index: " + path);
    out.write(kIndexMagic, sizeof(kIndexMagic));
    write_pod(out, std::uint32_t{1});
    write_pod(out, index.K);
    write_pod(out, index.L);
    write_pod(out, index.dim);
    write_pod(out, index.seed);
    out.write(reinterpret_cast<const char*>(family.hyperplanes.data()),
              static_cast<std::streamsize>(family.hyperplanes.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(index.center.data()),
              static_cast<std::streamsize>(index.center.size() * sizeof(double)));
    for (const auto& table : index.tables) {
        // buckets sorted by signature for a canonical file
        std::vector<std::uint32_t> sigs;
        sigs.reserve(table.size());
        for (const auto& [sig, ids] : table) sigs.push_back(sig);
        std::sort(sigs.begin(), sigs.end());
        write_pod(out, static_cast<std::uint64_t>(sigs.size()));
        for (std::uint32_t sig : sigs) {
            const auto& ids = table.at(sig);
            write_pod(out, sig);
            write_pod(out, static_cast<std::uint64_t>(ids.size()));
            out.write(reinterpret_cast<const char*>(ids.data()),
                      static_cast<std::streamsize>(ids.size() * sizeof(std::uint32_t)));
        }
    }
    if (!out) throw ValidationError("short write on index: " + path);
}

std::pair<BucketIndex, HashFamily> load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open index: " + path);
    char magic[16];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0) {
        throw ParseError(path + ": not an index file");
    }
    const auto version = read_pod<std::uint32_t>(in, path);
    if (version != 1) throw ParseError(path + ": unsupported index version");
    BucketIndex index;
    index.K = read_pod<std::uint32_t>(in, path);
    index.L = read_pod<std::uint32_t>(in, path);
    index.dim = read_pod<std::uint32_t>(in, path);
    index.seed = read_pod<std::uint64_t>(in, path);

    HashFamily family;
    family.K = index.K;
    family.L = index.L;
    family.dim = index.dim;
    family.seed = index.seed;
    family.hyperplanes.resize(static_cast<std::size_t>(index.K) * index.L * index.dim);
    if (!in.read(reinterpret_cast<char*>(family.hyperplanes.data()),
                 static_cast<std::streamsize>(family.hyperplanes.size() * sizeof(double)))) {
        throw ParseError(path + ": truncated hyperplanes");
    }
    index.center.resize(index.dim);
    if (!in.read(reinterpret_cast<char*>(index.center.data()),
                 static_cast<std::streamsize>(index.center.size() * sizeof(double)))) {
        throw ParseError(path + ": truncated center");
    }
    index.tables.resize(index.L);
    for (auto& table : index.tables) {
        const auto n_buckets = read_pod<std::uint64_t>(in, path);
        for (std::uint64_t bkt = 0; bkt < n_buckets; ++bkt) {
            const auto sig = read_pod<std::uint32_t>(in, path);
            const auto n = read_pod<std::uint64_t>(in, path);
            std::vector<std::uint32_t> ids(n);
            if (!in.read(reinterpret_cast<char*>(ids.data()),
                         static_cast<std::streamsize>(n * sizeof(std::uint32_t)))) {
                throw ParseError(path + ": truncated bucket");
            }
            table.emplace(sig, std::move(ids));
        }
    }
    return {std::move(index), std::move(family)};
}

} // namespace lshalign
