#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lshalign/embed.hpp"

namespace lshalign {

// Random-hyperplane (angular) LSH family: L tables of K signed
// projections each. Collision probability per bit is 1 - theta/pi.
struct HashFamily {
    std::uint32_t K = 0;
    std::uint32_t L = 0;
    std::uint32_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<double> hyperplanes; // L x K x dim

    std::span<const double> plane(std::uint32_t table, std::uint32_t bit) const {
        return {hyperplanes.data() + (static_cast<std::size_t>(table) * K + bit) * dim, dim};
    }
};

HashFamily make_hash_family(std::uint32_t K, std::uint32_t L, std::uint32_t dim, std::uint64_t seed);

// K-bit signature; bit k is 1 iff dot(plane_k, v) >= 0.
std::uint32_t signature(const HashFamily& family, std::uint32_t table, std::span<const double> v);
std::uint32_t signature(const HashFamily& family, std::uint32_t table, std::span<const float> v);

struct BucketIndex {
    std::uint32_t K = 0, L = 0, dim = 0;
    std::uint64_t seed = 0;
    // Signatures are computed on centered vectors (v - center). Raw LSTM
    // states concentrate in a cone, which would collapse all buckets.
    std::vector<double> center;
    std::vector<std::unordered_map<std::uint32_t, std::vector<std::uint32_t>>> tables;

    std::size_t total_entries() const {
        std::size_t n = 0;
        for (const auto& t : tables) {
            for (const auto& [sig, ids] : t) n += ids.size();
        }
        return n;
    }
};

BucketIndex build_index(const HashFamily& family, const RefVectorStore& store);

// Union over tables of the bucket matching the query's signature,
// deduplicated, ascending window index.
std::vector<std::uint32_t> candidates(const BucketIndex& index, const HashFamily& family,
                                      std::span<const double> v);

struct SensitivityReport {
    double d1 = 0, d2 = 0;   // angular distances, radians
    double p1_hat = 0, p2_hat = 0;
    std::uint64_t trials = 0;
    std::uint32_t K = 0;
    bool sensitive() const { return p1_hat >= p2_hat; }
};

// Empirical (d1,d2,p1,p2)-sensitivity: per trial, a fresh K-plane hash
// and a fresh random pair at the exact angular distance; reports
// full-signature collision rates.
SensitivityReport estimate_sensitivity(std::uint32_t K, std::uint32_t dim, double d1, double d2,
                                       std::uint64_t trials, std::uint64_t seed);

void save_index(const std::string& path, const BucketIndex& index, const HashFamily& family);
std::pair<BucketIndex, HashFamily> load_index(const std::string& path);

} // namespace lshalign
