#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tsfs/linalg.hpp"

namespace tsfs::test {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (double& v : m.values()) v = normal(rng);
    return m;
}

inline Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
    Matrix a = random_matrix(n, n, seed);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
    return a;
}

/// Fresh empty directory under the system temp dir, unique per name.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("tsfs_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Number of entries of `picked` that occur in `wanted`.
inline std::size_t overlap(const std::vector<std::size_t>& picked, const std::vector<std::size_t>& wanted) {
    std::size_t hits = 0;
    for (std::size_t p : picked)
        for (std::size_t w : wanted) hits += (p == w);
    return hits;
}

}  // namespace tsfs::test
