#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sprig {

using Rng = std::mt19937_64;

// Sentinel loss for individuals whose predictions went non-finite.
inline constexpr double kWorstLoss = std::numeric_limits<double>::max();

// Threshold sentinel: a split carrying it routes every finite condition
// value to the true branch (used when no feasible threshold exists).
inline constexpr double kPassThroughThreshold = -std::numeric_limits<double>::max();

struct SprigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : SprigError {
    using SprigError::SprigError;
};

struct InputError : SprigError {
    using SprigError::SprigError;
};

struct StructuralError : SprigError {
    using SprigError::SprigError;
};

struct ParseError : SprigError {
    using SprigError::SprigError;
};

// Column-major feature matrix. Rows are observations, columns features.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }

    std::span<const double> column(std::size_t c) const {
        return { data_.data() + c * rows_, rows_ };
    }
    std::span<double> column(std::size_t c) {
        return { data_.data() + c * rows_, rows_ };
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent child stream: deterministic in (seed, lane indices), so
// per-individual work can run on any thread without perturbing results.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return Rng(splitmix64(splitmix64(seed ^ 0x5deece66dULL) ^ splitmix64(a ^ (b << 32 | b >> 32))));
}

inline double rms(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace sprig
