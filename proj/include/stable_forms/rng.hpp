#pragma once

// Reproducible random streams: a SplitMix64 seed sequence feeding mt19937_64.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace stable_forms {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Independent generator for sub-stream `index` of `seed`; the same (seed, index) pair
/// always yields the same sequence regardless of which thread consumes it.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index = 0) {
  SplitMix64 mix(seed);
  std::uint64_t s = mix.next();
  SplitMix64 sub(s ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return std::mt19937_64(sub.next());
}

inline Eigen::VectorXd normal_vector(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(gen);
  return v;
}

inline Eigen::MatrixXd normal_matrix(std::mt19937_64& gen, int rows, int cols) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = dist(gen);
  return m;
}

}  // namespace stable_forms
