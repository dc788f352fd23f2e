#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace oqkd {

// Seedable generator threaded explicitly through every stochastic operation.
// All draws go through this wrapper rather than <random> distributions, which
// are implementation-defined; this keeps experiment output byte-identical
// across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(mix(seed)) {}

  // Independent stream for one trial of a batch experiment.
  static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial) {
    return Rng(mix(master_seed + 0x9e3779b97f4a7c15ull * (trial + 1)));
  }

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::index: empty range");
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  // Standard normal via Box-Muller (used by test-side Haar samplers).
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  // Draw an index from unnormalized non-negative weights.
  std::size_t weighted(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    if (total <= 0.0) throw std::invalid_argument("Rng::weighted: zero total weight");
    double u = uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      u -= w[i];
      if (u < 0.0) return i;
    }
    return w.size() - 1;
  }

 private:
  // splitmix64 finalizer; decorrelates adjacent seeds.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 eng_;
};

}  // namespace oqkd
