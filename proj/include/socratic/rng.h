#ifndef SOCRATIC_RNG_H_
#define SOCRATIC_RNG_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace socratic {

// Seeded generator whose output is identical across standard libraries.
// The std:: distributions are implementation-defined, so only the raw
// mt19937_64 stream and std::seed_seq (both fully specified) are used.
class Rng {
 public:
  // `stream` distinguishes independent sub-streams derived from one seed,
  // e.g. {trial_index} for Monte-Carlo trials.
  explicit Rng(std::uint64_t seed, std::initializer_list<std::uint32_t> stream = {}) {
    std::vector<std::uint32_t> words = {static_cast<std::uint32_t>(seed),
                                        static_cast<std::uint32_t>(seed >> 32)};
    words.insert(words.end(), stream.begin(), stream.end());
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // +1 or -1 with equal probability.
  int sign() { return (engine_() >> 63) ? 1 : -1; }

  // Box-Muller; the second variate is discarded to keep the stream simple.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform index in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace socratic

#endif  // SOCRATIC_RNG_H_
