#ifndef KF_RANDOM_HPP
#define KF_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace kf {

// mt19937_64 with a portable [0, 1) mapping, so sample sets are identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Additive-recurrence low-discrepancy sequence in [0, 1)^d with a seeded
// Cranley–Patterson shift. The generator is the d-dimensional analogue of
// the golden ratio (the unique positive root of x^{d+1} = x + 1).
class KroneckerSequence {
 public:
  KroneckerSequence(int dim, std::uint64_t seed) : alpha_(dim), shift_(dim) {
    double phi = 2.0;
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
    Rng rng(seed);
    for (int k = 0; k < dim; ++k) {
      alpha_[k] = std::fmod(std::pow(1.0 / phi, k + 1), 1.0);
      shift_[k] = rng.uniform();
    }
  }

  std::vector<double> point(std::uint64_t index) const {
    std::vector<double> p(alpha_.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double v = shift_[k] + static_cast<double>(index + 1) * alpha_[k];
      p[k] = v - std::floor(v);
    }
    return p;
  }

 private:
  std::vector<double> alpha_;
  std::vector<double> shift_;
};

}  // namespace kf

#endif  // KF_RANDOM_HPP
