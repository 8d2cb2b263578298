#include "ricf/simulate.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace ricf {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double out = *spare_;
    spare_.reset();
    return out;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  return u * factor;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw InvalidConfigError("empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

void BapGenConfig::validate() const {
  if (p < 0) throw InvalidConfigError("p must be non-negative");
  if (!(d >= 0.0) || !(b >= 0.0)) throw InvalidConfigError("edge probabilities must be non-negative");
  if (d + b > 1.0) throw InvalidConfigError("d + b must not exceed 1");
}

GraphPtr random_bap(int p, double d, double b, Rng& rng) {
  BapGenConfig{p, d, b, 0}.validate();
  std::vector<DirectedEdge> directed;
  std::vector<BidirectedEdge> bidirected;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const double u = rng.uniform();
      if (u < d) {
        directed.push_back({i, j});
      } else if (u < d + b) {
        bidirected.push_back({i, j});
      }
    }
  }
  // Fisher-Yates; label[v] is the new index of generation-order vertex v.
  std::vector<int> label(p);
  std::iota(label.begin(), label.end(), 0);
  for (int k = p - 1; k > 0; --k) {
    std::swap(label[k], label[static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1))]);
  }
  for (auto& e : directed) e = {label[e.from], label[e.to]};
  for (auto& e : bidirected) e = {label[e.a], label[e.b]};
  return make_graph(p, std::move(directed), std::move(bidirected));
}

GraphPtr random_bap(const BapGenConfig& config) {
  config.validate();
  Rng rng(config.seed);
  return random_bap(config.p, config.d, config.b, rng);
}

}  // namespace ricf
