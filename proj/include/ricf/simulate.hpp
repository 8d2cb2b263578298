#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "ricf/model.hpp"

namespace ricf {

/// Seedable generator with independent streams. The engine is
/// std::mt19937_64 seeded through std::seed_seq{seed, stream}; uniform and
/// normal variates are derived here rather than through std:: distributions
/// so that draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct BapGenConfig {
  int p = 0;
  double d = 0.0;  // probability of i -> j per pair
  double b = 0.0;  // probability of i <-> j per pair
  std::uint64_t seed = 0;

  void validate() const;
};

/// Random bow-free acyclic path diagram: every pair i < j independently gets
/// i -> j (prob. d), i <-> j (prob. b) or nothing; then the vertex labels are
/// permuted uniformly at random. Vertex names are V1..Vp after relabelling.
GraphPtr random_bap(const BapGenConfig& config);
GraphPtr random_bap(int p, double d, double b, Rng& rng);

template <typename Scalar>
struct ModelParameters {
  PathCoefficients<Scalar> b;
  ErrorCovariance<Scalar> omega;
};

/// Free entries of B and off-diagonal entries of Ω are N(0,1); each ω_ii is
/// a χ²₁ draw (a squared normal) plus the absolute row sum of the
/// off-diagonal entries, so Ω is strictly diagonally dominant.
template <typename Scalar = double>
ModelParameters<Scalar> random_parameters(const GraphPtr& g, Rng& rng) {
  detail::require_graph(g);
  const Index p = g->num_vertices();
  MatrixX<Scalar> b = MatrixX<Scalar>::Zero(p, p);
  MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(p, p);
  for (const auto& e : g->directed_edges()) b(e.to, e.from) = Scalar(rng.normal());
  for (const auto& e : g->bidirected_edges()) {
    omega(e.a, e.b) = omega(e.b, e.a) = Scalar(rng.normal());
  }
  for (Index i = 0; i < p; ++i) {
    const double chi = rng.normal();
    omega(i, i) = Scalar(chi * chi) + omega.row(i).cwiseAbs().sum();
  }
  return {PathCoefficients<Scalar>(g, std::move(b)), ErrorCovariance<Scalar>(g, std::move(omega))};
}

template <typename Scalar = double>
ModelParameters<Scalar> random_parameters(const GraphPtr& g, std::uint64_t seed) {
  Rng rng(seed);
  return random_parameters<Scalar>(g, rng);
}

/// Y = L·G with Σ = LLᵗ and G a p x n matrix of standard normals (filled
/// column by column).
template <typename Scalar>
DataMatrix<Scalar> sample_mvn(const CovarianceMatrix<Scalar>& sigma, Index n, Rng& rng) {
  if (n < 1) throw InvalidConfigError("sample size must be positive");
  const Index p = sigma.dim();
  const auto llt = detail::checked_llt<Scalar>(sigma.values(), "covariance matrix");
  MatrixX<Scalar> z(p, n);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < p; ++r) z(r, c) = Scalar(rng.normal());
  }
  return DataMatrix<Scalar>(llt.matrixL() * z);
}

template <typename Scalar>
DataMatrix<Scalar> sample_mvn(const CovarianceMatrix<Scalar>& sigma, Index n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_mvn(sigma, n, rng);
}

}  // namespace ricf
