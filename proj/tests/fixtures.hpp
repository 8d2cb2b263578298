#pragma once

// Graphs from the worked examples plus independent numerical oracles used by
// the unit and acceptance suites. Nothing here calls into the fitting code.

#include <cmath>
#include <functional>
#include <random>

#include "ricf/model.hpp"
#include "ricf/simulate.hpp"

namespace ricf::testing {

using Mat = MatrixX<double>;
using Vec = VectorX<double>;

// Vertex k of the figures is index k - 1 here.

/// 1→2, 1→3, 2→3, 3→4, 4→2: directed cycle 2→3→4→2.
inline GraphPtr fig2a() { return make_graph(4, std::vector<DirectedEdge>{{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 1}}, std::vector<BidirectedEdge>{}); }

/// 1→2, 1→3, 2→3, 3→4, 3↔4: the bow on {3,4}.
inline GraphPtr fig2b() {
  return make_graph(4, std::vector<DirectedEdge>{{0, 1}, {0, 2}, {1, 2}, {2, 3}}, std::vector<BidirectedEdge>{{2, 3}});
}

/// 1→2, 1→3, 2→3, 3→4, 2↔4.
inline GraphPtr fig2c() {
  return make_graph(4, std::vector<DirectedEdge>{{0, 1}, {0, 2}, {1, 2}, {2, 3}}, std::vector<BidirectedEdge>{{1, 3}});
}

/// Seemingly unrelated regressions: 1→4, 2→4, 3→5, 4↔5.
inline GraphPtr fig4_sur() {
  return make_graph(5, std::vector<DirectedEdge>{{0, 3}, {1, 3}, {2, 4}}, std::vector<BidirectedEdge>{{3, 4}});
}

/// Chain 1→2→3→4→5 with 1↔4, 1↔5, 2↔4, 3↔5.
inline GraphPtr fig5() {
  return make_graph(5, std::vector<DirectedEdge>{{0, 1}, {1, 2}, {2, 3}, {3, 4}},
                    std::vector<BidirectedEdge>{{0, 3}, {0, 4}, {1, 3}, {2, 4}});
}

/// Two-phase trial: Ex(0), BP(1), ΔBMI(2), Y(3); Ex→BP, Ex→ΔBMI, BP→ΔBMI,
/// Ex→Y, ΔBMI→Y, BP↔Y.
inline GraphPtr fig1_trial() {
  return make_graph(4, std::vector<DirectedEdge>{{0, 1}, {0, 2}, {1, 2}, {0, 3}, {2, 3}}, std::vector<BidirectedEdge>{{1, 3}},
                    std::vector<std::string>{"Ex", "BP", "dBMI", "Y"});
}

/// Chain 1→2.
inline GraphPtr chain2() { return make_graph(2, std::vector<DirectedEdge>{{0, 1}}, std::vector<BidirectedEdge>{}); }

inline GraphPtr edgeless(int p) { return make_graph(p, std::vector<DirectedEdge>{}, std::vector<BidirectedEdge>{}); }

/// Ancestral five-vertex test BAP: 1→2, 1→3, 2→4, 3→5, 2↔3, 4↔5.
inline GraphPtr ancestral5() {
  return make_graph(5, std::vector<DirectedEdge>{{0, 1}, {0, 2}, {1, 3}, {2, 4}}, std::vector<BidirectedEdge>{{1, 2}, {3, 4}});
}

/// Wishart-like random SPD matrix A Aᵗ / m + ridge.
inline Mat random_spd(int p, std::mt19937_64& gen, int m = 0) {
  std::normal_distribution<double> nd;
  if (m == 0) m = 2 * p + 3;
  Mat a(p, m);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < m; ++c) a(r, c) = nd(gen);
  return a * a.transpose() / m + 0.05 * Mat::Identity(p, p);
}

/// Σ by explicit inversion, the direct matrix-product definition.
inline Mat phi_oracle(const Mat& b, const Mat& omega) {
  const Mat inv = (Mat::Identity(b.rows(), b.rows()) - b).fullPivLu().inverse();
  return inv * omega * inv.transpose();
}

/// ℓ by explicit determinant and inverse.
inline double loglik_oracle(const Mat& b, const Mat& omega, const Mat& s, double n) {
  const Mat imb = Mat::Identity(b.rows(), b.rows()) - b;
  return -n / 2 * std::log(omega.determinant()) - n / 2 * (imb.transpose() * omega.inverse() * imb * s).trace();
}

/// Central differences of f at x, step h = 1e-5·max(1, |x_k|).
inline Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
  Vec g(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    const double h = 1e-5 * std::max(1.0, std::abs(x(k)));
    Vec xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    g(k) = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

inline Mat central_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x) {
  const Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (Index k = 0; k < x.size(); ++k) {
    const double h = 1e-5 * std::max(1.0, std::abs(x(k)));
    Vec xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    j.col(k) = (f(xp) - f(xm)) / (2 * h);
  }
  return j;
}

/// Ordinary least squares of response on predictors via the normal
/// equations in S (explicit inverse): returns (coefficients, residual var).
inline std::pair<Vec, double> ols_from_cov(const Mat& s, int response, const std::vector<int>& predictors) {
  const Index k = static_cast<Index>(predictors.size());
  if (k == 0) return {Vec(0), s(response, response)};
  Mat spp(k, k);
  Vec spr(k);
  for (Index a = 0; a < k; ++a) {
    spr(a) = s(predictors[a], response);
    for (Index c = 0; c < k; ++c) spp(a, c) = s(predictors[a], predictors[c]);
  }
  const Vec coef = spp.inverse() * spr;
  return {coef, s(response, response) - spr.dot(coef)};
}

/// Random BAP parameters with a diagonal floor on Ω, keeping finite-difference
/// truncation error small; the χ²₁ diagonal draws can be arbitrarily close to 0.
struct RandomModel {
  GraphPtr g;
  PathCoefficients<double> b;
  ErrorCovariance<double> o;
};

inline RandomModel random_model(Rng& rng, int p, double d, double b, double floor = 0.5) {
  auto g = random_bap(p, d, b, rng);
  auto params = random_parameters<double>(g, rng);
  Mat om = params.omega.values();
  om.diagonal().array() += floor;
  return {g, params.b, ErrorCovariance<double>(g, om)};
}

/// Fig. 5 parameters moved onto the locus where identifiability fails,
///   β21·ω14·ω24 − ω22·ω44 + ω24² = 0,  β32·β43·ω22 + ω24 = 0,
/// and a sample of size n from the implied Σ. With seed 44 and n = 12 the
/// RICF parameter sequence diverges while Σ̂ converges.
inline EmpiricalCovariance<double> fig5_singular_sample(std::uint64_t seed = 44, int n = 12) {
  const auto g = fig5();
  Rng rng(seed);
  const auto params = random_parameters<double>(g, rng);
  Mat b = params.b.values();
  const Mat& om = params.omega.values();
  b(1, 0) = (om(1, 1) * om(3, 3) - om(1, 3) * om(1, 3)) / (om(0, 3) * om(1, 3));
  b(3, 2) = -om(1, 3) / (b(2, 1) * om(1, 1));
  const CovarianceMatrix<double> sigma(phi_oracle(b, om));
  return empirical_covariance(sample_mvn(sigma, n, rng));
}

/// ‖a − b‖∞ ≤ rtol · max(‖b‖∞, floor).
inline bool close_normwise(const Mat& a, const Mat& b, double rtol, double floor = 0.0) {
  return (a - b).cwiseAbs().maxCoeff() <= rtol * std::max(b.cwiseAbs().maxCoeff(), floor);
}

}  // namespace ricf::testing
