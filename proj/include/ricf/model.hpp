#pragma once

// Parameter spaces of the normal linear model of a path diagram, the
// parameterization map Σ = (I−B)⁻¹Ω(I−B)⁻ᵗ and the likelihood calculus
// (log-likelihood, score, Hessian, expected Fisher information).
//
// Conventions:
//  * B(i, j) is the coefficient of the edge j -> i; Ω(i, j) the error
//    covariance on i <-> j.
//  * The log-likelihood omits the additive constant −(N p / 2) log(2π).
//  * Free parameters are ordered by ParameterVectorization: β first, then ω.
//    The 0/1 matrices P, Q with vec(B) = Pβ and vec(Ω) = Qω are never
//    formed; their action is applied through the index lists.

#include <cmath>
#include <utility>
#include <vector>

#include "ricf/graph.hpp"
#include "ricf/types.hpp"

namespace ricf {

namespace detail {

inline void require_graph(const GraphPtr& g) {
  if (!g) throw InvalidConfigError("null graph");
}

/// Permutation to topological order: row k of the permuted system is vertex order[k].
template <typename Scalar>
MatrixX<Scalar> permuted_i_minus_b(const MatrixX<Scalar>& b, const std::vector<VertexId>& order) {
  const Index p = b.rows();
  MatrixX<Scalar> l(p, p);
  for (Index r = 0; r < p; ++r) {
    for (Index c = 0; c < p; ++c) {
      l(r, c) = (r == c ? Scalar(1) : Scalar(0)) - b(order[r], order[c]);
    }
  }
  return l;
}

/// (I−B)⁻¹ · rhs by a unit-lower triangular solve in topological order.
template <typename Scalar, typename Derived>
MatrixX<Scalar> solve_i_minus_b(const MatrixX<Scalar>& b, const std::vector<VertexId>& order,
                                const Eigen::MatrixBase<Derived>& rhs) {
  const Index p = b.rows();
  const MatrixX<Scalar> l = permuted_i_minus_b(b, order);
  MatrixX<Scalar> permuted(p, rhs.cols());
  for (Index r = 0; r < p; ++r) permuted.row(r) = rhs.row(order[r]);
  l.template triangularView<Eigen::UnitLower>().solveInPlace(permuted);
  MatrixX<Scalar> out(p, rhs.cols());
  for (Index r = 0; r < p; ++r) out.row(order[r]) = permuted.row(r);
  return out;
}

template <typename Scalar>
MatrixX<Scalar> phi(const MatrixX<Scalar>& b, const MatrixX<Scalar>& omega,
                    const std::vector<VertexId>& order) {
  const MatrixX<Scalar> x = solve_i_minus_b(b, order, omega);               // (I−B)⁻¹Ω
  MatrixX<Scalar> sigma = solve_i_minus_b(b, order, x.transpose());         // (I−B)⁻¹Ω(I−B)⁻ᵗ
  return (sigma + sigma.transpose()) / Scalar(2);
}

template <typename Scalar>
Scalar log_likelihood(const MatrixX<Scalar>& b, const Eigen::LLT<MatrixX<Scalar>>& omega_llt,
                      const MatrixX<Scalar>& s, Index n) {
  const Index p = b.rows();
  const MatrixX<Scalar> i_minus_b = MatrixX<Scalar>::Identity(p, p) - b;
  const MatrixX<Scalar> a = i_minus_b * s * i_minus_b.transpose();
  const Scalar log_det = Scalar(2) * omega_llt.matrixLLT().diagonal().array().log().sum();
  const Scalar trace = omega_llt.solve(a).trace();
  return -Scalar(n) / Scalar(2) * (log_det + trace);
}

}  // namespace detail

/// B with support on the directed edges of its graph.
template <typename Scalar>
class PathCoefficients {
 public:
  PathCoefficients(GraphPtr graph, MatrixX<Scalar> values)
      : graph_(std::move(graph)), values_(std::move(values)) {
    detail::require_graph(graph_);
    detail::require_size(values_, graph_->num_vertices(), "path coefficient matrix");
    const Index p = values_.rows();
    for (Index i = 0; i < p; ++i) {
      for (Index j = 0; j < p; ++j) {
        if (values_(i, j) != Scalar(0) && !graph_->has_directed(static_cast<VertexId>(j),
                                                                static_cast<VertexId>(i))) {
          throw ModelMismatchError("B(" + std::to_string(i) + "," + std::to_string(j) +
                                   ") is nonzero but the edge is not in the graph");
        }
      }
    }
    if (is_acyclic(*graph_)) {
      const auto l = detail::permuted_i_minus_b(values_, topological_order(*graph_));
      // Unit lower triangular in topological order, so det(I−B) = 1.
      if (l.diagonal().prod() != Scalar(1) ||
          l.template triangularView<Eigen::StrictlyUpper>().toDenseMatrix().any()) {
        throw ModelMismatchError("I - B is not unit triangular in topological order");
      }
    }
  }

  static PathCoefficients zero(GraphPtr graph) {
    detail::require_graph(graph);
    const Index p = graph->num_vertices();
    return PathCoefficients(std::move(graph), MatrixX<Scalar>::Zero(p, p));
  }

  const MixedGraph& graph() const noexcept { return *graph_; }
  const GraphPtr& graph_ptr() const noexcept { return graph_; }
  const MatrixX<Scalar>& values() const noexcept { return values_; }
  Index dim() const noexcept { return values_.rows(); }
  Scalar operator()(Index i, Index j) const { return values_(i, j); }

 private:
  GraphPtr graph_;
  MatrixX<Scalar> values_;
};

/// Ω: symmetric positive definite, off-diagonal support on bi-directed edges.
template <typename Scalar>
class ErrorCovariance {
 public:
  ErrorCovariance(GraphPtr graph, MatrixX<Scalar> values)
      : graph_(std::move(graph)), values_(std::move(values)) {
    detail::require_graph(graph_);
    detail::require_size(values_, graph_->num_vertices(), "error covariance");
    const Index p = values_.rows();
    const Scalar scale = std::max(Scalar(1), values_.cwiseAbs().maxCoeff());
    for (Index i = 0; i < p; ++i) {
      for (Index j = i + 1; j < p; ++j) {
        using std::abs;
        if (abs(values_(i, j) - values_(j, i)) > Scalar(1e-12) * scale) {
          throw ShapeError("error covariance is not symmetric");
        }
        if ((values_(i, j) != Scalar(0) || values_(j, i) != Scalar(0)) &&
            !graph_->has_bidirected(static_cast<VertexId>(i), static_cast<VertexId>(j))) {
          throw ModelMismatchError("Omega(" + std::to_string(i) + "," + std::to_string(j) +
                                   ") is nonzero but the edge is not in the graph");
        }
      }
    }
    values_ = (values_ + values_.transpose()).eval() / Scalar(2);
    detail::checked_llt<Scalar>(values_, "error covariance");
  }

  const MixedGraph& graph() const noexcept { return *graph_; }
  const GraphPtr& graph_ptr() const noexcept { return graph_; }
  const MatrixX<Scalar>& values() const noexcept { return values_; }
  Index dim() const noexcept { return values_.rows(); }
  Scalar operator()(Index i, Index j) const { return values_(i, j); }

 private:
  GraphPtr graph_;
  MatrixX<Scalar> values_;
};

/// Ordering of the free parameters: β_ij (j ∈ pa(i)) sorted by (i, j), then
/// ω_ij (i ≤ j, i = j or j ∈ spo(i)) sorted by (i, j).
class ParameterVectorization {
 public:
  struct Entry {
    VertexId row;
    VertexId col;
  };

  explicit ParameterVectorization(const MixedGraph& g) {
    const int p = g.num_vertices();
    for (VertexId i = 0; i < p; ++i) {
      for (VertexId j : g.parents_of(i)) beta_.push_back({i, j});
    }
    for (VertexId i = 0; i < p; ++i) {
      omega_.push_back({i, i});
      for (VertexId j : g.spouses_of(i)) {
        if (j > i) omega_.push_back({i, j});
      }
    }
  }

  const std::vector<Entry>& beta_index() const noexcept { return beta_; }
  const std::vector<Entry>& omega_index() const noexcept { return omega_; }
  Index num_beta() const noexcept { return static_cast<Index>(beta_.size()); }
  Index num_omega() const noexcept { return static_cast<Index>(omega_.size()); }
  Index size() const noexcept { return num_beta() + num_omega(); }

  /// θ = (β, ω) read off B and Ω.
  template <typename Scalar>
  VectorX<Scalar> gather(const MatrixX<Scalar>& b, const MatrixX<Scalar>& omega) const {
    VectorX<Scalar> theta(size());
    Index k = 0;
    for (const auto& e : beta_) theta(k++) = b(e.row, e.col);
    for (const auto& e : omega_) theta(k++) = omega(e.row, e.col);
    return theta;
  }

  /// Inverse of gather: B = Pβ, Ω = Qω (reshaped).
  template <typename Scalar>
  std::pair<MatrixX<Scalar>, MatrixX<Scalar>> scatter(const VectorX<Scalar>& theta,
                                                      Index p) const {
    if (theta.size() != size()) throw ShapeError("parameter vector has wrong length");
    MatrixX<Scalar> b = MatrixX<Scalar>::Zero(p, p);
    MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(p, p);
    Index k = 0;
    for (const auto& e : beta_) b(e.row, e.col) = theta(k++);
    for (const auto& e : omega_) {
      omega(e.row, e.col) = theta(k);
      omega(e.col, e.row) = theta(k);
      ++k;
    }
    return {std::move(b), std::move(omega)};
  }

 private:
  std::vector<Entry> beta_;
  std::vector<Entry> omega_;
};

/// Expected Fisher information per observation, blocks in vectorization order.
template <typename Scalar>
class FisherInfo {
 public:
  FisherInfo(MatrixX<Scalar> matrix, Index num_beta)
      : matrix_(std::move(matrix)), num_beta_(num_beta) {}

  const MatrixX<Scalar>& matrix() const noexcept { return matrix_; }
  Index num_beta() const noexcept { return num_beta_; }
  Index num_omega() const noexcept { return matrix_.rows() - num_beta_; }

  auto beta_beta() const { return matrix_.topLeftCorner(num_beta_, num_beta_); }
  auto beta_omega() const { return matrix_.topRightCorner(num_beta_, num_omega()); }
  auto omega_beta() const { return matrix_.bottomLeftCorner(num_omega(), num_beta_); }
  auto omega_omega() const { return matrix_.bottomRightCorner(num_omega(), num_omega()); }

 private:
  MatrixX<Scalar> matrix_;
  Index num_beta_;
};

namespace detail {

template <typename Scalar>
void require_same_model(const PathCoefficients<Scalar>& b, const ErrorCovariance<Scalar>& o) {
  if (b.graph_ptr() != o.graph_ptr() && !(b.graph() == o.graph())) {
    throw ModelMismatchError("B and Omega are defined on different graphs");
  }
}

inline std::vector<VertexId> acyclic_order(const MixedGraph& g) {
  if (!is_acyclic(g)) throw ModelClassError("path diagram has a directed cycle");
  return topological_order(g);
}

// Positions of a free ω entry inside Ω: {(r,c)} on the diagonal, {(r,c),(c,r)} otherwise.
inline int omega_positions(const ParameterVectorization::Entry& e, VertexId (&rows)[2],
                           VertexId (&cols)[2]) {
  rows[0] = e.row;
  cols[0] = e.col;
  if (e.row == e.col) return 1;
  rows[1] = e.col;
  cols[1] = e.row;
  return 2;
}

// Σ over position pairs of (X ⊗ Y) entries, i.e. Qᵗ(X ⊗ Y)Q for one (ω, ω') pair.
// vec index of (r, c) is c·p + r, so (X ⊗ Y)[(a,b),(c,d)] = X(b,d)·Y(a,c).
template <typename Scalar>
Scalar kron_qq(const MatrixX<Scalar>& x, const MatrixX<Scalar>& y,
               const ParameterVectorization::Entry& e1, const ParameterVectorization::Entry& e2) {
  VertexId r1[2], c1[2], r2[2], c2[2];
  const int n1 = omega_positions(e1, r1, c1);
  const int n2 = omega_positions(e2, r2, c2);
  Scalar sum(0);
  for (int u = 0; u < n1; ++u) {
    for (int v = 0; v < n2; ++v) sum += x(c1[u], c2[v]) * y(r1[u], r2[v]);
  }
  return sum;
}

// Pᵗ(X ⊗ Y)Q entry for β_ij and one ω.
template <typename Scalar>
Scalar kron_pq(const MatrixX<Scalar>& x, const MatrixX<Scalar>& y,
               const ParameterVectorization::Entry& beta, const ParameterVectorization::Entry& w) {
  VertexId r[2], c[2];
  const int n = omega_positions(w, r, c);
  Scalar sum(0);
  for (int v = 0; v < n; ++v) sum += x(beta.col, c[v]) * y(beta.row, r[v]);
  return sum;
}

}  // namespace detail

/// Σ = Φ_G(B, Ω) = (I−B)⁻¹Ω(I−B)⁻ᵗ.
template <typename Scalar>
CovarianceMatrix<Scalar> phi(const PathCoefficients<Scalar>& b, const ErrorCovariance<Scalar>& o) {
  detail::require_same_model(b, o);
  const auto order = detail::acyclic_order(b.graph());
  return CovarianceMatrix<Scalar>(detail::phi(b.values(), o.values(), order));
}

/// ℓ(B, Ω) = −(N/2)·log det Ω − (N/2)·tr[(I−B)ᵗΩ⁻¹(I−B)S].
template <typename Scalar, typename Derived>
Scalar log_likelihood(const PathCoefficients<Scalar>& b, const ErrorCovariance<Scalar>& o,
                      const Eigen::MatrixBase<Derived>& s, Index n) {
  detail::require_same_model(b, o);
  detail::require_size(s, b.dim(), "empirical covariance");
  const auto llt = detail::checked_llt<Scalar>(o.values(), "error covariance");
  return detail::log_likelihood<Scalar>(b.values(), llt, s.derived().template cast<Scalar>(), n);
}

/// Gradient of log_likelihood with respect to θ = (β, ω):
///   β-block  N · Pᵗ vec(Ω⁻¹(I−B)S)
///   ω-block −(N/2) · Qᵗ vec(Ω⁻¹ − Ω⁻¹(I−B)S(I−B)ᵗΩ⁻¹)
/// Both blocks vanish exactly at solutions of the likelihood equations.
template <typename Scalar, typename Derived>
VectorX<Scalar> score(const PathCoefficients<Scalar>& b, const ErrorCovariance<Scalar>& o,
                      const Eigen::MatrixBase<Derived>& s, Index n,
                      const ParameterVectorization& v) {
  detail::require_same_model(b, o);
  detail::require_size(s, b.dim(), "empirical covariance");
  const Index p = b.dim();
  const auto llt = detail::checked_llt<Scalar>(o.values(), "error covariance");
  const MatrixX<Scalar> sm = s.derived().template cast<Scalar>();
  const MatrixX<Scalar> i_minus_b = MatrixX<Scalar>::Identity(p, p) - b.values();
  const MatrixX<Scalar> omega_inv = llt.solve(MatrixX<Scalar>::Identity(p, p));
  const MatrixX<Scalar> g_beta = llt.solve(i_minus_b * sm);
  const MatrixX<Scalar> k = llt.solve(i_minus_b * sm * i_minus_b.transpose());
  const MatrixX<Scalar> g_omega = omega_inv - llt.solve(k.transpose());

  VectorX<Scalar> out(v.size());
  Index idx = 0;
  for (const auto& e : v.beta_index()) out(idx++) = Scalar(n) * g_beta(e.row, e.col);
  for (const auto& e : v.omega_index()) {
    const Scalar mult = e.row == e.col ? Scalar(1) : Scalar(2);
    out(idx++) = -Scalar(n) / Scalar(2) * mult * g_omega(e.row, e.col);
  }
  return out;
}

/// Observed second derivatives of log_likelihood in vectorization order:
///   ββ  −N · Pᵗ(S ⊗ Ω⁻¹)P
///   βω  −N · Pᵗ[S(I−B)ᵗΩ⁻¹ ⊗ Ω⁻¹]Q
///   ωω  −(N/2) · Qᵗ{Ω⁻¹ ⊗ M + M ⊗ Ω⁻¹ − Ω⁻¹ ⊗ Ω⁻¹}Q,  M = Ω⁻¹(I−B)S(I−B)ᵗΩ⁻¹
template <typename Scalar, typename Derived>
MatrixX<Scalar> hessian(const PathCoefficients<Scalar>& b, const ErrorCovariance<Scalar>& o,
                        const Eigen::MatrixBase<Derived>& s, Index n,
                        const ParameterVectorization& v) {
  detail::require_same_model(b, o);
  detail::require_size(s, b.dim(), "empirical covariance");
  const Index p = b.dim();
  const auto llt = detail::checked_llt<Scalar>(o.values(), "error covariance");
  const MatrixX<Scalar> sm = s.derived().template cast<Scalar>();
  const MatrixX<Scalar> i_minus_b = MatrixX<Scalar>::Identity(p, p) - b.values();
  const MatrixX<Scalar> omega_inv = llt.solve(MatrixX<Scalar>::Identity(p, p));
  const MatrixX<Scalar> cross = sm * i_minus_b.transpose() * omega_inv;
  const MatrixX<Scalar> m = omega_inv * i_minus_b * sm * i_minus_b.transpose() * omega_inv;

  const Index nb = v.num_beta();
  const auto& bi = v.beta_index();
  const auto& oi = v.omega_index();
  const Scalar nn = Scalar(n);
  MatrixX<Scalar> h(v.size(), v.size());
  for (Index r = 0; r < nb; ++r) {
    for (Index c = r; c < nb; ++c) {
      h(r, c) = -nn * sm(bi[r].col, bi[c].col) * omega_inv(bi[r].row, bi[c].row);
      h(c, r) = h(r, c);
    }
    for (Index c = 0; c < v.num_omega(); ++c) {
      h(r, nb + c) = -nn * detail::kron_pq(cross, omega_inv, bi[r], oi[c]);
      h(nb + c, r) = h(r, nb + c);
    }
  }
  for (Index r = 0; r < v.num_omega(); ++r) {
    for (Index c = r; c < v.num_omega(); ++c) {
      const Scalar val = detail::kron_qq(omega_inv, m, oi[r], oi[c]) +
                         detail::kron_qq(m, omega_inv, oi[r], oi[c]) -
                         detail::kron_qq(omega_inv, omega_inv, oi[r], oi[c]);
      h(nb + r, nb + c) = -nn / Scalar(2) * val;
      h(nb + c, nb + r) = h(nb + r, nb + c);
    }
  }
  return h;
}

/// Expected information per observation:
///   [ Pᵗ(Σ ⊗ Ω⁻¹)P          Pᵗ[(I−B)⁻¹ ⊗ Ω⁻¹]Q ]
///   [ Qᵗ[(I−B)⁻ᵗ ⊗ Ω⁻¹]P    ½ Qᵗ(Ω⁻¹ ⊗ Ω⁻¹)Q    ]
template <typename Scalar>
FisherInfo<Scalar> fisher_information(const PathCoefficients<Scalar>& b,
                                      const ErrorCovariance<Scalar>& o,
                                      const ParameterVectorization& v) {
  detail::require_same_model(b, o);
  const Index p = b.dim();
  const auto order = detail::acyclic_order(b.graph());
  const auto llt = detail::checked_llt<Scalar>(o.values(), "error covariance");
  const MatrixX<Scalar> omega_inv = llt.solve(MatrixX<Scalar>::Identity(p, p));
  const MatrixX<Scalar> sigma = detail::phi(b.values(), o.values(), order);
  const MatrixX<Scalar> inv_i_minus_b =
      detail::solve_i_minus_b(b.values(), order, MatrixX<Scalar>::Identity(p, p));

  const Index nb = v.num_beta();
  const auto& bi = v.beta_index();
  const auto& oi = v.omega_index();
  MatrixX<Scalar> info(v.size(), v.size());
  for (Index r = 0; r < nb; ++r) {
    for (Index c = r; c < nb; ++c) {
      info(r, c) = sigma(bi[r].col, bi[c].col) * omega_inv(bi[r].row, bi[c].row);
      info(c, r) = info(r, c);
    }
    for (Index c = 0; c < v.num_omega(); ++c) {
      info(r, nb + c) = detail::kron_pq(inv_i_minus_b, omega_inv, bi[r], oi[c]);
      info(nb + c, r) = info(r, nb + c);
    }
  }
  for (Index r = 0; r < v.num_omega(); ++r) {
    for (Index c = r; c < v.num_omega(); ++c) {
      info(nb + r, nb + c) = detail::kron_qq(omega_inv, omega_inv, oi[r], oi[c]) / Scalar(2);
      info(nb + c, nb + r) = info(nb + r, nb + c);
    }
  }
  return FisherInfo<Scalar>(std::move(info), nb);
}

template <typename Scalar>
struct ConditionalRegression {
  VectorX<Scalar> coefficients;
  Scalar residual_variance;
};

/// Population regression of `response` on `covariates` implied by Σ:
/// coefficients Σ_{r,C}Σ_{C,C}⁻¹, residual variance σ_rr − Σ_{r,C}Σ_{C,C}⁻¹Σ_{C,r}.
template <typename Derived>
ConditionalRegression<typename Derived::Scalar> implied_conditional_regression(
    const Eigen::MatrixBase<Derived>& sigma, VertexId response,
    const std::vector<VertexId>& covariates) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(sigma, "covariance matrix");
  const Index p = sigma.rows();
  auto check = [&](VertexId v) {
    if (v < 0 || v >= p) throw InvalidVertexError("vertex " + std::to_string(v) + " out of range");
  };
  check(response);
  for (VertexId c : covariates) {
    check(c);
    if (c == response) throw PreconditionError("response listed among covariates");
  }
  const Index k = static_cast<Index>(covariates.size());
  if (k == 0) return {VectorX<Scalar>(0), sigma(response, response)};
  MatrixX<Scalar> scc(k, k);
  VectorX<Scalar> scr(k);
  for (Index a = 0; a < k; ++a) {
    scr(a) = sigma(covariates[a], response);
    for (Index c = 0; c < k; ++c) scc(a, c) = sigma(covariates[a], covariates[c]);
  }
  const auto llt = detail::checked_llt<Scalar>(scc, "covariate covariance block");
  VectorX<Scalar> coef = llt.solve(scr);
  return {coef, sigma(response, response) - scr.dot(coef)};
}

/// The polynomial (σ₁₁σ₂₂−σ₁₂²)(σ₁₄σ₃₃−σ₁₃σ₃₄) − (σ₁₃σ₂₄−σ₁₄σ₂₃)(σ₁₂σ₁₃−σ₁₁σ₂₃),
/// which vanishes on every covariance matrix of the four-vertex diagram
/// 1→2, 1→3, 2→3, 3→4, 2↔4 (vertices 0..3 here).
template <typename Derived>
typename Derived::Scalar example3_constraint_residual(const Eigen::MatrixBase<Derived>& s) {
  detail::require_size(s, 4, "covariance matrix");
  auto g = [&](int i, int j) { return s(i - 1, j - 1); };
  return (g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2)) * (g(1, 4) * g(3, 3) - g(1, 3) * g(3, 4)) -
         (g(1, 3) * g(2, 4) - g(1, 4) * g(2, 3)) * (g(1, 2) * g(1, 3) - g(1, 1) * g(2, 3));
}

}  // namespace ricf
