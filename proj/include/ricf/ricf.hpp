#pragma once

// Residual iterative conditional fitting.
//
// Each vertex update fixes Ω_{-i,-i} and B_{-i,·}, forms residuals
// ε = (I−B)Y and pseudo-variables Z = Ω_{-i,-i}⁻¹ε_{-i}, and regresses Y_i on
// its parents' observations and its spouses' pseudo-variables. The regression
// coefficients are β_{i,pa(i)} and ω_{i,spo(i)}; the residual variance is the
// conditional variance ω_{ii.-i}, from which ω_ii is recovered. Every update is
// an exact partial maximization of the likelihood, so the likelihood never
// decreases and Ω stays positive definite.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "ricf/model.hpp"

namespace ricf {

enum class StartingValuePolicy { dag_start, supplied };

struct FitConfig {
  /// Convergence threshold on the max absolute change of any free parameter over a full cycle.
  double tol = 1e-8;
  int max_cycles = 5000;
  /// Parameters larger than this while Σ̂ has stopped moving signal divergence.
  double divergence_threshold = 1e8;
  /// Solve for pseudo-variables on the district of i only.
  bool use_district_restriction = true;
  StartingValuePolicy starting_value_policy = StartingValuePolicy::dag_start;

  void validate() const {
    if (!(tol > 0)) throw InvalidConfigError("tol must be positive");
    if (max_cycles < 1) throw InvalidConfigError("max_cycles must be at least 1");
    if (!(divergence_threshold > 0)) throw InvalidConfigError("divergence_threshold must be positive");
  }
};

enum class FitStatus { converged, max_cycles_reached, parameter_divergence_sigma_converged };

inline std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_cycles_reached: return "max_cycles_reached";
    case FitStatus::parameter_divergence_sigma_converged: return "parameter_divergence_sigma_converged";
  }
  return "unknown";
}

template <typename Scalar>
struct StartingValues {
  PathCoefficients<Scalar> b;
  ErrorCovariance<Scalar> omega;
};

template <typename Scalar>
struct FitResult {
  PathCoefficients<Scalar> b_hat;
  ErrorCovariance<Scalar> omega_hat;
  CovarianceMatrix<Scalar> sigma_hat;
  std::vector<Scalar> loglik_trace;  // one entry per full cycle
  FitStatus status;
  int cycles_used;
  std::vector<VertexId> closed_form_vertices;

  Scalar log_likelihood() const { return loglik_trace.back(); }
};

/// ε = (I−B)Y.
template <typename Scalar>
struct ResidualMatrix {
  MatrixX<Scalar> values;
};

/// Rows of Ω_{D,D}⁻¹ε_D for the vertex set `vertices` (D = V∖{i}, or dis(i)).
template <typename Scalar>
struct PseudoVariables {
  std::vector<VertexId> vertices;
  MatrixX<Scalar> values;

  /// Row of vertex v, which must be in `vertices`.
  auto row(VertexId v) const {
    const auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
    if (it == vertices.end() || *it != v) throw InvalidVertexError("no pseudo-variable for vertex");
    return values.row(it - vertices.begin());
  }
};

/// Result of one vertex update; `beta` is aligned with `parents`, `omega`
/// with `spouses`.
template <typename Scalar>
struct VertexUpdate {
  VertexId vertex;
  std::vector<VertexId> parents;
  std::vector<VertexId> spouses;
  VectorX<Scalar> beta;
  VectorX<Scalar> omega;
  Scalar conditional_variance;
  Scalar omega_ii;
};

namespace detail {

inline std::vector<VertexId> all_but(int p, VertexId i) {
  std::vector<VertexId> out;
  out.reserve(p > 0 ? p - 1 : 0);
  for (VertexId v = 0; v < p; ++v) {
    if (v != i) out.push_back(v);
  }
  return out;
}

inline std::vector<VertexId> pseudo_set(const MixedGraph& g, VertexId i, bool restrict) {
  return restrict ? district(g, i) : all_but(g.num_vertices(), i);
}

template <typename Scalar>
MatrixX<Scalar> principal(const MatrixX<Scalar>& m, const std::vector<VertexId>& idx) {
  const Index k = static_cast<Index>(idx.size());
  MatrixX<Scalar> out(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) out(a, b) = m(idx[a], idx[b]);
  }
  return out;
}

// Positions of `subset` inside the sorted vector `set`.
inline std::vector<Index> positions(const std::vector<VertexId>& set,
                                    const std::vector<VertexId>& subset) {
  std::vector<Index> out;
  out.reserve(subset.size());
  for (VertexId v : subset) {
    out.push_back(std::lower_bound(set.begin(), set.end(), v) - set.begin());
  }
  return out;
}

// Relative residual-variance threshold below which a regressor column counts
// as linearly dependent on the preceding ones.
template <typename Scalar>
constexpr Scalar rank_tolerance() {
  return Scalar(1e-10);
}

// Greedy Cholesky sweep over a Gram matrix; returns dependent columns.
template <typename Scalar>
std::vector<int> dependent_columns(const MatrixX<Scalar>& gram) {
  const Index k = gram.rows();
  std::vector<int> dependent;
  std::vector<Index> basis;
  MatrixX<Scalar> l = MatrixX<Scalar>::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    Scalar d = gram(j, j);
    VectorX<Scalar> row(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) {
      Scalar v = gram(j, basis[a]);
      for (std::size_t b = 0; b < a; ++b) v -= row(b) * l(a, b);
      row(a) = v / l(a, a);
      d -= row(a) * row(a);
    }
    if (!(gram(j, j) > Scalar(0)) || d <= rank_tolerance<Scalar>() * gram(j, j)) {
      dependent.push_back(static_cast<int>(j));
      continue;
    }
    const Index a = static_cast<Index>(basis.size());
    for (Index b = 0; b < a; ++b) l(a, b) = row(b);
    using std::sqrt;
    l(a, a) = sqrt(d);
    basis.push_back(j);
  }
  return dependent;
}

[[noreturn]] inline void throw_rank_deficient(VertexId i, std::vector<int> cols) {
  std::string text;
  for (int c : cols) text += (text.empty() ? "" : ",") + std::to_string(c);
  throw RankDeficiencyError("regressors of vertex " + std::to_string(i) +
                                " are rank deficient (dependent columns " + text + ")",
                            std::move(cols));
}

template <typename Scalar>
Eigen::LLT<MatrixX<Scalar>> omega_block_llt(const MatrixX<Scalar>& omega,
                                            const std::vector<VertexId>& set) {
  return checked_llt<Scalar>(principal(omega, set), "error covariance block");
}

// ω_ii = ω_{ii.-i} + Ω_{i,spo}(Ω_{D,D}⁻¹)_{spo,spo}Ω_{spo,i}.
template <typename Scalar>
Scalar recover_omega_ii(const Eigen::LLT<MatrixX<Scalar>>& llt, const std::vector<Index>& spo_pos,
                        Index set_size, const VectorX<Scalar>& w, Scalar conditional) {
  if (spo_pos.empty()) return conditional;
  VectorX<Scalar> full = VectorX<Scalar>::Zero(set_size);
  for (std::size_t a = 0; a < spo_pos.size(); ++a) full(spo_pos[a]) = w(a);
  return conditional + full.dot(llt.solve(full));
}

template <typename Scalar>
VertexUpdate<Scalar> make_update(const MixedGraph& g, VertexId i, const VectorX<Scalar>& coef,
                                 Scalar conditional, Scalar omega_ii) {
  VertexUpdate<Scalar> u{i, g.parents_of(i), g.spouses_of(i), {}, {}, conditional, omega_ii};
  const Index np = static_cast<Index>(u.parents.size());
  u.beta = coef.head(np);
  u.omega = coef.tail(coef.size() - np);
  return u;
}

/// Regressions from the cross-product matrix S (normal equations).
template <typename Scalar>
VertexUpdate<Scalar> update_from_covariance(const MixedGraph& g, const MatrixX<Scalar>& b,
                                            const MatrixX<Scalar>& omega, const MatrixX<Scalar>& s,
                                            Index n, VertexId i, bool restrict) {
  const Index p = b.rows();
  const auto& pa = g.parents_of(i);
  const auto& spo = g.spouses_of(i);
  const Index np = static_cast<Index>(pa.size()), ns = static_cast<Index>(spo.size());
  const Index k = np + ns;
  if (n < k + 1) {
    throw RankDeficiencyError("vertex " + g.name(i) + " has " + std::to_string(k) +
                                  " regressors but only " + std::to_string(n) + " observations",
                              {});
  }

  // Regressors as linear maps of Y: rows of T.
  MatrixX<Scalar> t = MatrixX<Scalar>::Zero(k, p);
  for (Index a = 0; a < np; ++a) t(a, pa[a]) = Scalar(1);
  std::optional<Eigen::LLT<MatrixX<Scalar>>> llt;
  std::vector<VertexId> set;
  std::vector<Index> spo_pos;
  if (ns > 0) {
    set = pseudo_set(g, i, restrict);
    spo_pos = positions(set, spo);
    llt = omega_block_llt(omega, set);
    MatrixX<Scalar> e(static_cast<Index>(set.size()), p);
    for (Index a = 0; a < e.rows(); ++a) {
      e.row(a) = -b.row(set[a]);
      e(a, set[a]) += Scalar(1);
    }
    const MatrixX<Scalar> w = llt->solve(e);
    for (Index a = 0; a < ns; ++a) t.row(np + a) = w.row(spo_pos[a]);
  }

  const MatrixX<Scalar> ts = t * s;
  const MatrixX<Scalar> gram = ts * t.transpose();
  const VectorX<Scalar> cross = ts.col(i);
  VectorX<Scalar> coef(k);
  Scalar conditional = s(i, i);
  if (k > 0) {
    if (auto dep = dependent_columns(gram); !dep.empty()) throw_rank_deficient(i, std::move(dep));
    coef = Eigen::LLT<MatrixX<Scalar>>(gram).solve(cross);
    conditional -= cross.dot(coef);
  }
  if (!(conditional > Scalar(0))) {
    throw NotPositiveDefiniteError("nonpositive residual variance at vertex " + g.name(i));
  }
  const Scalar omega_ii =
      ns > 0 ? recover_omega_ii(*llt, spo_pos, static_cast<Index>(set.size()),
                                VectorX<Scalar>(coef.tail(ns)), conditional)
             : conditional;
  return make_update(g, i, coef, conditional, omega_ii);
}

/// Regressions on the raw observations (QR of the N x k design).
template <typename Scalar>
VertexUpdate<Scalar> update_from_data(const MixedGraph& g, const MatrixX<Scalar>& b,
                                      const MatrixX<Scalar>& omega, const MatrixX<Scalar>& y,
                                      VertexId i, bool restrict) {
  const Index n = y.cols();
  const auto& pa = g.parents_of(i);
  const auto& spo = g.spouses_of(i);
  const Index np = static_cast<Index>(pa.size()), ns = static_cast<Index>(spo.size());
  const Index k = np + ns;
  if (n < k + 1) {
    throw RankDeficiencyError("vertex " + g.name(i) + " has " + std::to_string(k) +
                                  " regressors but only " + std::to_string(n) + " observations",
                              {});
  }

  MatrixX<Scalar> x(n, k);
  for (Index a = 0; a < np; ++a) x.col(a) = y.row(pa[a]).transpose();
  std::optional<Eigen::LLT<MatrixX<Scalar>>> llt;
  std::vector<VertexId> set;
  std::vector<Index> spo_pos;
  if (ns > 0) {
    set = pseudo_set(g, i, restrict);
    spo_pos = positions(set, spo);
    llt = omega_block_llt(omega, set);
    MatrixX<Scalar> eps(static_cast<Index>(set.size()), n);
    for (Index a = 0; a < eps.rows(); ++a) eps.row(a) = y.row(set[a]) - b.row(set[a]) * y;
    const MatrixX<Scalar> z = llt->solve(eps);
    for (Index a = 0; a < ns; ++a) x.col(np + a) = z.row(spo_pos[a]).transpose();
  }

  const VectorX<Scalar> response = y.row(i).transpose();
  VectorX<Scalar> coef(k);
  Scalar rss = response.squaredNorm();
  if (k > 0) {
    Eigen::HouseholderQR<MatrixX<Scalar>> qr(x);
    const auto r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    std::vector<int> dep;
    for (Index c = 0; c < k; ++c) {
      const Scalar norm2 = x.col(c).squaredNorm();
      const Scalar rcc = qr.matrixQR()(c, c);
      if (!(norm2 > Scalar(0)) || rcc * rcc <= rank_tolerance<Scalar>() * norm2) {
        dep.push_back(static_cast<int>(c));
      }
    }
    if (!dep.empty()) throw_rank_deficient(i, std::move(dep));
    const VectorX<Scalar> qty = qr.householderQ().transpose() * response;
    coef = r.solve(qty.head(k));
    rss = (response - x * coef).squaredNorm();
  }
  const Scalar conditional = rss / Scalar(n);
  if (!(conditional > Scalar(0))) {
    throw NotPositiveDefiniteError("nonpositive residual variance at vertex " + g.name(i));
  }
  const Scalar omega_ii =
      ns > 0 ? recover_omega_ii(*llt, spo_pos, static_cast<Index>(set.size()),
                                VectorX<Scalar>(coef.tail(ns)), conditional)
             : conditional;
  return make_update(g, i, coef, conditional, omega_ii);
}

template <typename Scalar>
void apply_update(const VertexUpdate<Scalar>& u, MatrixX<Scalar>& b, MatrixX<Scalar>& omega) {
  for (std::size_t a = 0; a < u.parents.size(); ++a) b(u.vertex, u.parents[a]) = u.beta(a);
  for (std::size_t a = 0; a < u.spouses.size(); ++a) {
    omega(u.vertex, u.spouses[a]) = u.omega(a);
    omega(u.spouses[a], u.vertex) = u.omega(a);
  }
  omega(u.vertex, u.vertex) = u.omega_ii;
}

template <typename Scalar>
void require_fit_graph(const MixedGraph& g) {
  if (!is_acyclic(g)) throw ModelClassError("path diagram has a directed cycle");
  if (!is_bow_free(g)) throw ModelClassError("path diagram has a bow (directed and bi-directed edge on one pair)");
}

template <typename Scalar>
void require_same_graph(const MixedGraph& g, const MixedGraph& other, const char* what) {
  if (!(g == other)) throw ModelMismatchError(std::string(what) + " is defined on a different graph");
}

}  // namespace detail

/// ε = (I−B)Y.
template <typename Scalar>
ResidualMatrix<Scalar> residuals(const PathCoefficients<Scalar>& b, const DataMatrix<Scalar>& y) {
  if (y.num_variables() != b.dim()) {
    throw ShapeError("data has " + std::to_string(y.num_variables()) + " variables, model has " +
                     std::to_string(b.dim()));
  }
  return {y.values() - b.values() * y.values()};
}

/// Z = Ω_{-i,-i}⁻¹ε_{-i}. With `restrict_to_district` only the rows of dis(i)
/// are formed, from Ω_{dis(i),dis(i)}⁻¹ε_{dis(i)}; those rows coincide with
/// the unrestricted solve because Ω_{dis(i), rest} = 0.
template <typename Scalar>
PseudoVariables<Scalar> pseudo_variables(const ErrorCovariance<Scalar>& o,
                                         const ResidualMatrix<Scalar>& eps, VertexId i,
                                         bool restrict_to_district = false) {
  const MixedGraph& g = o.graph();
  if (!g.contains(i)) throw InvalidVertexError("vertex " + std::to_string(i) + " not in graph");
  if (eps.values.rows() != o.dim()) throw ShapeError("residual matrix has wrong number of rows");
  PseudoVariables<Scalar> z;
  z.vertices = detail::pseudo_set(g, i, restrict_to_district);
  const Index k = static_cast<Index>(z.vertices.size());
  MatrixX<Scalar> rhs(k, eps.values.cols());
  for (Index a = 0; a < k; ++a) rhs.row(a) = eps.values.row(z.vertices[a]);
  if (k > 0) {
    z.values = detail::omega_block_llt(o.values(), z.vertices).solve(rhs);
  } else {
    z.values = rhs;
  }
  return z;
}

/// ω_{ii.-i} = ω_ii − Ω_{i,-i}Ω_{-i,-i}⁻¹Ω_{-i,i}.
template <typename Scalar>
Scalar conditional_variance(const ErrorCovariance<Scalar>& o, VertexId i) {
  const MixedGraph& g = o.graph();
  if (!g.contains(i)) throw InvalidVertexError("vertex " + std::to_string(i) + " not in graph");
  const auto rest = detail::all_but(g.num_vertices(), i);
  if (rest.empty()) return o(i, i);
  VectorX<Scalar> w(static_cast<Index>(rest.size()));
  for (Index a = 0; a < w.size(); ++a) w(a) = o(i, rest[a]);
  const auto llt = detail::omega_block_llt(o.values(), rest);
  const Scalar out = o(i, i) - w.dot(llt.solve(w));
  if (!(out > Scalar(0))) throw NotPositiveDefiniteError("error covariance is not positive definite");
  return out;
}

/// Maximum likelihood estimate in the DAG obtained by dropping every
/// bi-directed edge: per-vertex regressions on parents, Ω diagonal.
template <typename Scalar>
StartingValues<Scalar> dag_starting_values(const GraphPtr& g, const MatrixX<Scalar>& s) {
  detail::require_graph(g);
  if (!is_acyclic(*g)) throw ModelClassError("path diagram has a directed cycle");
  const Index p = g->num_vertices();
  detail::require_size(s, p, "empirical covariance");
  detail::checked_llt<Scalar>(s, "empirical covariance");
  MatrixX<Scalar> b = MatrixX<Scalar>::Zero(p, p);
  MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(p, p);
  for (VertexId i = 0; i < p; ++i) {
    const auto& pa = g->parents_of(i);
    omega(i, i) = s(i, i);
    if (pa.empty()) continue;
    VectorX<Scalar> cross(static_cast<Index>(pa.size()));
    for (Index a = 0; a < cross.size(); ++a) cross(a) = s(pa[a], i);
    const VectorX<Scalar> coef = detail::principal(s, pa).llt().solve(cross);
    for (Index a = 0; a < cross.size(); ++a) b(i, pa[a]) = coef(a);
    omega(i, i) -= cross.dot(coef);
  }
  return {PathCoefficients<Scalar>(g, std::move(b)), ErrorCovariance<Scalar>(g, std::move(omega))};
}

template <typename Scalar>
StartingValues<Scalar> dag_starting_values(const GraphPtr& g, const EmpiricalCovariance<Scalar>& s) {
  return dag_starting_values(g, s.values());
}

/// One RICF update of vertex i from raw data (least squares by QR).
template <typename Scalar>
VertexUpdate<Scalar> update_vertex(const PathCoefficients<Scalar>& b, const ErrorCovariance<Scalar>& o,
                                   const DataMatrix<Scalar>& y, VertexId i,
                                   const FitConfig& config = {}) {
  detail::require_same_model(b, o);
  if (!b.graph().contains(i)) throw InvalidVertexError("vertex " + std::to_string(i) + " not in graph");
  if (y.num_variables() != b.dim()) throw ShapeError("data dimension does not match the model");
  return detail::update_from_data(b.graph(), b.values(), o.values(), y.values(), i,
                                  config.use_district_restriction);
}

/// One RICF update of vertex i from the empirical covariance (normal equations).
template <typename Scalar>
VertexUpdate<Scalar> update_vertex(const PathCoefficients<Scalar>& b, const ErrorCovariance<Scalar>& o,
                                   const EmpiricalCovariance<Scalar>& s, VertexId i,
                                   const FitConfig& config = {}) {
  detail::require_same_model(b, o);
  if (!b.graph().contains(i)) throw InvalidVertexError("vertex " + std::to_string(i) + " not in graph");
  detail::require_size(s.values(), b.dim(), "empirical covariance");
  return detail::update_from_covariance(b.graph(), b.values(), o.values(), s.values(), s.n(), i,
                                        config.use_district_restriction);
}

namespace detail {

template <typename Scalar, typename Update>
FitResult<Scalar> run_fit(const GraphPtr& gp, const MatrixX<Scalar>& s, Index n,
                          const FitConfig& config, const std::optional<StartingValues<Scalar>>& start,
                          Update&& update) {
  config.validate();
  require_graph(gp);
  const MixedGraph& g = *gp;
  require_fit_graph<Scalar>(g);
  const Index p = g.num_vertices();
  require_size(s, p, "empirical covariance");
  checked_llt<Scalar>(s, "empirical covariance");

  MatrixX<Scalar> b, omega;
  if (config.starting_value_policy == StartingValuePolicy::supplied) {
    if (!start) throw InvalidConfigError("starting values requested but none supplied");
    require_same_graph<Scalar>(g, start->b.graph(), "starting B");
    require_same_graph<Scalar>(g, start->omega.graph(), "starting Omega");
    b = start->b.values();
    omega = start->omega.values();
  } else {
    auto dag = dag_starting_values(gp, s);
    b = dag.b.values();
    omega = dag.omega.values();
  }

  const auto order = topological_order(g);
  std::vector<VertexId> closed_form;
  bool iterative = false;
  for (VertexId v = 0; v < p; ++v) {
    if (g.spouses_of(v).empty()) {
      closed_form.push_back(v);
    } else {
      iterative = true;
    }
  }

  using std::abs;
  FitResult<Scalar> result{PathCoefficients<Scalar>::zero(gp),
                           ErrorCovariance<Scalar>(gp, MatrixX<Scalar>::Identity(p, p)),
                           CovarianceMatrix<Scalar>(MatrixX<Scalar>::Identity(p, p)),
                           {},
                           FitStatus::max_cycles_reached,
                           0,
                           closed_form};
  std::optional<MatrixX<Scalar>> last_sigma;
  std::optional<MatrixX<Scalar>> diverged_sigma;

  for (int cycle = 1; cycle <= config.max_cycles; ++cycle) {
    const MatrixX<Scalar> b0 = b, omega0 = omega;
    for (VertexId i : order) {
      if (cycle > 1 && g.spouses_of(i).empty()) continue;
      apply_update(update(b, omega, i), b, omega);
    }
    const auto llt = checked_llt<Scalar>(omega, "error covariance iterate");
    result.loglik_trace.push_back(log_likelihood<Scalar>(b, llt, s, n));
    result.cycles_used = cycle;

    const Scalar change = std::max((b - b0).cwiseAbs().maxCoeff(), (omega - omega0).cwiseAbs().maxCoeff());
    if (!iterative || change < Scalar(config.tol)) {
      result.status = FitStatus::converged;
      break;
    }
    const Scalar magnitude = std::max(b.cwiseAbs().maxCoeff(), omega.cwiseAbs().maxCoeff());
    if (magnitude > Scalar(config.divergence_threshold)) {
      MatrixX<Scalar> sigma = phi(b, omega, order);
      if (last_sigma && (sigma - *last_sigma).cwiseAbs().maxCoeff() < Scalar(config.tol)) {
        result.status = FitStatus::parameter_divergence_sigma_converged;
        diverged_sigma = std::move(sigma);
        break;
      }
      last_sigma = std::move(sigma);
    } else {
      last_sigma.reset();
    }
  }

  result.b_hat = PathCoefficients<Scalar>(gp, std::move(b));
  result.omega_hat = ErrorCovariance<Scalar>(gp, std::move(omega));
  result.sigma_hat = diverged_sigma ? CovarianceMatrix<Scalar>(std::move(*diverged_sigma))
                                    : ricf::phi(result.b_hat, result.omega_hat);
  return result;
}

}  // namespace detail

/// Fit from the empirical covariance matrix (sufficient statistic).
template <typename Scalar>
FitResult<Scalar> fit(const GraphPtr& g, const EmpiricalCovariance<Scalar>& s, const FitConfig& config = {},
                      const std::optional<StartingValues<Scalar>>& start = std::nullopt) {
  detail::require_graph(g);
  return detail::run_fit<Scalar>(g, s.values(), s.n(), config, start,
                                 [&](const MatrixX<Scalar>& b, const MatrixX<Scalar>& omega, VertexId i) {
                                   return detail::update_from_covariance(*g, b, omega, s.values(), s.n(),
                                                                         i, config.use_district_restriction);
                                 });
}

/// Fit from raw observations; regressions are carried out on Y directly.
template <typename Scalar>
FitResult<Scalar> fit(const GraphPtr& g, const DataMatrix<Scalar>& y, const FitConfig& config = {},
                      const std::optional<StartingValues<Scalar>>& start = std::nullopt) {
  detail::require_graph(g);
  if (y.num_variables() != g->num_vertices()) throw ShapeError("data dimension does not match the graph");
  const auto s = empirical_covariance(y, false);
  return detail::run_fit<Scalar>(g, s.values(), s.n(), config, start,
                                 [&](const MatrixX<Scalar>& b, const MatrixX<Scalar>& omega, VertexId i) {
                                   return detail::update_from_data(*g, b, omega, y.values(), i,
                                                                   config.use_district_restriction);
                                 });
}

/// ℓ(B, Ω) written as the conditional term for ε_i given ε_{-i} plus the
/// marginal term for ε_{-i}:
///   −(N/2)log ω_{ii.-i} − ‖Y_i − B_{i,pa}Y_pa − Ω_{i,spo}Z_spo‖²/(2ω_{ii.-i})
///   −(N/2)log det Ω_{-i,-i} − ½ tr(Ω_{-i,-i}⁻¹ε_{-i}ε_{-i}ᵗ).
template <typename Scalar>
Scalar decomposed_log_likelihood(const PathCoefficients<Scalar>& b, const ErrorCovariance<Scalar>& o,
                                 const DataMatrix<Scalar>& y, VertexId i) {
  detail::require_same_model(b, o);
  const MixedGraph& g = b.graph();
  if (!g.contains(i)) throw InvalidVertexError("vertex " + std::to_string(i) + " not in graph");
  const auto eps = residuals(b, y);
  const Scalar n = Scalar(y.num_observations());
  const Scalar cond = conditional_variance(o, i);

  const auto z = pseudo_variables(o, eps, i, false);
  VectorX<Scalar> resid = y.values().row(i).transpose();
  for (VertexId j : g.parents_of(i)) resid -= b(i, j) * y.values().row(j).transpose();
  for (VertexId k : g.spouses_of(i)) resid -= o(i, k) * z.row(k).transpose();

  using std::log;
  Scalar out = -n / Scalar(2) * log(cond) - resid.squaredNorm() / (Scalar(2) * cond);
  if (!z.vertices.empty()) {
    const auto llt = detail::omega_block_llt(o.values(), z.vertices);
    MatrixX<Scalar> eps_rest(static_cast<Index>(z.vertices.size()), eps.values.cols());
    for (Index a = 0; a < eps_rest.rows(); ++a) eps_rest.row(a) = eps.values.row(z.vertices[a]);
    const Scalar log_det = Scalar(2) * llt.matrixLLT().diagonal().array().log().sum();
    out += -n / Scalar(2) * log_det - (eps_rest.cwiseProduct(z.values)).sum() / Scalar(2);
  }
  return out;
}

}  // namespace ricf
