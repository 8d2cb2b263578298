#include "doctest.h"
#include "fixtures.hpp"
#include "ricf/simulate.hpp"

using namespace ricf;
using namespace ricf::testing;

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(5, 1), b(5, 1), c(5, 2), d(6, 1);
  bool differs_c = false, differs_d = false;
  for (int k = 0; k < 100; ++k) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs_c |= x != c.uniform();
    differs_d |= x != d.uniform();
  }
  CHECK(differs_c);
  CHECK(differs_d);
  Rng e(1);
  for (int k = 0; k < 1000; ++k) CHECK(e.below(7) < 7);
}

TEST_CASE("rng moments") {
  Rng rng(42);
  const int n = 200000;
  double sum = 0, sq = 0, usum = 0;
  for (int k = 0; k < n; ++k) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
    usum += rng.uniform();
  }
  CHECK(std::abs(sum / n) < 4 / std::sqrt(double(n)));
  CHECK(std::abs(sq / n - 1) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(usum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("random BAP") {
  SUBCASE("edge cases") {
    const auto none = random_bap({6, 0.0, 0.0, 1});
    CHECK(none->directed_edges().empty());
    CHECK(none->bidirected_edges().empty());
    const auto full = random_bap({6, 1.0, 0.0, 1});
    CHECK(full->directed_edges().size() == 15);
    CHECK(is_acyclic(*full));
    CHECK_THROWS_AS(random_bap({6, 0.6, 0.5, 1}), InvalidConfigError);
    CHECK_THROWS_AS(random_bap({6, -0.1, 0.5, 1}), InvalidConfigError);
  }
  SUBCASE("always a BAP") {
    Rng rng(2);
    for (int k = 0; k < 10000; ++k) {
      const auto g = random_bap(1 + k % 13, 0.3, 0.2, rng);
      CHECK(is_acyclic(*g));
      CHECK(is_bow_free(*g));
    }
  }
  SUBCASE("deterministic under seed") {
    CHECK(*random_bap({10, 0.3, 0.2, 77}) == *random_bap({10, 0.3, 0.2, 77}));
  }
  SUBCASE("mean edge count at p = 13, d = 0.2, b = 0.1") {
    Rng rng(3);
    double total = 0;
    for (int k = 0; k < 1000; ++k) {
      const auto g = random_bap(13, 0.2, 0.1, rng);
      total += double(g->directed_edges().size() + g->bidirected_edges().size());
    }
    // Edge count per graph is Binomial(78, 0.3).
    const double se = std::sqrt(78 * 0.3 * 0.7 / 1000);
    CHECK(std::abs(total / 1000 - 23.4) < 3 * se);
  }
  SUBCASE("labels are permuted") {
    Rng rng(4);
    bool saw_backward = false;
    for (int k = 0; k < 50 && !saw_backward; ++k) {
      for (const auto& e : random_bap(6, 0.5, 0.0, rng)->directed_edges()) saw_backward |= e.from > e.to;
    }
    CHECK(saw_backward);
  }
}

TEST_CASE("random parameters") {
  SUBCASE("no bi-directed edges gives diagonal Omega") {
    const auto params = random_parameters<double>(chain2(), 5);
    CHECK(params.omega.values().isDiagonal());
    CHECK(params.omega(0, 0) > 0);
  }
  SUBCASE("strict diagonal dominance") {
    Rng rng(6);
    for (int k = 0; k < 1000; ++k) {
      const auto g = random_bap(2 + k % 10, 0.2, 0.4, rng);
      const auto params = random_parameters<double>(g, rng);
      const Mat& om = params.omega.values();
      for (Index i = 0; i < om.rows(); ++i) CHECK(om(i, i) - (om.row(i).cwiseAbs().sum() - om(i, i)) > 0);
      CHECK(om.llt().info() == Eigen::Success);
    }
  }
  SUBCASE("deterministic under seed") {
    const auto a = random_parameters<double>(fig5(), 9), b = random_parameters<double>(fig5(), 9);
    CHECK(a.b.values() == b.b.values());
    CHECK(a.omega.values() == b.omega.values());
  }
}

TEST_CASE("multivariate normal sampling") {
  SUBCASE("identity covariance") {
    const int n = 100000;
    const auto y = sample_mvn(CovarianceMatrix<double>(Mat::Identity(3, 3)), n, 1);
    const Mat s = y.values() * y.values().transpose() / n;
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(s(i, i) - 1) < 4 * std::sqrt(2.0 / n));
      for (int j = 0; j < i; ++j) CHECK(std::abs(s(i, j)) < 4 / std::sqrt(double(n)));
    }
  }
  SUBCASE("single observation") {
    const auto y = sample_mvn(CovarianceMatrix<double>(Mat::Identity(2, 2)), 1, 2);
    CHECK(y.num_observations() == 1);
    CHECK(y.values().allFinite());
  }
  SUBCASE("reproducible") {
    std::mt19937_64 gen(3);
    const CovarianceMatrix<double> sigma(random_spd(4, gen));
    CHECK(sample_mvn(sigma, 10, 8).values() == sample_mvn(sigma, 10, 8).values());
  }
  SUBCASE("general covariance") {
    std::mt19937_64 gen(4);
    const Mat sigma = random_spd(4, gen);
    const int n = 200000;
    const auto y = sample_mvn(CovarianceMatrix<double>(sigma), n, 5);
    const Mat s = y.values() * y.values().transpose() / n;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double sd = std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / n);
        CHECK(std::abs(s(i, j) - sigma(i, j)) < 4.5 * sd);
      }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(CovarianceMatrix<double>(Mat::Ones(2, 2)), NotPositiveDefiniteError);
    CHECK_THROWS_AS(sample_mvn(CovarianceMatrix<double>(Mat::Identity(2, 2)), 0, 1), InvalidConfigError);
  }
}
