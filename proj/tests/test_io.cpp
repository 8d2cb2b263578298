#include "doctest.h"
#include "fixtures.hpp"
#include "golden.hpp"
#include "ricf/io.hpp"

using namespace ricf;
using namespace ricf::testing;

namespace {

int parse_error_line(std::string_view text) {
  try {
    parse_graph(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("graph parsing") {
  SUBCASE("minimal") {
    const auto g = parse_graph("var A\nvar B\nA -> B");
    CHECK(g.num_vertices() == 2);
    CHECK(g.has_directed(0, 1));
    CHECK(g.names() == std::vector<std::string>{"A", "B"});
  }
  SUBCASE("comments, blank lines and CRLF") {
    const auto g = parse_graph("# header\r\nvar A  # first\r\n\r\nvar B\r\n  A <-> B  \r\n");
    CHECK(g.has_bidirected(0, 1));
  }
  SUBCASE("Fig. 2(c) file") {
    const auto g = parse_graph(read_text_file(data_path("fig2c.txt")));
    CHECK(g == *fig2c());
    CHECK(parents(g, 2) == std::vector<VertexId>{0, 1});
    CHECK(spouses(g, 3) == std::vector<VertexId>{1});
  }
  SUBCASE("bows and cycles parse; they are rejected at fit time") {
    CHECK_FALSE(is_bow_free(parse_graph(read_text_file(data_path("fig2b.txt")))));
    CHECK_FALSE(is_acyclic(parse_graph(read_text_file(data_path("fig2a.txt")))));
  }
  SUBCASE("errors carry line numbers") {
    CHECK(parse_error_line("var A\nvar B\nA <-> B\nA <-> B") == 4);
    CHECK(parse_error_line("var A\nvar B\nB <-> A\nA <-> B") == 4);
    CHECK(parse_error_line("var A\nvar B\nA -> B\nA -> B") == 3 + 1);
    CHECK(parse_error_line("var A\nA -> C") == 2);
    CHECK(parse_error_line("var A\nvar A") == 2);
    CHECK(parse_error_line("var A\nA -> A") == 2);
    CHECK(parse_error_line("var A\nvar B\nA => B") == 3);
    CHECK(parse_error_line("var A B") == 1);
    CHECK(parse_error_line("var A\nvar B\nA -> B\nvar C") == 4);
    try {
      parse_graph("var A\nA -> C");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
      CHECK(e.kind() == "parse");
    }
  }
  SUBCASE("A -> B and B -> A are distinct edges") {
    CHECK_NOTHROW(parse_graph("var A\nvar B\nA -> B\nB -> A"));
  }
}

TEST_CASE("graph round trip") {
  for (const char* name : {"fig2a.txt", "fig2b.txt", "fig2c.txt", "sur.txt", "trial.txt", "dag3.txt"}) {
    const auto g = parse_graph(read_text_file(data_path(name)));
    const auto text = write_graph(g);
    const auto again = parse_graph(text);
    CHECK(again == g);
    CHECK(again.names() == g.names());
    CHECK(write_graph(again) == text);
  }
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    const auto g = random_bap(1 + k % 12, 0.3, 0.3, rng);
    CHECK(parse_graph(write_graph(*g)) == *g);
  }
}

TEST_CASE("empirical covariance") {
  CHECK(empirical_covariance(DataMatrix<double>(Mat{{1.0, -1.0}})).values()(0, 0) == 1.0);
  const auto centered = empirical_covariance(DataMatrix<double>(Mat{{0.0, 2.0}}), true);
  CHECK(centered.values()(0, 0) == 1.0);
  CHECK(centered.centered());
  CHECK(centered.n() == 2);
  Mat same(2, 3);
  same << 1, 1, 1, 2, 2, 2;
  CHECK(empirical_covariance(DataMatrix<double>(same), true).values().isZero());
  CHECK_THROWS_AS(empirical_covariance(DataMatrix<double>(Mat(2, 0))), EmptyDataError);
  CHECK_THROWS_AS(EmpiricalCovariance<double>(Mat::Identity(2, 2), 0), EmptyDataError);
}

TEST_CASE("data CSV") {
  const auto g = parse_graph("var A\nvar B");
  const auto y = parse_data_csv("B,extra,A\n1,9,2\n3,9,-4.5\n", g);
  CHECK(y.values() == Mat{{2.0, -4.5}, {1.0, 3.0}});
  CHECK(parse_data_csv(write_data_csv(y, g), g).values() == y.values());
  CHECK_THROWS_AS(parse_data_csv("A\n1\n", g), ParseError);
  CHECK_THROWS_AS(parse_data_csv("A,B\n1,x\n", g), ParseError);
  CHECK_THROWS_AS(parse_data_csv("A,B\n1,2,3\n", g), ParseError);
  CHECK_THROWS_AS(parse_data_csv("A,B,A\n1,2,3\n", g), ParseError);
  CHECK_THROWS_AS(parse_data_csv("A,B\n", g), EmptyDataError);
  CHECK_THROWS_AS(parse_data_csv("", g), EmptyDataError);
  // Exact round trip of arbitrary doubles.
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("covariance CSV") {
  const auto g = parse_graph("var A\nvar B");
  const auto s = parse_covariance_csv("B,A\n2,0.5\n0.5,1\n", g, 10);
  CHECK(s.values() == Mat{{1.0, 0.5}, {0.5, 2.0}});
  CHECK(s.n() == 10);
  CHECK(parse_covariance_csv(write_covariance_csv(s.values(), g), g, 10).values() == s.values());
  CHECK_THROWS_AS(parse_covariance_csv("A,B\n1,0.5\n0.4,1\n", g, 10), ParseError);
  CHECK_THROWS_AS(parse_covariance_csv("A,B\n1,0.5\n", g, 10), ParseError);
}

TEST_CASE("graph summary") {
  const auto j = graph_summary(*fig2c());
  CHECK(j["acyclic"] == true);
  CHECK(j["bow_free"] == true);
  CHECK(j["ancestral"] == false);
  CHECK(j["bidirected_chain_graph"] == false);
  CHECK(graph_summary(*fig2a())["ancestral"].is_null());
  CHECK(graph_summary(*fig4_sur())["bidirected_chain_graph"] == true);
}

TEST_CASE("fit report") {
  const auto g = parse_graph(read_text_file(data_path("trial.txt")));
  const auto gp = std::make_shared<const MixedGraph>(g);
  Rng rng(3);
  const auto params = random_parameters<double>(gp, rng);
  const auto y = sample_mvn(phi(params.b, params.omega), 200, rng);
  const auto r = fit(gp, empirical_covariance(y));
  const auto report = fit_report(r, 200, false);
  CHECK(report["status"] == "converged");
  CHECK(report["beta"].size() == 5);
  CHECK(report["omega"].size() == 5);
  // Every reported parameter names an edge or vertex of the input graph.
  for (const auto& b : report["beta"]) {
    const auto& names = g.names();
    const int from = int(std::find(names.begin(), names.end(), b["from"].get<std::string>()) - names.begin());
    const int to = int(std::find(names.begin(), names.end(), b["to"].get<std::string>()) - names.begin());
    CHECK(g.has_directed(from, to));
    CHECK(b["se"].get<double>() > 0);
  }
  for (const auto& o : report["omega"]) {
    const auto& names = g.names();
    const int a = int(std::find(names.begin(), names.end(), o["vertex1"].get<std::string>()) - names.begin());
    const int c = int(std::find(names.begin(), names.end(), o["vertex2"].get<std::string>()) - names.begin());
    CHECK((a == c || g.has_bidirected(a, c)));
  }
  CHECK(report["closed_form_vertices"] == nlohmann::json{"Ex", "dBMI"});
  const auto structure = skeleton(report).dump(2) + "\n";
  CHECK(structure == golden("fit_report.skeleton.json", structure));

  // Standard errors equal sqrt(diag(I⁻¹)/N) computed from an explicit inverse.
  const ParameterVectorization v(g);
  const Mat info = fisher_information(r.b_hat, r.omega_hat, v).matrix();
  const Vec expected = (info.inverse().diagonal() / 200.0).array().sqrt();
  const Vec se = standard_errors(r.b_hat, r.omega_hat, 200);
  CHECK(close_normwise(se, expected, 1e-10));
}

TEST_CASE("file errors") {
  try {
    read_text_file("/nonexistent/path/file.txt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == "io");
  }
}
