#include "ricf/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace ricf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_char(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view token, int line) {
  double value = 0.0;
  const char* begin = token.data();
  if (!token.empty() && token.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
    throw ParseError("not a number: '" + std::string(token) + "'", line);
  }
  return value;
}

// Header names -> graph vertex for each column (-1 when not in the graph).
std::vector<int> map_header(const std::vector<std::string_view>& header, const MixedGraph& g) {
  std::map<std::string, int, std::less<>> index;
  for (int v = 0; v < g.num_vertices(); ++v) index.emplace(g.names()[v], v);
  std::vector<int> column_vertex;
  std::vector<bool> seen(g.num_vertices(), false);
  for (auto name : header) {
    const auto it = index.find(name);
    if (it == index.end()) {
      column_vertex.push_back(-1);
      continue;
    }
    if (seen[it->second]) throw ParseError("duplicate column '" + std::string(name) + "'", 1);
    seen[it->second] = true;
    column_vertex.push_back(it->second);
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (!seen[v]) throw ParseError("missing column for variable '" + g.names()[v] + "'", 1);
  }
  return column_vertex;
}

std::vector<std::string_view> content_lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : lines_of(text)) {
    if (!trim(line).empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

MixedGraph parse_graph(std::string_view text) {
  std::vector<std::string> names;
  std::map<std::string, int, std::less<>> index;
  std::vector<DirectedEdge> directed;
  std::vector<BidirectedEdge> bidirected;
  std::map<std::pair<int, int>, int> seen_directed, seen_bidirected;
  bool edges_started = false;

  const auto lines = lines_of(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const int line_no = static_cast<int>(k + 1);
    auto line = lines[k];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(trim(line));
    if (tokens.empty()) continue;

    if (tokens[0] == "var") {
      if (tokens.size() != 2) throw ParseError("expected 'var <name>'", line_no);
      if (edges_started) throw ParseError("variable declared after edge lines", line_no);
      const std::string name(tokens[1]);
      if (name == "->" || name == "<->") throw ParseError("invalid variable name", line_no);
      if (!index.emplace(name, static_cast<int>(names.size())).second) {
        throw ParseError("variable '" + name + "' declared twice", line_no);
      }
      names.push_back(name);
      continue;
    }
    if (tokens.size() != 3 || (tokens[1] != "->" && tokens[1] != "<->")) {
      throw ParseError("expected '<name> -> <name>' or '<name> <-> <name>'", line_no);
    }
    edges_started = true;
    auto lookup = [&](std::string_view name) {
      const auto it = index.find(name);
      if (it == index.end()) throw ParseError("unknown variable '" + std::string(name) + "'", line_no);
      return it->second;
    };
    const int u = lookup(tokens[0]), v = lookup(tokens[2]);
    if (u == v) throw ParseError("self-loop on '" + std::string(tokens[0]) + "'", line_no);
    if (tokens[1] == "->") {
      if (!seen_directed.emplace(std::pair{u, v}, line_no).second) {
        throw ParseError("duplicate edge " + names[u] + " -> " + names[v], line_no);
      }
      directed.push_back({u, v});
    } else {
      if (!seen_bidirected.emplace(std::pair{std::min(u, v), std::max(u, v)}, line_no).second) {
        throw ParseError("duplicate edge " + names[u] + " <-> " + names[v], line_no);
      }
      bidirected.push_back({u, v});
    }
  }
  const int p = static_cast<int>(names.size());
  return MixedGraph(p, std::move(directed), std::move(bidirected), std::move(names));
}

std::string write_graph(const MixedGraph& g) {
  std::string out;
  for (const auto& name : g.names()) out += "var " + name + "\n";
  for (const auto& e : g.directed_edges()) out += g.names()[e.from] + " -> " + g.names()[e.to] + "\n";
  for (const auto& e : g.bidirected_edges()) out += g.names()[e.a] + " <-> " + g.names()[e.b] + "\n";
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write '" + path.string() + "'");
  out << contents;
}

DataMatrix<double> parse_data_csv(std::string_view text, const MixedGraph& g) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw EmptyDataError("data file is empty");
  const auto header = split_char(lines[0], ',');
  const auto column_vertex = map_header(header, g);
  const Index n = static_cast<Index>(lines.size()) - 1;
  if (n == 0) throw EmptyDataError("data file has no observations");
  MatrixX<double> y(g.num_vertices(), n);
  for (Index r = 0; r < n; ++r) {
    const int line_no = static_cast<int>(r + 2);
    const auto fields = split_char(lines[r + 1], ',');
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (column_vertex[c] >= 0) y(column_vertex[c], r) = parse_number(fields[c], line_no);
    }
  }
  return DataMatrix<double>(std::move(y));
}

std::string write_data_csv(const DataMatrix<double>& y, const MixedGraph& g) {
  std::string out;
  for (int v = 0; v < g.num_vertices(); ++v) out += (v ? "," : "") + g.names()[v];
  out += "\n";
  for (Index c = 0; c < y.num_observations(); ++c) {
    for (Index r = 0; r < y.num_variables(); ++r) {
      out += (r ? "," : "") + format_double(y.values()(r, c));
    }
    out += "\n";
  }
  return out;
}

EmpiricalCovariance<double> parse_covariance_csv(std::string_view text, const MixedGraph& g, Index n) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw EmptyDataError("covariance file is empty");
  const auto header = split_char(lines[0], ',');
  const auto column_vertex = map_header(header, g);
  const std::size_t k = header.size();
  if (lines.size() != k + 1) {
    throw ParseError("expected " + std::to_string(k) + " matrix rows, got " + std::to_string(lines.size() - 1),
                     static_cast<int>(lines.size()));
  }
  const Index p = g.num_vertices();
  MatrixX<double> s(p, p);
  for (std::size_t r = 0; r < k; ++r) {
    const int line_no = static_cast<int>(r + 2);
    const auto fields = split_char(lines[r + 1], ',');
    if (fields.size() != k) throw ParseError("expected " + std::to_string(k) + " fields", line_no);
    if (column_vertex[r] < 0) continue;
    for (std::size_t c = 0; c < k; ++c) {
      if (column_vertex[c] >= 0) s(column_vertex[r], column_vertex[c]) = parse_number(fields[c], line_no);
    }
  }
  if (!s.isApprox(s.transpose(), 1e-12)) throw ParseError("covariance matrix is not symmetric", 1);
  return EmpiricalCovariance<double>(std::move(s), n, false);
}

std::string write_covariance_csv(const MatrixX<double>& s, const MixedGraph& g) {
  std::string out;
  for (int v = 0; v < g.num_vertices(); ++v) out += (v ? "," : "") + g.names()[v];
  out += "\n";
  for (Index r = 0; r < s.rows(); ++r) {
    for (Index c = 0; c < s.cols(); ++c) out += (c ? "," : "") + format_double(s(r, c));
    out += "\n";
  }
  return out;
}

nlohmann::json graph_summary(const MixedGraph& g) {
  nlohmann::json j;
  j["vertices"] = g.names();
  j["num_directed_edges"] = g.directed_edges().size();
  j["num_bidirected_edges"] = g.bidirected_edges().size();
  const bool acyclic = is_acyclic(g);
  j["acyclic"] = acyclic;
  j["bow_free"] = is_bow_free(g);
  j["ancestral"] = acyclic ? nlohmann::json(is_ancestral(g)) : nlohmann::json(nullptr);
  j["bidirected_chain_graph"] = is_bidirected_chain_graph(g);
  return j;
}

VectorX<double> standard_errors(const PathCoefficients<double>& b, const ErrorCovariance<double>& o,
                                Index n) {
  const ParameterVectorization v(b.graph());
  const auto info = fisher_information(b, o, v);
  Eigen::LDLT<MatrixX<double>> ldlt(info.matrix());
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      (ldlt.vectorD().array() <= 1e-12 * ldlt.vectorD().cwiseAbs().maxCoeff()).any()) {
    return {};
  }
  const MatrixX<double> inv = ldlt.solve(MatrixX<double>::Identity(v.size(), v.size()));
  return (inv.diagonal().array() / static_cast<double>(n)).sqrt().matrix();
}

nlohmann::json fit_report(const FitResult<double>& result, Index n, bool centered) {
  const MixedGraph& g = result.b_hat.graph();
  const ParameterVectorization v(g);
  VectorX<double> se;
  if (result.status != FitStatus::parameter_divergence_sigma_converged) {
    se = standard_errors(result.b_hat, result.omega_hat, n);
  }
  auto se_at = [&](Index k) { return se.size() ? nlohmann::json(se(k)) : nlohmann::json(nullptr); };

  nlohmann::json j;
  j["format"] = "ricf-fit-report/1";
  j["graph"] = graph_summary(g);
  j["n"] = n;
  j["centered"] = centered;
  j["status"] = std::string(to_string(result.status));
  j["cycles"] = result.cycles_used;
  j["log_likelihood"] = result.log_likelihood();
  j["loglik_trace"] = result.loglik_trace;
  nlohmann::json closed = nlohmann::json::array();
  for (VertexId c : result.closed_form_vertices) closed.push_back(g.names()[c]);
  j["closed_form_vertices"] = closed;

  Index k = 0;
  nlohmann::json beta = nlohmann::json::array();
  for (const auto& e : v.beta_index()) {
    beta.push_back({{"from", g.names()[e.col]},
                    {"to", g.names()[e.row]},
                    {"estimate", result.b_hat(e.row, e.col)},
                    {"se", se_at(k++)}});
  }
  nlohmann::json omega = nlohmann::json::array();
  for (const auto& e : v.omega_index()) {
    omega.push_back({{"vertex1", g.names()[e.row]},
                     {"vertex2", g.names()[e.col]},
                     {"estimate", result.omega_hat(e.row, e.col)},
                     {"se", se_at(k++)}});
  }
  j["beta"] = beta;
  j["omega"] = omega;
  nlohmann::json sigma = nlohmann::json::array();
  for (Index r = 0; r < result.sigma_hat.dim(); ++r) {
    nlohmann::json jr = nlohmann::json::array();
    for (Index c = 0; c < result.sigma_hat.dim(); ++c) jr.push_back(result.sigma_hat(r, c));
    sigma.push_back(jr);
  }
  j["sigma_hat"] = sigma;
  return j;
}

}  // namespace ricf
