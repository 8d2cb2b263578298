#include "ricf/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "ricf/errors.hpp"

namespace ricf {

namespace {

void require_vertex(const MixedGraph& g, VertexId i) {
  if (!g.contains(i)) {
    throw InvalidVertexError("vertex " + std::to_string(i) + " not in graph with " +
                             std::to_string(g.num_vertices()) + " vertices");
  }
}

// Union-find labels of the bi-directed components.
std::vector<int> bidirected_components(const MixedGraph& g) {
  const int n = g.num_vertices();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& e : g.bidirected_edges()) {
    const int ra = find(e.a), rb = find(e.b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<int> label(n);
  for (int v = 0; v < n; ++v) label[v] = find(v);
  return label;
}

// Returns one directed cycle, or empty when none exists.
std::vector<VertexId> find_cycle(const MixedGraph& g) {
  const int n = g.num_vertices();
  enum Color : char { white, grey, black };
  std::vector<Color> color(n, white);
  std::vector<VertexId> stack;
  std::vector<VertexId> cycle;

  auto dfs = [&](auto&& self, VertexId u) -> bool {
    color[u] = grey;
    stack.push_back(u);
    for (VertexId w : g.children_of(u)) {
      if (color[w] == grey) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle.assign(it, stack.end());
        return true;
      }
      if (color[w] == white && self(self, w)) return true;
    }
    stack.pop_back();
    color[u] = black;
    return false;
  };
  for (VertexId v = 0; v < n; ++v) {
    if (color[v] == white && dfs(dfs, v)) break;
  }
  return cycle;
}

}  // namespace

MixedGraph::MixedGraph(int num_vertices, std::vector<DirectedEdge> directed,
                       std::vector<BidirectedEdge> bidirected, std::vector<std::string> names)
    : names_(std::move(names)),
      directed_(std::move(directed)),
      bidirected_(std::move(bidirected)),
      parents_(num_vertices),
      children_(num_vertices),
      spouses_(num_vertices) {
  if (num_vertices < 0) throw InvalidGraphError("negative vertex count");
  if (names_.empty()) {
    names_.reserve(num_vertices);
    for (int v = 0; v < num_vertices; ++v) names_.push_back("V" + std::to_string(v + 1));
  } else if (static_cast<int>(names_.size()) != num_vertices) {
    throw InvalidGraphError("expected " + std::to_string(num_vertices) + " vertex names, got " +
                            std::to_string(names_.size()));
  }

  auto check = [&](VertexId v) {
    if (v < 0 || v >= num_vertices) {
      throw InvalidVertexError("edge endpoint " + std::to_string(v) + " out of range");
    }
  };
  for (const auto& e : directed_) {
    check(e.from);
    check(e.to);
    if (e.from == e.to) throw InvalidGraphError("self-loop at vertex " + names_[e.from]);
  }
  for (auto& e : bidirected_) {
    check(e.a);
    check(e.b);
    if (e.a == e.b) throw InvalidGraphError("self-loop at vertex " + names_[e.a]);
    if (e.a > e.b) std::swap(e.a, e.b);
  }

  std::sort(directed_.begin(), directed_.end());
  std::sort(bidirected_.begin(), bidirected_.end());
  if (auto it = std::adjacent_find(directed_.begin(), directed_.end()); it != directed_.end()) {
    throw InvalidGraphError("duplicate edge " + names_[it->from] + " -> " + names_[it->to]);
  }
  if (auto it = std::adjacent_find(bidirected_.begin(), bidirected_.end());
      it != bidirected_.end()) {
    throw InvalidGraphError("duplicate edge " + names_[it->a] + " <-> " + names_[it->b]);
  }

  for (const auto& e : directed_) {
    parents_[e.to].push_back(e.from);
    children_[e.from].push_back(e.to);
  }
  for (const auto& e : bidirected_) {
    spouses_[e.a].push_back(e.b);
    spouses_[e.b].push_back(e.a);
  }
  for (int v = 0; v < num_vertices; ++v) {
    std::sort(parents_[v].begin(), parents_[v].end());
    std::sort(children_[v].begin(), children_[v].end());
    std::sort(spouses_[v].begin(), spouses_[v].end());
  }
}

const std::string& MixedGraph::name(VertexId v) const {
  require_vertex(*this, v);
  return names_[v];
}

bool MixedGraph::has_directed(VertexId from, VertexId to) const {
  return std::binary_search(directed_.begin(), directed_.end(), DirectedEdge{from, to});
}

bool MixedGraph::has_bidirected(VertexId a, VertexId b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(bidirected_.begin(), bidirected_.end(), BidirectedEdge{a, b});
}

std::vector<VertexId> parents(const MixedGraph& g, VertexId i) {
  require_vertex(g, i);
  return g.parents_of(i);
}

std::vector<VertexId> spouses(const MixedGraph& g, VertexId i) {
  require_vertex(g, i);
  return g.spouses_of(i);
}

std::vector<VertexId> district(const MixedGraph& g, VertexId i) {
  require_vertex(g, i);
  std::vector<bool> seen(g.num_vertices(), false);
  std::vector<VertexId> frontier{i};
  seen[i] = true;
  std::vector<VertexId> out;
  while (!frontier.empty()) {
    const VertexId u = frontier.back();
    frontier.pop_back();
    for (VertexId w : g.spouses_of(u)) {
      if (!seen[w]) {
        seen[w] = true;
        out.push_back(w);
        frontier.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_acyclic(const MixedGraph& g) { return find_cycle(g).empty(); }

bool is_bow_free(const MixedGraph& g) {
  return std::none_of(g.directed_edges().begin(), g.directed_edges().end(),
                      [&](const DirectedEdge& e) { return g.has_bidirected(e.from, e.to); });
}

std::vector<std::vector<bool>> directed_reachability(const MixedGraph& g) {
  const int n = g.num_vertices();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (VertexId s = 0; s < n; ++s) {
    std::vector<VertexId> frontier(g.children_of(s));
    while (!frontier.empty()) {
      const VertexId u = frontier.back();
      frontier.pop_back();
      if (reach[s][u]) continue;
      reach[s][u] = true;
      for (VertexId w : g.children_of(u)) {
        if (!reach[s][w]) frontier.push_back(w);
      }
    }
  }
  return reach;
}

bool is_ancestral(const MixedGraph& g) {
  if (!is_acyclic(g)) throw PreconditionError("is_ancestral requires an acyclic graph");
  const auto reach = directed_reachability(g);
  return std::none_of(g.bidirected_edges().begin(), g.bidirected_edges().end(),
                      [&](const BidirectedEdge& e) { return reach[e.a][e.b] || reach[e.b][e.a]; });
}

bool is_bidirected_chain_graph(const MixedGraph& g) {
  const auto label = bidirected_components(g);
  const int n = g.num_vertices();

  std::vector<std::vector<int>> succ(n);
  std::vector<int> indegree(n, 0);
  for (const auto& e : g.directed_edges()) {
    const int s = label[e.from], t = label[e.to];
    if (s == t) return false;
    succ[s].push_back(t);
    ++indegree[t];
  }
  // Kahn on the component quotient; only labels that are roots are real nodes.
  std::vector<int> ready;
  int nodes = 0;
  for (int v = 0; v < n; ++v) {
    if (label[v] != v) continue;
    ++nodes;
    if (indegree[v] == 0) ready.push_back(v);
  }
  int visited = 0;
  while (!ready.empty()) {
    const int c = ready.back();
    ready.pop_back();
    ++visited;
    for (int t : succ[c]) {
      if (--indegree[t] == 0) ready.push_back(t);
    }
  }
  return visited == nodes;
}

std::vector<VertexId> topological_order(const MixedGraph& g) {
  const int n = g.num_vertices();
  std::vector<int> indegree(n);
  std::priority_queue<VertexId, std::vector<VertexId>, std::greater<>> ready;
  for (VertexId v = 0; v < n; ++v) {
    indegree[v] = static_cast<int>(g.parents_of(v).size());
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<VertexId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const VertexId u = ready.top();
    ready.pop();
    order.push_back(u);
    for (VertexId w : g.children_of(u)) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    auto cycle = find_cycle(g);
    std::string text;
    for (VertexId v : cycle) text += g.names()[v] + " -> ";
    text += g.names()[cycle.front()];
    throw CyclicGraphError("directed cycle " + text, std::move(cycle));
  }
  return order;
}

}  // namespace ricf
