#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ricf {

/// Dense 0-based vertex index.
using VertexId = int;

/// Directed edge `from -> to`.
struct DirectedEdge {
  VertexId from;
  VertexId to;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
  friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Bi-directed edge `a <-> b`, stored with a < b.
struct BidirectedEdge {
  VertexId a;
  VertexId b;
  friend bool operator==(const BidirectedEdge&, const BidirectedEdge&) = default;
  friend auto operator<=>(const BidirectedEdge&, const BidirectedEdge&) = default;
};

/// Path diagram: vertices with directed and bi-directed edges. Immutable once
/// built. Self-loops and repeated edges are rejected; a directed and a
/// bi-directed edge on the same pair (a bow) is allowed so that predicates can
/// report it.
class MixedGraph {
 public:
  MixedGraph() = default;
  MixedGraph(int num_vertices, std::vector<DirectedEdge> directed,
             std::vector<BidirectedEdge> bidirected, std::vector<std::string> names = {});

  int num_vertices() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(VertexId v) const;

  /// Sorted by (from, to).
  const std::vector<DirectedEdge>& directed_edges() const noexcept { return directed_; }
  /// Sorted by (a, b), a < b.
  const std::vector<BidirectedEdge>& bidirected_edges() const noexcept { return bidirected_; }

  /// Sorted adjacency; unchecked, see the free functions for validated access.
  const std::vector<VertexId>& parents_of(VertexId v) const { return parents_[v]; }
  const std::vector<VertexId>& children_of(VertexId v) const { return children_[v]; }
  const std::vector<VertexId>& spouses_of(VertexId v) const { return spouses_[v]; }

  bool has_directed(VertexId from, VertexId to) const;
  bool has_bidirected(VertexId a, VertexId b) const;
  bool contains(VertexId v) const noexcept { return v >= 0 && v < num_vertices(); }

  /// Structural equality (names ignored).
  friend bool operator==(const MixedGraph& x, const MixedGraph& y) {
    return x.num_vertices() == y.num_vertices() && x.directed_ == y.directed_ &&
           x.bidirected_ == y.bidirected_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<DirectedEdge> directed_;
  std::vector<BidirectedEdge> bidirected_;
  std::vector<std::vector<VertexId>> parents_, children_, spouses_;
};

using GraphPtr = std::shared_ptr<const MixedGraph>;

template <typename... Args>
GraphPtr make_graph(Args&&... args) {
  return std::make_shared<const MixedGraph>(std::forward<Args>(args)...);
}

// Structural queries. All vertex sets are returned sorted ascending.

std::vector<VertexId> parents(const MixedGraph& g, VertexId i);
std::vector<VertexId> spouses(const MixedGraph& g, VertexId i);

/// Vertices joined to `i` by a path of bi-directed edges, excluding `i`.
std::vector<VertexId> district(const MixedGraph& g, VertexId i);

bool is_acyclic(const MixedGraph& g);
bool is_bow_free(const MixedGraph& g);

/// No `i <-> j` together with a directed path j -> ... -> i. Throws
/// PreconditionError on a cyclic graph.
bool is_ancestral(const MixedGraph& g);

/// Chain components are the connected components of the bi-directed part;
/// the graph qualifies iff no directed edge lies inside a component and the
/// directed edges induce an acyclic relation on components.
bool is_bidirected_chain_graph(const MixedGraph& g);

/// Kahn's algorithm, ties broken by smallest index. Throws CyclicGraphError
/// naming one directed cycle.
std::vector<VertexId> topological_order(const MixedGraph& g);

/// `reach[u][v]` is true iff there is a directed path u -> ... -> v of length >= 1.
std::vector<std::vector<bool>> directed_reachability(const MixedGraph& g);

}  // namespace ricf
