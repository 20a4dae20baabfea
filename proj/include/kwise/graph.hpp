#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kwise {

enum class Family { bipartite, two_hub, hypercube, fan, cage, custom };

const char* family_name(Family f);
std::optional<Family> family_from_string(const std::string& name);

// Reduced fraction, den > 0.
struct Rational {
    long long num = 0;
    long long den = 1;
};

// Simple undirected graph with a canonical (lexicographically sorted) edge
// list. Edge index k always refers to this order, so samples indexed by edge
// are reproducible across runs. Immutable after construction.
class Graph {
public:
    using Edge = std::pair<std::int64_t, std::int64_t>;  // (i, j) with i < j

    static constexpr std::int64_t kDefaultHypercubeCap = 20;

    // K_{m,m}: vertices 0..m-1 on one side, m..2m-1 on the other.
    static Graph complete_bipartite(std::int64_t m);

    // Two hubs (vertices 0 and m+1) each joined to every middle vertex 1..m.
    static Graph two_hub(std::int64_t m);

    // m-dimensional hypercube; vertices are the integers 0..2^m-1 read as bit
    // vectors, edges join pairs at Hamming distance 1.
    static Graph hypercube(std::int64_t m, std::int64_t cap = kDefaultHypercubeCap);

    // Fan: hub 0 joined to 1..m and to 2m+1, hub 2m+1 joined to m+1..2m,
    // plus the parallel edges (i, m+i). 2m+2 vertices, 3m+1 edges.
    static Graph fan(std::int64_t m);

    // Incidence graph of the projective plane PG(2, q), q prime. Vertices
    // 0..N-1 are points, N..2N-1 are lines (N = q^2+q+1); a point and a line
    // are adjacent iff the GF(q) dot product of their homogeneous coordinate
    // representatives is zero. (q+1)-regular, girth 6.
    static Graph cage_incidence(std::int64_t q);

    static Graph custom(std::int64_t vertex_count, std::vector<Edge> edges);

    std::int64_t vertex_count() const { return vertex_count_; }
    std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    Family family() const { return family_; }
    std::int64_t size_param() const { return size_param_; }

    // Length of the shortest cycle (BFS from every vertex); nullopt for
    // forests.
    std::optional<std::int64_t> girth() const;

    // {"family":..., "param":..., "vertex_count":..., "edges": [[i,j],...]}
    std::string to_json() const;

    // Direction class of a hypercube edge: the index of the bit in which the
    // endpoints differ.
    static std::int64_t hypercube_direction(const Edge& e);

private:
    Graph(Family family, std::int64_t size_param, std::int64_t vertex_count,
          std::vector<Edge> edges);

    Family family_;
    std::int64_t size_param_;
    std::int64_t vertex_count_;
    std::vector<Edge> edges_;
};

// degree / vertex_count for the regular families (bipartite, hypercube,
// cage), as an exact reduced fraction. Rejects non-regular families.
Rational connectivity_ratio(Family family, std::int64_t param);

}  // namespace kwise
