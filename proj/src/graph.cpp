#include "kwise/graph.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace kwise {

namespace {

bool is_prime(std::int64_t q) {
    if (q < 2) return false;
    for (std::int64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

void require_positive(std::int64_t m, const char* what) {
    if (m < 1) throw std::invalid_argument(std::string(what) + " requires a parameter >= 1");
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::bipartite: return "bipartite";
        case Family::two_hub: return "two_hub";
        case Family::hypercube: return "hypercube";
        case Family::fan: return "fan";
        case Family::cage: return "cage";
        case Family::custom: return "custom";
    }
    return "custom";
}

std::optional<Family> family_from_string(const std::string& name) {
    if (name == "bipartite") return Family::bipartite;
    if (name == "two_hub" || name == "two-hub") return Family::two_hub;
    if (name == "hypercube") return Family::hypercube;
    if (name == "fan") return Family::fan;
    if (name == "cage") return Family::cage;
    if (name == "custom") return Family::custom;
    return std::nullopt;
}

Graph::Graph(Family family, std::int64_t size_param, std::int64_t vertex_count,
             std::vector<Edge> edges)
    : family_(family), size_param_(size_param), vertex_count_(vertex_count),
      edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    for (const auto& [i, j] : edges_) {
        if (i < 0 || j < 0 || i >= vertex_count_ || j >= vertex_count_)
            throw std::invalid_argument("edge endpoint out of range");
        if (i == j) throw std::invalid_argument("self-loops are not allowed");
        if (i > j) throw std::invalid_argument("edges must be stored as (i, j) with i < j");
    }
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw std::invalid_argument("duplicate edge");
}

Graph Graph::complete_bipartite(std::int64_t m) {
    require_positive(m, "complete_bipartite");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m * m));
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < m; ++j)
            edges.emplace_back(i, m + j);
    return Graph(Family::bipartite, m, 2 * m, std::move(edges));
}

Graph Graph::two_hub(std::int64_t m) {
    require_positive(m, "two_hub");
    // Vertex 0 is the left hub, m+1 the right hub, 1..m the middle row.
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(2 * m));
    for (std::int64_t i = 1; i <= m; ++i) {
        edges.emplace_back(0, i);
        edges.emplace_back(i, m + 1);
    }
    return Graph(Family::two_hub, m, m + 2, std::move(edges));
}

Graph Graph::hypercube(std::int64_t m, std::int64_t cap) {
    require_positive(m, "hypercube");
    if (m > cap)
        throw std::invalid_argument("hypercube dimension " + std::to_string(m) +
                                    " exceeds the memory cap " + std::to_string(cap));
    const std::int64_t v = std::int64_t{1} << m;
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m * (v / 2)));
    for (std::int64_t i = 0; i < v; ++i)
        for (std::int64_t d = 0; d < m; ++d) {
            const std::int64_t j = i ^ (std::int64_t{1} << d);
            if (i < j) edges.emplace_back(i, j);
        }
    return Graph(Family::hypercube, m, v, std::move(edges));
}

Graph Graph::fan(std::int64_t m) {
    require_positive(m, "fan");
    // Vertex 0 and 2m+1 are the bottom corners; 1..m and m+1..2m the top rows.
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(3 * m + 1));
    edges.emplace_back(0, 2 * m + 1);
    for (std::int64_t i = 1; i <= m; ++i) {
        edges.emplace_back(0, i);
        edges.emplace_back(m + i, 2 * m + 1);
        edges.emplace_back(i, m + i);
    }
    return Graph(Family::fan, m, 2 * m + 2, std::move(edges));
}

Graph Graph::cage_incidence(std::int64_t q) {
    if (q < 2) throw std::invalid_argument("cage_incidence requires q >= 2");
    if (!is_prime(q))
        throw std::invalid_argument("cage_incidence: q = " + std::to_string(q) +
                                    " is not prime (prime powers are unsupported)");
    // Canonical representatives of the projective points over GF(q):
    // (1,a,b), (0,1,a), (0,0,1). Lines use the same list via duality.
    std::vector<std::array<std::int64_t, 3>> reps;
    reps.reserve(static_cast<std::size_t>(q * q + q + 1));
    for (std::int64_t a = 0; a < q; ++a)
        for (std::int64_t b = 0; b < q; ++b) reps.push_back({1, a, b});
    for (std::int64_t a = 0; a < q; ++a) reps.push_back({0, 1, a});
    reps.push_back({0, 0, 1});

    const std::int64_t n_points = static_cast<std::int64_t>(reps.size());
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>((q + 1) * n_points));
    for (std::int64_t p = 0; p < n_points; ++p)
        for (std::int64_t l = 0; l < n_points; ++l) {
            const auto& pt = reps[static_cast<std::size_t>(p)];
            const auto& ln = reps[static_cast<std::size_t>(l)];
            const std::int64_t dot = (pt[0] * ln[0] + pt[1] * ln[1] + pt[2] * ln[2]) % q;
            if (dot == 0) edges.emplace_back(p, n_points + l);
        }
    return Graph(Family::cage, q, 2 * n_points, std::move(edges));
}

Graph Graph::custom(std::int64_t vertex_count, std::vector<Edge> edges) {
    if (vertex_count < 1) throw std::invalid_argument("custom graph needs at least one vertex");
    return Graph(Family::custom, 0, vertex_count, std::move(edges));
}

std::optional<std::int64_t> Graph::girth() const {
    const std::size_t v = static_cast<std::size_t>(vertex_count_);
    std::vector<std::vector<std::int32_t>> adj(v);
    for (const auto& [i, j] : edges_) {
        adj[static_cast<std::size_t>(i)].push_back(static_cast<std::int32_t>(j));
        adj[static_cast<std::size_t>(j)].push_back(static_cast<std::int32_t>(i));
    }
    std::int64_t best = -1;
    std::vector<std::int64_t> dist(v);
    std::vector<std::int32_t> parent(v);
    // BFS from every root; a non-tree edge seen at depths (du, dw) closes a
    // cycle through the root of length du + dw + 1.
    for (std::size_t root = 0; root < v; ++root) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(parent.begin(), parent.end(), -1);
        std::queue<std::int32_t> queue;
        dist[root] = 0;
        queue.push(static_cast<std::int32_t>(root));
        while (!queue.empty()) {
            const std::int32_t u = queue.front();
            queue.pop();
            for (const std::int32_t w : adj[static_cast<std::size_t>(u)]) {
                if (dist[static_cast<std::size_t>(w)] < 0) {
                    dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
                    parent[static_cast<std::size_t>(w)] = u;
                    queue.push(w);
                } else if (w != parent[static_cast<std::size_t>(u)]) {
                    const std::int64_t cycle =
                        dist[static_cast<std::size_t>(u)] + dist[static_cast<std::size_t>(w)] + 1;
                    if (best < 0 || cycle < best) best = cycle;
                }
            }
        }
    }
    if (best < 0) return std::nullopt;
    return best;
}

std::string Graph::to_json() const {
    nlohmann::json j;
    j["family"] = family_name(family_);
    j["param"] = size_param_;
    j["vertex_count"] = vertex_count_;
    auto arr = nlohmann::json::array();
    for (const auto& [a, b] : edges_) arr.push_back({a, b});
    j["edges"] = std::move(arr);
    return j.dump();
}

std::int64_t Graph::hypercube_direction(const Edge& e) {
    const std::int64_t x = e.first ^ e.second;
    if (x == 0 || (x & (x - 1)) != 0)
        throw std::invalid_argument("not a hypercube edge: endpoints differ in more than one bit");
    return static_cast<std::int64_t>(__builtin_ctzll(static_cast<unsigned long long>(x)));
}

Rational connectivity_ratio(Family family, std::int64_t param) {
    std::int64_t degree = 0;
    std::int64_t vertices = 0;
    switch (family) {
        case Family::bipartite:
            require_positive(param, "connectivity_ratio(bipartite)");
            degree = param;
            vertices = 2 * param;
            break;
        case Family::hypercube:
            require_positive(param, "connectivity_ratio(hypercube)");
            degree = param;
            vertices = std::int64_t{1} << param;
            break;
        case Family::cage:
            degree = param + 1;
            vertices = 2 * (param * param + param + 1);
            break;
        default:
            throw std::invalid_argument(
                std::string("connectivity_ratio: family '") + family_name(family) +
                "' is not regular");
    }
    const std::int64_t g = std::gcd(degree, vertices);
    return Rational{degree / g, vertices / g};
}

}  // namespace kwise
