#include "narrdyn/minpath.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "narrdyn/errors.hpp"
#include "narrdyn/io.hpp"
#include "narrdyn/rng.hpp"

namespace narrdyn::minpath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kImproveEps = 1e-12;  // minimum accepted local-search gain

void check_endpoints(const pathspace::DistanceMatrix& dmat, int start, int end) {
    if (dmat.size < 2) throw ValidationError("tsp: need at least 2 points");
    if (start == end) throw ValidationError("tsp: start and end must differ");
    if (start < 0 || start >= dmat.size || end < 0 || end >= dmat.size)
        throw ValidationError("tsp: endpoint index out of range");
}

PathOrder finish(const pathspace::DistanceMatrix& dmat, std::vector<int> order, SolverTag tag) {
    PathOrder result;
    result.start_index = order.front();
    result.end_index = order.back();
    result.cost = pathspace::action_of_order(dmat, order);
    result.order = std::move(order);
    result.solver_tag = std::move(tag);
    return result;
}

double order_cost(const pathspace::DistanceMatrix& dmat, const std::vector<int>& order) {
    double total = 0.0;
    for (size_t t = 1; t < order.size(); ++t)
        total += dmat.at(order[t - 1], order[t]);
    return total;
}

// One randomized construction plus 2-opt/Or-opt descent. Negative noise
// requests a uniformly random interior order instead of noisy
// nearest-neighbor, which diversifies the restart pool.
std::vector<int> heuristic_run(const pathspace::DistanceMatrix& dmat, int start, int end,
                               double greediness_noise, rng::Engine& gen) {
    const int n = dmat.size;
    std::vector<int> order;
    order.reserve(static_cast<size_t>(n));
    order.push_back(start);
    if (greediness_noise < 0.0) {
        std::vector<int> interior;
        for (int v = 0; v < n; ++v)
            if (v != start && v != end) interior.push_back(v);
        rng::shuffle(interior, gen);
        order.insert(order.end(), interior.begin(), interior.end());
    } else {
        std::vector<char> used(static_cast<size_t>(n), 0);
        used[static_cast<size_t>(start)] = 1;
        used[static_cast<size_t>(end)] = 1;
        int current = start;
        for (int placed = 2; placed < n; ++placed) {
            int best = -1;
            double best_cost = kInf;
            for (int v = 0; v < n; ++v) {
                if (used[static_cast<size_t>(v)]) continue;
                double c = dmat.at(current, v);
                if (greediness_noise > 0.0) c *= 1.0 + greediness_noise * rng::uniform01(gen);
                if (c < best_cost) {
                    best_cost = c;
                    best = v;
                }
            }
            used[static_cast<size_t>(best)] = 1;
            order.push_back(best);
            current = best;
        }
    }
    order.push_back(end);

    // 2-opt (segment reversal) and Or-opt (relocate 1-3 nodes), first
    // improvement, until neither move type applies. Endpoints stay pinned.
    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 1; i + 1 < n && !improved; ++i)
            for (int j = i + 1; j + 1 <= n - 1 && !improved; ++j) {
                const double delta = dmat.at(order[static_cast<size_t>(i - 1)],
                                             order[static_cast<size_t>(j)]) +
                                     dmat.at(order[static_cast<size_t>(i)],
                                             order[static_cast<size_t>(j + 1)]) -
                                     dmat.at(order[static_cast<size_t>(i - 1)],
                                             order[static_cast<size_t>(i)]) -
                                     dmat.at(order[static_cast<size_t>(j)],
                                             order[static_cast<size_t>(j + 1)]);
                if (delta < -kImproveEps) {
                    std::reverse(order.begin() + i, order.begin() + j + 1);
                    improved = true;
                }
            }
        if (improved) continue;
        for (int len = 1; len <= 3 && !improved; ++len)
            for (int i = 1; i + len - 1 <= n - 2 && !improved; ++i) {
                const double removal = dmat.at(order[static_cast<size_t>(i - 1)],
                                               order[static_cast<size_t>(i + len)]) -
                                       dmat.at(order[static_cast<size_t>(i - 1)],
                                               order[static_cast<size_t>(i)]) -
                                       dmat.at(order[static_cast<size_t>(i + len - 1)],
                                               order[static_cast<size_t>(i + len)]);
                for (int j = 0; j <= n - 2 && !improved; ++j) {
                    if (j >= i - 1 && j <= i + len - 1) continue;  // segment overlap
                    const double delta = removal +
                                         dmat.at(order[static_cast<size_t>(j)],
                                                 order[static_cast<size_t>(i)]) +
                                         dmat.at(order[static_cast<size_t>(i + len - 1)],
                                                 order[static_cast<size_t>(j + 1)]) -
                                         dmat.at(order[static_cast<size_t>(j)],
                                                 order[static_cast<size_t>(j + 1)]);
                    if (delta < -kImproveEps) {
                        std::vector<int> segment(order.begin() + i, order.begin() + i + len);
                        order.erase(order.begin() + i, order.begin() + i + len);
                        const int insert_at = j < i ? j + 1 : j + 1 - len;
                        order.insert(order.begin() + insert_at, segment.begin(), segment.end());
                        improved = true;
                    }
                }
            }
    }
    assert(two_opt_locally_optimal(dmat, order));
    return order;
}

}  // namespace

PathOrder tsp_exact(const pathspace::DistanceMatrix& dmat, int start, int end,
                    int exact_cutoff) {
    check_endpoints(dmat, start, end);
    const int n = dmat.size;
    if (n > exact_cutoff)
        throw ValidationError("tsp_exact: n=" + std::to_string(n) + " exceeds cutoff " +
                              std::to_string(exact_cutoff) +
                              "; use tsp_heuristic for instances this large");

    std::vector<int> interior;
    for (int v = 0; v < n; ++v)
        if (v != start && v != end) interior.push_back(v);
    const int m = static_cast<int>(interior.size());

    if (m == 0) return finish(dmat, {start, end}, SolverTag{"exact", 0, 0});

    // dp[mask * m + last]: cheapest path from start over interior set `mask`
    // ending at interior index `last`.
    const size_t states = static_cast<size_t>(1) << m;
    std::vector<double> dp(states * static_cast<size_t>(m), kInf);
    std::vector<int8_t> parent(states * static_cast<size_t>(m), -1);
    for (int v = 0; v < m; ++v)
        dp[(static_cast<size_t>(1) << v) * static_cast<size_t>(m) + static_cast<size_t>(v)] =
            dmat.at(start, interior[static_cast<size_t>(v)]);

    for (size_t mask = 1; mask < states; ++mask) {
        const size_t base = mask * static_cast<size_t>(m);
        for (int last = 0; last < m; ++last) {
            const double cost = dp[base + static_cast<size_t>(last)];
            if (cost == kInf || !(mask & (static_cast<size_t>(1) << last))) continue;
            for (int next = 0; next < m; ++next) {
                if (mask & (static_cast<size_t>(1) << next)) continue;
                const size_t next_state =
                    (mask | (static_cast<size_t>(1) << next)) * static_cast<size_t>(m) +
                    static_cast<size_t>(next);
                const double candidate =
                    cost + dmat.at(interior[static_cast<size_t>(last)],
                                   interior[static_cast<size_t>(next)]);
                if (candidate < dp[next_state]) {
                    dp[next_state] = candidate;
                    parent[next_state] = static_cast<int8_t>(last);
                }
            }
        }
    }

    const size_t full = states - 1;
    int best_last = -1;
    double best_cost = kInf;
    for (int last = 0; last < m; ++last) {
        const double total = dp[full * static_cast<size_t>(m) + static_cast<size_t>(last)] +
                             dmat.at(interior[static_cast<size_t>(last)], end);
        if (total < best_cost) {
            best_cost = total;
            best_last = last;
        }
    }

    std::vector<int> reversed{end};
    size_t mask = full;
    int last = best_last;
    while (last >= 0) {
        reversed.push_back(interior[static_cast<size_t>(last)]);
        const int prev = parent[mask * static_cast<size_t>(m) + static_cast<size_t>(last)];
        mask &= ~(static_cast<size_t>(1) << last);
        last = prev;
    }
    reversed.push_back(start);
    std::reverse(reversed.begin(), reversed.end());
    return finish(dmat, std::move(reversed), SolverTag{"exact", 0, 0});
}

PathOrder tsp_brute_force(const pathspace::DistanceMatrix& dmat, int start, int end) {
    check_endpoints(dmat, start, end);
    const int n = dmat.size;
    if (n > kBruteForceLimit)
        throw ValidationError("tsp_brute_force: n=" + std::to_string(n) + " exceeds limit " +
                              std::to_string(kBruteForceLimit));

    std::vector<int> interior;
    for (int v = 0; v < n; ++v)
        if (v != start && v != end) interior.push_back(v);

    // next_permutation enumerates interiors in ascending lexicographic order,
    // so with strict improvement the first optimum found is the
    // lexicographically smallest.
    std::vector<int> best_order;
    double best_cost = kInf;
    std::vector<int> order(static_cast<size_t>(n));
    do {
        order.front() = start;
        std::copy(interior.begin(), interior.end(), order.begin() + 1);
        order.back() = end;
        const double cost = order_cost(dmat, order);
        if (cost < best_cost) {
            best_cost = cost;
            best_order = order;
        }
    } while (std::next_permutation(interior.begin(), interior.end()));
    return finish(dmat, std::move(best_order), SolverTag{"brute_force", 0, 0});
}

PathOrder tsp_heuristic(const pathspace::DistanceMatrix& dmat, int start, int end, int restarts,
                        uint64_t seed) {
    check_endpoints(dmat, start, end);
    if (dmat.size < 3)
        return finish(dmat, {start, end}, SolverTag{"heuristic", restarts, seed});
    if (restarts < 1) throw ValidationError("tsp_heuristic: restarts must be >= 1");

    std::vector<int> best_order;
    double best_cost = kInf;
    for (int r = 0; r < restarts; ++r) {
        auto gen = rng::make_engine(rng::derive_seed(seed, static_cast<uint64_t>(r)));
        // restart 0 is pure greedy, every fourth restart starts from a random
        // order, the rest ramp the greediness perturbation
        double noise = 0.15 * (1 + r % 8);
        if (r == 0) noise = 0.0;
        if (r % 4 == 3) noise = -1.0;
        std::vector<int> order = heuristic_run(dmat, start, end, noise, gen);
        const double cost = order_cost(dmat, order);
        // min cost, then lexicographic order; keeps the returned cost
        // non-increasing in the number of restarts
        if (cost < best_cost || (cost == best_cost && order < best_order)) {
            best_cost = cost;
            best_order = std::move(order);
        }
    }
    return finish(dmat, std::move(best_order), SolverTag{"heuristic", restarts, seed});
}

bool two_opt_locally_optimal(const pathspace::DistanceMatrix& dmat,
                             const std::vector<int>& order) {
    const int n = static_cast<int>(order.size());
    for (int i = 1; i + 1 < n; ++i)
        for (int j = i + 1; j + 1 <= n - 1; ++j) {
            const double delta =
                dmat.at(order[static_cast<size_t>(i - 1)], order[static_cast<size_t>(j)]) +
                dmat.at(order[static_cast<size_t>(i)], order[static_cast<size_t>(j + 1)]) -
                dmat.at(order[static_cast<size_t>(i - 1)], order[static_cast<size_t>(i)]) -
                dmat.at(order[static_cast<size_t>(j)], order[static_cast<size_t>(j + 1)]);
            if (delta < -kImproveEps) return false;
        }
    return true;
}

SpanningTree mst(const pathspace::DistanceMatrix& dmat) {
    const int n = dmat.size;
    if (n < 2) throw ValidationError("mst: need at least 2 points");
    for (const auto& row : dmat.entries)
        for (double v : row)
            if (!std::isfinite(v)) throw NumericalError("mst: non-finite distance entry");

    auto edge_key = [](int parent, int child) {
        return std::pair<int, int>{std::min(parent, child), std::max(parent, child)};
    };

    std::vector<char> in_tree(static_cast<size_t>(n), 0);
    std::vector<double> key(static_cast<size_t>(n), kInf);
    std::vector<int> parent(static_cast<size_t>(n), -1);
    key[0] = 0.0;

    SpanningTree tree;
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        for (int v = 0; v < n; ++v) {
            if (in_tree[static_cast<size_t>(v)] || key[static_cast<size_t>(v)] == kInf) continue;
            if (pick == -1 || key[static_cast<size_t>(v)] < key[static_cast<size_t>(pick)]) {
                pick = v;
            } else if (key[static_cast<size_t>(v)] == key[static_cast<size_t>(pick)] &&
                       parent[static_cast<size_t>(v)] >= 0 && parent[static_cast<size_t>(pick)] >= 0 &&
                       edge_key(parent[static_cast<size_t>(v)], v) <
                           edge_key(parent[static_cast<size_t>(pick)], pick)) {
                pick = v;
            }
        }
        in_tree[static_cast<size_t>(pick)] = 1;
        if (parent[static_cast<size_t>(pick)] >= 0) {
            const auto [u, v] = edge_key(parent[static_cast<size_t>(pick)], pick);
            tree.edges.emplace_back(u, v, key[static_cast<size_t>(pick)]);
        }
        for (int v = 0; v < n; ++v) {
            if (in_tree[static_cast<size_t>(v)]) continue;
            const double w = dmat.at(pick, v);
            if (w < key[static_cast<size_t>(v)] ||
                (w == key[static_cast<size_t>(v)] && parent[static_cast<size_t>(v)] >= 0 &&
                 edge_key(pick, v) < edge_key(parent[static_cast<size_t>(v)], v))) {
                key[static_cast<size_t>(v)] = w;
                parent[static_cast<size_t>(v)] = pick;
            }
        }
    }

    std::sort(tree.edges.begin(), tree.edges.end());
    for (const auto& [u, v, w] : tree.edges) tree.total_weight += w;
    return tree;
}

std::vector<TreeBranch> split_branches(const SpanningTree& tree, int pivot_node) {
    // adjacency with sorted neighbor lists
    int max_node = 0;
    for (const auto& [u, v, w] : tree.edges) max_node = std::max({max_node, u, v});
    std::vector<std::vector<int>> adjacency(static_cast<size_t>(max_node) + 1);
    bool pivot_present = false;
    for (const auto& [u, v, w] : tree.edges) {
        adjacency[static_cast<size_t>(u)].push_back(v);
        adjacency[static_cast<size_t>(v)].push_back(u);
        pivot_present = pivot_present || u == pivot_node || v == pivot_node;
    }
    if (!pivot_present) throw ValidationError("split_branches: pivot node not in tree");
    for (auto& list : adjacency) std::sort(list.begin(), list.end());

    // Longest downward path from `node`, avoiding `from`; ties resolved by
    // lexicographically smallest node sequence.
    auto longest = [&](auto&& self, int node, int from) -> TreeBranch {
        TreeBranch best{node};
        for (int next : adjacency[static_cast<size_t>(node)]) {
            if (next == from) continue;
            TreeBranch candidate{node};
            const TreeBranch tail = self(self, next, node);
            candidate.insert(candidate.end(), tail.begin(), tail.end());
            if (candidate.size() > best.size() ||
                (candidate.size() == best.size() && candidate < best))
                best = std::move(candidate);
        }
        return best;
    };

    std::vector<TreeBranch> branches;
    for (int neighbor : adjacency[static_cast<size_t>(pivot_node)]) {
        TreeBranch branch{pivot_node};
        const TreeBranch tail = longest(longest, neighbor, pivot_node);
        branch.insert(branch.end(), tail.begin(), tail.end());
        branches.push_back(std::move(branch));
    }
    return branches;
}

std::string tree_to_dot(const SpanningTree& tree, const std::vector<std::string>& labels) {
    int max_node = 0;
    for (const auto& [u, v, w] : tree.edges) max_node = std::max({max_node, u, v});
    std::string out = "graph spanning_tree {\n";
    for (int node = 0; node <= max_node; ++node) {
        const std::string label = node < static_cast<int>(labels.size())
                                      ? labels[static_cast<size_t>(node)]
                                      : std::to_string(node + 1);
        out += "  n" + std::to_string(node) + " [label=\"" + label + "\"];\n";
    }
    for (const auto& [u, v, w] : tree.edges)
        out += "  n" + std::to_string(u) + " -- n" + std::to_string(v) + " [label=\"" +
               io::format_double(w) + "\"];\n";
    out += "}\n";
    return out;
}

std::string tree_edges_csv(const SpanningTree& tree) {
    std::string out = "# total_weight=" + io::format_double(tree.total_weight) + "\n";
    out += "u,v,weight\n";
    for (const auto& [u, v, w] : tree.edges)
        out += std::to_string(u + 1) + "," + std::to_string(v + 1) + "," + io::format_double(w) +
               "\n";
    return out;
}

std::string path_order_csv(const PathOrder& order) {
    std::string out;
    for (size_t i = 0; i < order.order.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(order.order[i] + 1);
    }
    out.push_back('\n');
    return out;
}

}  // namespace narrdyn::minpath
