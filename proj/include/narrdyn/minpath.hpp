#pragma once

// Action minimizers: fixed-endpoint traveling salesman (exact Held-Karp,
// exhaustive oracle, multi-start 2-opt/Or-opt heuristic) and minimum
// spanning trees with branch extraction.

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "narrdyn/pathspace.hpp"

namespace narrdyn::minpath {

inline constexpr int kDefaultExactCutoff = 22;
inline constexpr int kBruteForceLimit = 10;
inline constexpr int kDefaultRestarts = 64;

struct SolverTag {
    std::string kind;  // exact | brute_force | heuristic
    int restarts = 0;
    uint64_t seed = 0;
};

struct PathOrder {
    std::vector<int> order;  // permutation of 0..n-1
    int start_index = 0;     // order.front()
    int end_index = 0;       // order.back()
    pathspace::ActionValue cost;
    SolverTag solver_tag;
};

struct SpanningTree {
    std::vector<std::tuple<int, int, double>> edges;  // (u, v, weight), u < v, sorted
    double total_weight = 0.0;
};

using TreeBranch = std::vector<int>;

// Globally minimal-cost Hamiltonian path from start to end via the Held-Karp
// dynamic program. Refuses instances above the cutoff (use the heuristic).
PathOrder tsp_exact(const pathspace::DistanceMatrix& dmat, int start, int end,
                    int exact_cutoff = kDefaultExactCutoff);

// Exhaustive enumeration of all interior orders, n <= 10; ties go to the
// lexicographically smallest order.
PathOrder tsp_brute_force(const pathspace::DistanceMatrix& dmat, int start, int end);

// Best of `restarts` runs of randomized-greedy construction followed by
// 2-opt and Or-opt local search; deterministic for fixed (dmat, restarts,
// seed) and 2-opt locally optimal on return.
PathOrder tsp_heuristic(const pathspace::DistanceMatrix& dmat, int start, int end,
                        int restarts = kDefaultRestarts, uint64_t seed = 0);

// True when no segment reversal improves the path cost.
bool two_opt_locally_optimal(const pathspace::DistanceMatrix& dmat,
                             const std::vector<int>& order);

// Minimum spanning tree, Prim O(n^2); ties broken toward the
// lexicographically smallest (u, v) edge.
SpanningTree mst(const pathspace::DistanceMatrix& dmat);

// For each tree-neighbor of the pivot, the longest simple path starting at
// the pivot through that neighbor (ties: lexicographically smallest node
// sequence); branches ordered by neighbor index.
std::vector<TreeBranch> split_branches(const SpanningTree& tree, int pivot_node);

// DOT rendering; nodes labeled with 1-based paragraph indices unless custom
// labels are given. Output is byte-stable for identical inputs.
std::string tree_to_dot(const SpanningTree& tree, const std::vector<std::string>& labels = {});

std::string tree_edges_csv(const SpanningTree& tree);

// Single CSV row of 1-based indices.
std::string path_order_csv(const PathOrder& order);

}  // namespace narrdyn::minpath
