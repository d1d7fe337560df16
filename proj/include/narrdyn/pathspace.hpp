#pragma once

// Average paths over a narrative ensemble (ordered and shuffled variants)
// and the discrete action: the sum of squared distances between successive
// path points, with unit time step.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "narrdyn/corpus.hpp"
#include "narrdyn/semantic.hpp"

namespace narrdyn::pathspace {

enum class Metric { sq_euclidean, euclidean };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric m);

enum class Provenance { ordered, shuffled };

struct AveragePath {
    std::vector<std::vector<double>> points;  // n points of dimension k
    Provenance provenance = Provenance::ordered;
    std::optional<uint64_t> shuffle_seed;
    int anchor_a = 0;  // 1-based
    int anchor_b = 0;

    int size() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

struct DistanceMatrix {
    int size = 0;
    Metric metric_tag = Metric::sq_euclidean;
    std::vector<std::vector<double>> entries;  // symmetric, zero diagonal

    double at(int i, int j) const {
        return entries[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
};

struct ActionValue {
    double value = 0.0;
    Metric metric_tag = Metric::sq_euclidean;
    int n_steps = 0;
};

// point j = (1/N) sum_i P[i][j], averaged with pairwise summation.
AveragePath average_path(const semantic::EmbeddingSet& set, const corpus::GroupShape& shape);

// point j = (1/N) sum_i P[i][perm_i[j]] with independent per-narrative
// permutations drawn from the seed (same derivation as corpus::permute_group).
AveragePath shuffled_average_path(const semantic::EmbeddingSet& set,
                                  const corpus::GroupShape& shape, uint64_t seed,
                                  bool pin_anchors = false);

// Test hook: caller supplies the permutations explicitly.
AveragePath shuffled_average_path(const semantic::EmbeddingSet& set,
                                  const corpus::GroupShape& shape,
                                  const std::vector<std::vector<int>>& permutations);

// sum over j >= 2 of |point_j - point_{j-1}|^2 (alpha = 1, dt = 1).
ActionValue action(const AveragePath& path);

// Sum of consecutive matrix entries along the order; order must be a
// permutation of 0..n-1.
ActionValue action_of_order(const DistanceMatrix& dmat, const std::vector<int>& order);

DistanceMatrix distance_matrix(const AveragePath& path, Metric metric);
DistanceMatrix distance_matrix(const std::vector<std::vector<double>>& points, Metric metric);

std::string average_path_csv(const AveragePath& path);
std::string distance_matrix_csv(const DistanceMatrix& dmat);

}  // namespace narrdyn::pathspace
