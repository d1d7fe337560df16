#include "narrdyn/pathspace.hpp"

#include <algorithm>
#include <cmath>

#include "narrdyn/errors.hpp"
#include "narrdyn/io.hpp"

namespace narrdyn::pathspace {

namespace {

// Pairwise (tree) summation; bounds rounding error for ensemble sizes in the
// hundreds without the cost of full compensated summation.
double pairwise_sum(const double* data, size_t count) {
    if (count <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < count; ++i) s += data[i];
        return s;
    }
    const size_t half = count / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

void check_coverage(const semantic::EmbeddingSet& set, const corpus::GroupShape& shape) {
    if (set.n_narratives() != shape.n_narratives || set.n_paragraphs() != shape.n_paragraphs)
        throw ValidationError("embedding set does not cover the group (" +
                              std::to_string(set.n_narratives()) + "x" +
                              std::to_string(set.n_paragraphs()) + " vs " +
                              std::to_string(shape.n_narratives) + "x" +
                              std::to_string(shape.n_paragraphs) + ")");
}

AveragePath average_with(const semantic::EmbeddingSet& set, const corpus::GroupShape& shape,
                         const std::vector<std::vector<int>>* perms) {
    check_coverage(set, shape);
    const int n = shape.n_paragraphs;
    const int big_n = shape.n_narratives;
    const int k = set.k;

    AveragePath path;
    path.anchor_a = shape.anchor_a;
    path.anchor_b = shape.anchor_b;
    path.points.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(k)));
    std::vector<double> buffer(static_cast<size_t>(big_n));
    for (int j = 0; j < n; ++j)
        for (int c = 0; c < k; ++c) {
            for (int i = 0; i < big_n; ++i) {
                const int src = perms ? (*perms)[static_cast<size_t>(i)][static_cast<size_t>(j)] : j;
                buffer[static_cast<size_t>(i)] = set.at(i, src)[static_cast<size_t>(c)];
            }
            path.points[static_cast<size_t>(j)][static_cast<size_t>(c)] =
                pairwise_sum(buffer.data(), buffer.size()) / big_n;
        }
    return path;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t c = 0; c < a.size(); ++c) {
        const double d = a[c] - b[c];
        s += d * d;
    }
    return s;
}

}  // namespace

Metric parse_metric(const std::string& name) {
    if (name == "sq_euclidean") return Metric::sq_euclidean;
    if (name == "euclidean") return Metric::euclidean;
    throw ValidationError("unknown metric: " + name);
}

std::string metric_name(Metric m) {
    return m == Metric::sq_euclidean ? "sq_euclidean" : "euclidean";
}

AveragePath average_path(const semantic::EmbeddingSet& set, const corpus::GroupShape& shape) {
    AveragePath path = average_with(set, shape, nullptr);
    path.provenance = Provenance::ordered;
    return path;
}

AveragePath shuffled_average_path(const semantic::EmbeddingSet& set,
                                  const corpus::GroupShape& shape, uint64_t seed,
                                  bool pin_anchors) {
    const auto perms = corpus::group_permutations(shape.n_narratives, shape.n_paragraphs, seed,
                                                  pin_anchors, shape.anchor_a, shape.anchor_b);
    AveragePath path = average_with(set, shape, &perms);
    path.provenance = Provenance::shuffled;
    path.shuffle_seed = seed;
    return path;
}

AveragePath shuffled_average_path(const semantic::EmbeddingSet& set,
                                  const corpus::GroupShape& shape,
                                  const std::vector<std::vector<int>>& permutations) {
    if (static_cast<int>(permutations.size()) != shape.n_narratives)
        throw ValidationError("shuffled_average_path: one permutation per narrative required");
    AveragePath path = average_with(set, shape, &permutations);
    path.provenance = Provenance::shuffled;
    return path;
}

ActionValue action(const AveragePath& path) {
    if (path.size() < 2) throw ValidationError("action: path needs at least 2 points");
    double total = 0.0;
    for (int j = 1; j < path.size(); ++j)
        total += sq_dist(path.points[static_cast<size_t>(j)], path.points[static_cast<size_t>(j - 1)]);
    return ActionValue{total, Metric::sq_euclidean, path.size() - 1};
}

ActionValue action_of_order(const DistanceMatrix& dmat, const std::vector<int>& order) {
    const int n = dmat.size;
    if (static_cast<int>(order.size()) != n)
        throw ValidationError("action_of_order: order size does not match matrix");
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (int v : order) {
        if (v < 0 || v >= n || seen[static_cast<size_t>(v)])
            throw ValidationError("action_of_order: order is not a permutation of 0..n-1");
        seen[static_cast<size_t>(v)] = 1;
    }
    double total = 0.0;
    for (int t = 1; t < n; ++t)
        total += dmat.at(order[static_cast<size_t>(t - 1)], order[static_cast<size_t>(t)]);
    return ActionValue{total, dmat.metric_tag, n - 1};
}

DistanceMatrix distance_matrix(const std::vector<std::vector<double>>& points, Metric metric) {
    const int n = static_cast<int>(points.size());
    DistanceMatrix dmat;
    dmat.size = n;
    dmat.metric_tag = metric;
    dmat.entries.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = sq_dist(points[static_cast<size_t>(i)], points[static_cast<size_t>(j)]);
            if (metric == Metric::euclidean) d = std::sqrt(d);
            dmat.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
            dmat.entries[static_cast<size_t>(j)][static_cast<size_t>(i)] = d;
        }
    return dmat;
}

DistanceMatrix distance_matrix(const AveragePath& path, Metric metric) {
    return distance_matrix(path.points, metric);
}

std::string average_path_csv(const AveragePath& path) {
    std::string out = "# provenance=";
    out += path.provenance == Provenance::ordered ? "ordered" : "shuffled";
    if (path.shuffle_seed) out += " seed=" + std::to_string(*path.shuffle_seed);
    out += " n=" + std::to_string(path.size()) + " k=" + std::to_string(path.dim());
    out += " anchor_a=" + std::to_string(path.anchor_a) +
           " anchor_b=" + std::to_string(path.anchor_b) + "\n";
    for (const auto& point : path.points) out += io::csv_row(point) + "\n";
    return out;
}

std::string distance_matrix_csv(const DistanceMatrix& dmat) {
    std::string out = "# metric=" + metric_name(dmat.metric_tag) +
                      " n=" + std::to_string(dmat.size) + "\n";
    for (const auto& row : dmat.entries) out += io::csv_row(row) + "\n";
    return out;
}

}  // namespace narrdyn::pathspace
