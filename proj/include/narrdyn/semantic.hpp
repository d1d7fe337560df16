#pragma once

// Paragraph embeddings: latent semantic analysis of a weighted term-paragraph
// matrix, or externally computed vectors loaded from the documented text
// format. Paragraph d's LSA vector is row d of V * diag(sigma) from the
// truncated SVD.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "narrdyn/corpus.hpp"
#include "narrdyn/takens.hpp"

namespace narrdyn::semantic {

enum class Weighting { raw, log_entropy, tfidf };

Weighting parse_weighting(const std::string& name);
std::string weighting_name(Weighting w);

struct Vocabulary {
    std::vector<std::string> terms;          // lexicographically sorted
    std::map<std::string, int> term_index;   // term -> dense 0-based row
};

// Sparse weighted counts; rows are terms, columns are the paragraphs of all
// narratives in canonical (narrative_id lexicographic, position) order.
struct TermParagraphMatrix {
    int rows = 0;
    int cols = 0;
    Weighting weighting = Weighting::log_entropy;
    std::vector<std::vector<std::pair<int, double>>> columns;  // (term row, weight)
};

struct SvdResult {
    std::vector<std::vector<double>> left_vectors;   // k columns of length rows
    std::vector<double> singular_values;             // nonincreasing, >= 0
    std::vector<std::vector<double>> right_vectors;  // k columns of length cols
    bool rank_deficient = false;  // k exceeded numerical rank; trailing zeros
};

struct EmbeddingSet {
    int k = 0;
    std::string method_tag;  // "lsa" or "external"
    // vectors[narrative][position] is a k-vector; narratives in group order.
    std::vector<std::vector<std::vector<double>>> vectors;

    int n_narratives() const { return static_cast<int>(vectors.size()); }
    int n_paragraphs() const {
        return vectors.empty() ? 0 : static_cast<int>(vectors.front().size());
    }
    const std::vector<double>& at(int narrative, int position) const {
        return vectors[static_cast<size_t>(narrative)][static_cast<size_t>(position)];
    }
};

// Lowercased maximal runs of ASCII letters/digits; everything else separates.
std::vector<std::string> tokenize(const std::string& text);

std::pair<Vocabulary, TermParagraphMatrix> build_matrix(const corpus::NarrativeGroup& group,
                                                        Weighting weighting);

// Best rank-k factorization (dense SVD up to a size cutoff, seeded randomized
// subspace iteration beyond it). Requires k <= min(rows, cols); if k exceeds
// the numerical rank the trailing singular values are zero and the result is
// flagged rank_deficient.
SvdResult truncated_svd(const TermParagraphMatrix& matrix, int k);

EmbeddingSet embed_paragraphs(const corpus::NarrativeGroup& group, int k, Weighting weighting);

// Assemble paragraph vectors (rows of V * diag(sigma)) from an existing
// factorization; embed_paragraphs is build_matrix + truncated_svd + this.
EmbeddingSet embeddings_from_svd(const SvdResult& svd, int n_narratives, int n_paragraphs);

// Text format: optional leading '#' comment lines, then "<rows> <k>", then
// rows lines of k space-separated decimal floats in canonical order.
EmbeddingSet load_external(const std::filesystem::path& file, const corpus::GroupShape& shape);
void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& file);

// Scalar observable: each paragraph's coordinate along the first singular
// direction (component 0), in story order.
takens::DelaySeries first_coordinate_series(const EmbeddingSet& set, int narrative_index,
                                            const std::string& label = {});

// Frobenius norm of (matrix - left * diag(sigma) * right^T); rank-k
// reconstruction error used by the monotonicity property.
double reconstruction_error(const TermParagraphMatrix& matrix, const SvdResult& svd);

}  // namespace narrdyn::semantic
