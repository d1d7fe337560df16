#include "narrdyn/semantic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "narrdyn/errors.hpp"
#include "narrdyn/io.hpp"
#include "narrdyn/rng.hpp"

namespace narrdyn::semantic {

namespace {

// Above this min-dimension the dense SVD path is replaced by randomized
// subspace iteration on the sparse matrix.
constexpr int kDenseCutoff = 1024;

Eigen::SparseMatrix<double> to_sparse(const TermParagraphMatrix& m) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (int c = 0; c < m.cols; ++c)
        for (const auto& [row, w] : m.columns[static_cast<size_t>(c)])
            triplets.emplace_back(row, c, w);
    Eigen::SparseMatrix<double> sparse(m.rows, m.cols);
    sparse.setFromTriplets(triplets.begin(), triplets.end());
    return sparse;
}

SvdResult pack_result(const Eigen::MatrixXd& u, const Eigen::VectorXd& sigma,
                      const Eigen::MatrixXd& v, int k) {
    SvdResult result;
    result.singular_values.resize(static_cast<size_t>(k), 0.0);
    result.left_vectors.assign(static_cast<size_t>(k),
                               std::vector<double>(static_cast<size_t>(u.rows()), 0.0));
    result.right_vectors.assign(static_cast<size_t>(k),
                                std::vector<double>(static_cast<size_t>(v.rows()), 0.0));
    const double tol = sigma.size() ? sigma(0) * 1e-12 : 0.0;
    for (int j = 0; j < k; ++j) {
        // Null directions keep their (orthonormal) basis columns; only the
        // singular value is clamped to zero and the result flagged.
        const double s = j < sigma.size() ? sigma(j) : 0.0;
        result.singular_values[static_cast<size_t>(j)] = s < tol ? 0.0 : s;
        if (s < tol || s <= 0.0) result.rank_deficient = true;
        for (int r = 0; r < u.rows(); ++r)
            result.left_vectors[static_cast<size_t>(j)][static_cast<size_t>(r)] = u(r, j);
        for (int r = 0; r < v.rows(); ++r)
            result.right_vectors[static_cast<size_t>(j)][static_cast<size_t>(r)] = v(r, j);
    }
    return result;
}

}  // namespace

Weighting parse_weighting(const std::string& name) {
    if (name == "raw") return Weighting::raw;
    if (name == "log_entropy") return Weighting::log_entropy;
    if (name == "tfidf") return Weighting::tfidf;
    throw ValidationError("unknown weighting: " + name);
}

std::string weighting_name(Weighting w) {
    switch (w) {
        case Weighting::raw: return "raw";
        case Weighting::log_entropy: return "log_entropy";
        case Weighting::tfidf: return "tfidf";
    }
    return "?";
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string word;
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            word.push_back(static_cast<char>(std::tolower(uc)));
        } else if (!word.empty()) {
            tokens.push_back(std::move(word));
            word.clear();
        }
    }
    if (!word.empty()) tokens.push_back(std::move(word));
    return tokens;
}

std::pair<Vocabulary, TermParagraphMatrix> build_matrix(const corpus::NarrativeGroup& group,
                                                        Weighting weighting) {
    const int n = group.n_paragraphs;
    const int cols = group.size() * n;

    // Raw counts per column; narratives are already in canonical id order.
    std::vector<std::map<std::string, int>> counts(static_cast<size_t>(cols));
    for (int i = 0; i < group.size(); ++i)
        for (int j = 0; j < n; ++j) {
            auto& col = counts[static_cast<size_t>(i * n + j)];
            for (auto& tok :
                 tokenize(group.narratives[static_cast<size_t>(i)].paragraphs[static_cast<size_t>(j)]))
                col[tok]++;
        }

    Vocabulary vocab;
    for (const auto& col : counts)
        for (const auto& [term, cnt] : col) vocab.term_index.emplace(term, 0);
    if (vocab.term_index.empty())
        throw ValidationError("empty vocabulary: no tokens in any paragraph");
    vocab.terms.reserve(vocab.term_index.size());
    for (auto& [term, idx] : vocab.term_index) {
        idx = static_cast<int>(vocab.terms.size());
        vocab.terms.push_back(term);
    }

    const int rows = static_cast<int>(vocab.terms.size());
    const double d_total = static_cast<double>(cols);

    // Per-term document frequency and global frequency for the global weights.
    std::vector<int> doc_freq(static_cast<size_t>(rows), 0);
    std::vector<double> global_freq(static_cast<size_t>(rows), 0.0);
    std::vector<double> entropy_acc(static_cast<size_t>(rows), 0.0);
    if (weighting != Weighting::raw) {
        for (const auto& col : counts)
            for (const auto& [term, cnt] : col) {
                const auto row = static_cast<size_t>(vocab.term_index[term]);
                doc_freq[row]++;
                global_freq[row] += cnt;
            }
        if (weighting == Weighting::log_entropy) {
            for (const auto& col : counts)
                for (const auto& [term, cnt] : col) {
                    const auto row = static_cast<size_t>(vocab.term_index[term]);
                    const double p = cnt / global_freq[row];
                    entropy_acc[row] -= p * std::log(p);
                }
        }
    }

    TermParagraphMatrix matrix;
    matrix.rows = rows;
    matrix.cols = cols;
    matrix.weighting = weighting;
    matrix.columns.resize(static_cast<size_t>(cols));
    const double log_d = std::log(d_total);
    for (int c = 0; c < cols; ++c) {
        auto& out = matrix.columns[static_cast<size_t>(c)];
        out.reserve(counts[static_cast<size_t>(c)].size());
        for (const auto& [term, cnt] : counts[static_cast<size_t>(c)]) {
            const int row = vocab.term_index[term];
            double value = 0.0;
            switch (weighting) {
                case Weighting::raw:
                    value = cnt;
                    break;
                case Weighting::log_entropy: {
                    // global weight 1 - H/log(D); a term spread uniformly over
                    // all paragraphs weighs zero.
                    const double h = cols > 1 ? entropy_acc[static_cast<size_t>(row)] / log_d : 0.0;
                    double global = 1.0 - h;
                    if (global < 1e-12) global = 0.0;
                    value = global * std::log1p(static_cast<double>(cnt));
                    break;
                }
                case Weighting::tfidf:
                    value = cnt * std::log(d_total / doc_freq[static_cast<size_t>(row)]);
                    break;
            }
            if (value != 0.0) out.emplace_back(row, value);
        }
    }
    return {std::move(vocab), std::move(matrix)};
}

SvdResult truncated_svd(const TermParagraphMatrix& matrix, int k) {
    const int min_dim = std::min(matrix.rows, matrix.cols);
    if (k < 1) throw ValidationError("truncated_svd: k must be >= 1");
    if (k > min_dim)
        throw ValidationError("truncated_svd: k=" + std::to_string(k) +
                              " exceeds min(rows, cols)=" + std::to_string(min_dim));

    if (min_dim <= kDenseCutoff) {
        Eigen::MatrixXd dense = Eigen::MatrixXd(to_sparse(matrix));
        Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
        return pack_result(svd.matrixU(), svd.singularValues(), svd.matrixV(), k);
    }

    // Randomized subspace iteration on the sparse matrix (seeded, so results
    // are reproducible). Oversampling plus a handful of power iterations is
    // ample for LSA-scale spectra.
    const Eigen::SparseMatrix<double> a = to_sparse(matrix);
    const int p = std::min(k + 12, matrix.cols);
    auto gen = rng::make_engine(rng::derive_seed(0x5eedULL, "truncated_svd"));
    Eigen::MatrixXd omega(matrix.cols, p);
    for (int c = 0; c < p; ++c)
        for (int r = 0; r < matrix.cols; ++r) omega(r, c) = rng::normal(gen);

    Eigen::MatrixXd y = a * omega;
    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(y).householderQ() *
                        Eigen::MatrixXd::Identity(matrix.rows, p);
    for (int it = 0; it < 7; ++it) {
        Eigen::MatrixXd z = a.transpose() * q;
        Eigen::MatrixXd qz = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() *
                             Eigen::MatrixXd::Identity(matrix.cols, p);
        y = a * qz;
        q = Eigen::HouseholderQR<Eigen::MatrixXd>(y).householderQ() *
            Eigen::MatrixXd::Identity(matrix.rows, p);
    }
    Eigen::MatrixXd b = q.transpose() * a;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd u = q * svd.matrixU();
    return pack_result(u, svd.singularValues(), svd.matrixV(), k);
}

EmbeddingSet embeddings_from_svd(const SvdResult& svd, int n_narratives, int n_paragraphs) {
    const int k = static_cast<int>(svd.singular_values.size());
    EmbeddingSet set;
    set.k = k;
    set.method_tag = "lsa";
    set.vectors.assign(static_cast<size_t>(n_narratives),
                       std::vector<std::vector<double>>(
                           static_cast<size_t>(n_paragraphs),
                           std::vector<double>(static_cast<size_t>(k))));
    for (int i = 0; i < n_narratives; ++i)
        for (int j = 0; j < n_paragraphs; ++j) {
            const auto col = static_cast<size_t>(i * n_paragraphs + j);
            auto& vec = set.vectors[static_cast<size_t>(i)][static_cast<size_t>(j)];
            for (int c = 0; c < k; ++c)
                vec[static_cast<size_t>(c)] = svd.singular_values[static_cast<size_t>(c)] *
                                              svd.right_vectors[static_cast<size_t>(c)][col];
        }
    return set;
}

EmbeddingSet embed_paragraphs(const corpus::NarrativeGroup& group, int k, Weighting weighting) {
    auto [vocab, matrix] = build_matrix(group, weighting);
    const SvdResult svd = truncated_svd(matrix, k);
    return embeddings_from_svd(svd, group.size(), group.n_paragraphs);
}

EmbeddingSet load_external(const std::filesystem::path& file, const corpus::GroupShape& shape) {
    std::istringstream in(io::read_file(file));
    std::string line;
    long rows = -1, k = -1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream header(line);
        if (!(header >> rows >> k))
            throw ValidationError("embedding file: malformed header line: " + line);
        break;
    }
    if (rows < 0) throw ValidationError("embedding file: missing header");
    if (k < 1) throw ValidationError("embedding file: dimension must be >= 1");
    const long expected = static_cast<long>(shape.n_narratives) * shape.n_paragraphs;
    if (rows != expected)
        throw ValidationError("embedding file: row count " + std::to_string(rows) +
                              " does not match N*n = " + std::to_string(expected));

    EmbeddingSet set;
    set.k = static_cast<int>(k);
    set.method_tag = "external";
    set.vectors.assign(static_cast<size_t>(shape.n_narratives),
                       std::vector<std::vector<double>>(static_cast<size_t>(shape.n_paragraphs)));
    for (long r = 0; r < rows; ++r) {
        if (!std::getline(in, line))
            throw ValidationError("embedding file: expected " + std::to_string(rows) +
                                  " rows, got " + std::to_string(r));
        std::istringstream row(line);
        std::vector<double> vec(static_cast<size_t>(k));
        for (long c = 0; c < k; ++c) {
            if (!(row >> vec[static_cast<size_t>(c)]))
                throw ValidationError("embedding file: row " + std::to_string(r + 1) +
                                      " has fewer than " + std::to_string(k) + " values");
            if (!std::isfinite(vec[static_cast<size_t>(c)]))
                throw ValidationError("embedding file: non-finite value at row " +
                                      std::to_string(r + 1));
        }
        double extra;
        if (row >> extra)
            throw ValidationError("embedding file: row " + std::to_string(r + 1) +
                                  " has more than " + std::to_string(k) + " values");
        const auto i = static_cast<size_t>(r / shape.n_paragraphs);
        const auto j = static_cast<size_t>(r % shape.n_paragraphs);
        set.vectors[i][j] = std::move(vec);
    }
    return set;
}

void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& file) {
    std::string out;
    const long rows = static_cast<long>(set.n_narratives()) * set.n_paragraphs();
    out += std::to_string(rows) + " " + std::to_string(set.k) + "\n";
    for (const auto& narrative : set.vectors)
        for (const auto& vec : narrative) out += io::csv_row(vec, ' ') + "\n";
    io::write_file(file, out);
}

takens::DelaySeries first_coordinate_series(const EmbeddingSet& set, int narrative_index,
                                            const std::string& label) {
    if (narrative_index < 0 || narrative_index >= set.n_narratives())
        throw ValidationError("first_coordinate_series: narrative index out of range");
    takens::DelaySeries series;
    series.label = label.empty() ? "narrative_" + std::to_string(narrative_index) : label;
    const auto& narrative = set.vectors[static_cast<size_t>(narrative_index)];
    series.values.reserve(narrative.size());
    for (const auto& vec : narrative) series.values.push_back(vec.front());
    return series;
}

double reconstruction_error(const TermParagraphMatrix& matrix, const SvdResult& svd) {
    const Eigen::SparseMatrix<double> a = to_sparse(matrix);
    const int k = static_cast<int>(svd.singular_values.size());
    Eigen::MatrixXd u(matrix.rows, k), v(matrix.cols, k);
    for (int j = 0; j < k; ++j) {
        for (int r = 0; r < matrix.rows; ++r)
            u(r, j) = svd.left_vectors[static_cast<size_t>(j)][static_cast<size_t>(r)];
        for (int r = 0; r < matrix.cols; ++r)
            v(r, j) = svd.right_vectors[static_cast<size_t>(j)][static_cast<size_t>(r)];
    }
    Eigen::VectorXd sigma(k);
    for (int j = 0; j < k; ++j) sigma(j) = svd.singular_values[static_cast<size_t>(j)];
    const Eigen::MatrixXd residual = Eigen::MatrixXd(a) - u * sigma.asDiagonal() * v.transpose();
    return residual.norm();
}

}  // namespace narrdyn::semantic
