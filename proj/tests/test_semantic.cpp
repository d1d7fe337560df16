#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "narrdyn/errors.hpp"
#include "narrdyn/io.hpp"
#include "narrdyn/semantic.hpp"
#include "narrdyn/testkit.hpp"
#include "oracles.hpp"

using namespace narrdyn;
namespace fs = std::filesystem;

namespace {

// group with one narrative holding the given paragraphs (canonical order is
// then just paragraph order)
corpus::NarrativeGroup tiny_group(const std::vector<std::string>& paragraphs) {
    corpus::NarrativeGroup group;
    group.n_paragraphs = static_cast<int>(paragraphs.size());
    group.anchor_a = 1;
    group.anchor_b = group.n_paragraphs;
    corpus::Narrative n;
    n.id = "only";
    n.paragraphs = paragraphs;
    group.narratives.push_back(n);
    return group;
}

semantic::TermParagraphMatrix dense_to_matrix(const oracles::Matrix& dense) {
    semantic::TermParagraphMatrix m;
    m.rows = static_cast<int>(dense.size());
    m.cols = static_cast<int>(dense.front().size());
    m.weighting = semantic::Weighting::raw;
    m.columns.resize(static_cast<size_t>(m.cols));
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            if (dense[static_cast<size_t>(r)][static_cast<size_t>(c)] != 0.0)
                m.columns[static_cast<size_t>(c)].emplace_back(
                    r, dense[static_cast<size_t>(r)][static_cast<size_t>(c)]);
    return m;
}

oracles::Matrix matrix_to_dense(const semantic::TermParagraphMatrix& m) {
    oracles::Matrix dense(static_cast<size_t>(m.rows),
                          std::vector<double>(static_cast<size_t>(m.cols), 0.0));
    for (int c = 0; c < m.cols; ++c)
        for (const auto& [row, w] : m.columns[static_cast<size_t>(c)])
            dense[static_cast<size_t>(row)][static_cast<size_t>(c)] = w;
    return dense;
}

double entry(const semantic::TermParagraphMatrix& m, const semantic::Vocabulary& vocab,
             const std::string& term, int col) {
    const auto it = vocab.term_index.find(term);
    REQUIRE(it != vocab.term_index.end());
    for (const auto& [row, w] : m.columns[static_cast<size_t>(col)])
        if (row == it->second) return w;
    return 0.0;
}

oracles::Matrix random_dense(int rows, int cols, rng::Engine& gen) {
    oracles::Matrix a(static_cast<size_t>(rows), std::vector<double>(static_cast<size_t>(cols)));
    for (auto& row : a)
        for (auto& v : row) v = 2.0 * rng::uniform01(gen) - 1.0;
    return a;
}

}  // namespace

TEST_CASE("tokenize folds case and punctuation") {
    CHECK(semantic::tokenize("The cat, the CAT.") ==
          std::vector<std::string>{"the", "cat", "the", "cat"});
    CHECK(semantic::tokenize("").empty());
    CHECK(semantic::tokenize("a1-b2") == std::vector<std::string>{"a1", "b2"});
    CHECK(semantic::tokenize("...") .empty());
}

TEST_CASE("build_matrix raw counts") {
    const auto group = tiny_group({"a b", "a c"});
    auto [vocab, matrix] = semantic::build_matrix(group, semantic::Weighting::raw);
    REQUIRE(vocab.terms == std::vector<std::string>{"a", "b", "c"});
    CHECK(matrix.rows == 3);
    CHECK(matrix.cols == 2);
    CHECK(entry(matrix, vocab, "a", 0) == 1.0);
    CHECK(entry(matrix, vocab, "a", 1) == 1.0);
    CHECK(entry(matrix, vocab, "b", 0) == 1.0);
    CHECK(entry(matrix, vocab, "b", 1) == 0.0);
    CHECK(entry(matrix, vocab, "c", 0) == 0.0);
    CHECK(entry(matrix, vocab, "c", 1) == 1.0);

    SUBCASE("column sums equal token counts") {
        const auto g2 = tiny_group({"x x y", "y z", "x y z w"});
        auto [v2, m2] = semantic::build_matrix(g2, semantic::Weighting::raw);
        const std::vector<double> expected{3.0, 2.0, 4.0};
        for (int c = 0; c < m2.cols; ++c) {
            double sum = 0.0;
            for (const auto& [row, w] : m2.columns[static_cast<size_t>(c)]) sum += w;
            CHECK(sum == doctest::Approx(expected[static_cast<size_t>(c)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("log-entropy zeroes terms spread uniformly") {
    const auto group = tiny_group({"x a", "x b", "x c"});
    auto [vocab, matrix] = semantic::build_matrix(group, semantic::Weighting::log_entropy);
    for (int c = 0; c < matrix.cols; ++c)
        CHECK(entry(matrix, vocab, "x", c) == 0.0);
    // non-uniform terms keep weight
    CHECK(entry(matrix, vocab, "a", 0) > 0.0);
}

TEST_CASE("tfidf matches hand computation") {
    const auto group = tiny_group({"a a b", "a c", "b b c c"});
    auto [vocab, matrix] = semantic::build_matrix(group, semantic::Weighting::tfidf);
    const double idf = std::log(3.0 / 2.0);  // every term appears in 2 of 3 paragraphs
    CHECK(entry(matrix, vocab, "a", 0) == doctest::Approx(2.0 * idf).epsilon(1e-12));
    CHECK(entry(matrix, vocab, "b", 0) == doctest::Approx(1.0 * idf).epsilon(1e-12));
    CHECK(entry(matrix, vocab, "a", 1) == doctest::Approx(1.0 * idf).epsilon(1e-12));
    CHECK(entry(matrix, vocab, "c", 1) == doctest::Approx(1.0 * idf).epsilon(1e-12));
    CHECK(entry(matrix, vocab, "b", 2) == doctest::Approx(2.0 * idf).epsilon(1e-12));
    CHECK(entry(matrix, vocab, "c", 2) == doctest::Approx(2.0 * idf).epsilon(1e-12));
}

TEST_CASE("build_matrix rejects empty vocabulary") {
    CHECK_THROWS_AS(semantic::build_matrix(tiny_group({"...", "!!"}), semantic::Weighting::raw),
                    ValidationError);
}

TEST_CASE("truncated_svd on a diagonal matrix") {
    const auto m = dense_to_matrix({{3, 0, 0}, {0, 2, 0}, {0, 0, 1}});
    const auto svd = semantic::truncated_svd(m, 2);
    REQUIRE(svd.singular_values.size() == 2);
    CHECK(svd.singular_values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(svd.singular_values[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(svd.rank_deficient);
}

TEST_CASE("truncated_svd exact on rank-1 outer product") {
    oracles::Matrix dense(4, std::vector<double>(3));
    const std::vector<double> u{1.0, -2.0, 0.5, 3.0};
    const std::vector<double> v{2.0, 1.0, -1.0};
    for (size_t r = 0; r < 4; ++r)
        for (size_t c = 0; c < 3; ++c) dense[r][c] = u[r] * v[c];
    const auto m = dense_to_matrix(dense);
    const auto svd = semantic::truncated_svd(m, 1);
    CHECK(semantic::reconstruction_error(m, svd) < 1e-10);

    SUBCASE("k beyond rank flags rank deficiency with zero tail") {
        const auto deficient = semantic::truncated_svd(m, 2);
        CHECK(deficient.rank_deficient);
        CHECK(deficient.singular_values[1] == 0.0);
        CHECK(deficient.singular_values[0] == doctest::Approx(svd.singular_values[0]));
    }
}

TEST_CASE("truncated_svd matches the Jacobi oracle on random instances") {
    auto gen = rng::make_engine(42);
    for (int trial = 0; trial < 5; ++trial) {
        const auto dense = random_dense(50, 80, gen);
        const auto svd = semantic::truncated_svd(dense_to_matrix(dense), 10);
        const auto oracle = oracles::jacobi_svd(dense);
        for (int j = 0; j < 10; ++j)
            CHECK(svd.singular_values[static_cast<size_t>(j)] ==
                  doctest::Approx(oracle.singular_values[static_cast<size_t>(j)]).epsilon(1e-6));
    }
}

TEST_CASE("truncated_svd large-matrix path matches a constructed spectrum") {
    // above the dense cutoff the randomized subspace path kicks in; build a
    // 1030x1100 matrix with a known spectrum and check the leading values
    const int rows = 1030, cols = 1100, rank = 25, k = 8;
    auto gen = rng::make_engine(90210);

    auto orthonormal = [&gen](int length, int count) {
        std::vector<std::vector<double>> basis(static_cast<size_t>(count),
                                               std::vector<double>(static_cast<size_t>(length)));
        for (auto& column : basis) {
            for (auto& v : column) v = rng::normal(gen);
        }
        for (int j = 0; j < count; ++j) {  // Gram-Schmidt
            auto& column = basis[static_cast<size_t>(j)];
            for (int prev = 0; prev < j; ++prev) {
                double dot = 0.0;
                for (int i = 0; i < length; ++i)
                    dot += column[static_cast<size_t>(i)] *
                           basis[static_cast<size_t>(prev)][static_cast<size_t>(i)];
                for (int i = 0; i < length; ++i)
                    column[static_cast<size_t>(i)] -=
                        dot * basis[static_cast<size_t>(prev)][static_cast<size_t>(i)];
            }
            double norm = 0.0;
            for (double v : column) norm += v * v;
            norm = std::sqrt(norm);
            for (auto& v : column) v /= norm;
        }
        return basis;
    };

    const auto u = orthonormal(rows, rank);
    const auto v = orthonormal(cols, rank);
    std::vector<double> sigma(static_cast<size_t>(rank));
    for (int j = 0; j < rank; ++j)
        sigma[static_cast<size_t>(j)] = 10.0 * std::pow(10.0, -j / 12.0);

    semantic::TermParagraphMatrix matrix;
    matrix.rows = rows;
    matrix.cols = cols;
    matrix.columns.resize(static_cast<size_t>(cols));
    for (int c = 0; c < cols; ++c) {
        auto& column = matrix.columns[static_cast<size_t>(c)];
        column.reserve(static_cast<size_t>(rows));
        for (int r = 0; r < rows; ++r) {
            double value = 0.0;
            for (int j = 0; j < rank; ++j)
                value += sigma[static_cast<size_t>(j)] *
                         u[static_cast<size_t>(j)][static_cast<size_t>(r)] *
                         v[static_cast<size_t>(j)][static_cast<size_t>(c)];
            column.emplace_back(r, value);
        }
    }

    const auto svd = semantic::truncated_svd(matrix, k);
    for (int j = 0; j < k; ++j)
        CHECK(svd.singular_values[static_cast<size_t>(j)] ==
              doctest::Approx(sigma[static_cast<size_t>(j)]).epsilon(1e-6));
    for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) {
            double dot = 0.0;
            for (size_t i = 0; i < svd.right_vectors[static_cast<size_t>(a)].size(); ++i)
                dot += svd.right_vectors[static_cast<size_t>(a)][i] *
                       svd.right_vectors[static_cast<size_t>(b)][i];
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("truncated_svd orthonormality and monotone reconstruction error") {
    auto gen = rng::make_engine(7);
    const auto dense = random_dense(30, 40, gen);
    const auto m = dense_to_matrix(dense);

    double previous_error = -1.0;
    for (int k = 1; k <= 8; ++k) {
        const auto svd = semantic::truncated_svd(m, k);
        // left^T left == I and right^T right == I
        for (int a = 0; a < k; ++a)
            for (int b = a; b < k; ++b) {
                double dot_left = 0.0, dot_right = 0.0;
                for (size_t i = 0; i < svd.left_vectors[static_cast<size_t>(a)].size(); ++i)
                    dot_left += svd.left_vectors[static_cast<size_t>(a)][i] *
                                svd.left_vectors[static_cast<size_t>(b)][i];
                for (size_t i = 0; i < svd.right_vectors[static_cast<size_t>(a)].size(); ++i)
                    dot_right += svd.right_vectors[static_cast<size_t>(a)][i] *
                                 svd.right_vectors[static_cast<size_t>(b)][i];
                const double expected = a == b ? 1.0 : 0.0;
                CHECK(std::abs(dot_left - expected) < 1e-8);
                CHECK(std::abs(dot_right - expected) < 1e-8);
            }
        const double error = semantic::reconstruction_error(m, svd);
        if (previous_error >= 0.0) CHECK(error <= previous_error + 1e-10);
        previous_error = error;

        // singular values nonincreasing
        for (size_t j = 1; j < svd.singular_values.size(); ++j)
            CHECK(svd.singular_values[j] <= svd.singular_values[j - 1] + 1e-12);
    }

    CHECK_THROWS_AS(semantic::truncated_svd(m, 31), ValidationError);
    CHECK_THROWS_AS(semantic::truncated_svd(m, 0), ValidationError);
}

TEST_CASE("embed_paragraphs basics") {
    SUBCASE("identical paragraphs embed identically") {
        const auto group = tiny_group({"alpha beta gamma", "alpha beta gamma", "delta phrase"});
        const auto set = semantic::embed_paragraphs(group, 2, semantic::Weighting::raw);
        const auto& a = set.at(0, 0);
        const auto& b = set.at(0, 1);
        double dist = 0.0;
        for (size_t c = 0; c < a.size(); ++c) dist += (a[c] - b[c]) * (a[c] - b[c]);
        CHECK(dist < 1e-20);
    }

    SUBCASE("k=1 embedding equals sigma_1 times first right vector") {
        const auto group = tiny_group({"a b c", "b c d", "c d e"});
        auto [vocab, matrix] = semantic::build_matrix(group, semantic::Weighting::raw);
        const auto svd = semantic::truncated_svd(matrix, 1);
        const auto set = semantic::embed_paragraphs(group, 1, semantic::Weighting::raw);
        for (int j = 0; j < 3; ++j)
            CHECK(set.at(0, j)[0] ==
                  doctest::Approx(svd.singular_values[0] *
                                  svd.right_vectors[0][static_cast<size_t>(j)])
                      .epsilon(1e-12));
    }

    SUBCASE("pairwise cosines match the Jacobi oracle") {
        const auto group = tiny_group(
            {"sun rise over hills", "sun sets over sea", "rain falls on sea", "rain and sun"});
        auto [vocab, matrix] = semantic::build_matrix(group, semantic::Weighting::raw);
        const auto set = semantic::embed_paragraphs(group, 2, semantic::Weighting::raw);
        const auto oracle = oracles::jacobi_svd(matrix_to_dense(matrix));

        auto cosine = [](const std::vector<double>& x, const std::vector<double>& y) {
            double xy = 0.0, xx = 0.0, yy = 0.0;
            for (size_t c = 0; c < x.size(); ++c) {
                xy += x[c] * y[c];
                xx += x[c] * x[c];
                yy += y[c] * y[c];
            }
            return xy / std::sqrt(xx * yy);
        };
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                std::vector<double> op(2), oq(2);
                for (int c = 0; c < 2; ++c) {
                    op[static_cast<size_t>(c)] =
                        oracle.singular_values[static_cast<size_t>(c)] *
                        oracle.right_vectors[static_cast<size_t>(c)][static_cast<size_t>(p)];
                    oq[static_cast<size_t>(c)] =
                        oracle.singular_values[static_cast<size_t>(c)] *
                        oracle.right_vectors[static_cast<size_t>(c)][static_cast<size_t>(q)];
                }
                CHECK(cosine(set.at(0, p), set.at(0, q)) ==
                      doctest::Approx(cosine(op, oq)).epsilon(1e-8));
            }
    }
}

TEST_CASE("embeddings do not depend on file creation order") {
    // canonical (narrative_id, position) column sort makes ingestion order
    // irrelevant
    const fs::path dir_a = fs::temp_directory_path() / "narrdyn_order_a";
    const fs::path dir_b = fs::temp_directory_path() / "narrdyn_order_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    const std::string opening = "the story begins here\n\n";
    const std::string closing = "\n\nthe story ends here\n";
    const std::vector<std::pair<std::string, std::string>> files{
        {"alpha.txt", opening + "sun rise over hills" + closing},
        {"beta.txt", opening + "rain falls on sea" + closing},
        {"gamma.txt", opening + "hills and sea mist" + closing},
    };
    for (const auto& [name, content] : files) io::write_file(dir_a / name, content);
    for (auto it = files.rbegin(); it != files.rend(); ++it)
        io::write_file(dir_b / it->first, it->second);

    corpus::GroupConfig cfg;
    cfg.n_paragraphs = 3;
    cfg.anchor_a = 1;
    cfg.anchor_b = 3;
    cfg.min_words = 0;
    auto [group_a, report_a] = corpus::load_group(dir_a, cfg);
    auto [group_b, report_b] = corpus::load_group(dir_b, cfg);
    const auto set_a = semantic::embed_paragraphs(group_a, 2, semantic::Weighting::raw);
    const auto set_b = semantic::embed_paragraphs(group_b, 2, semantic::Weighting::raw);
    CHECK(set_a.vectors == set_b.vectors);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("embedding file round trip") {
    const fs::path file = fs::temp_directory_path() / "narrdyn_embed_roundtrip.txt";
    const auto group = tiny_group({"one two three", "two three four", "three four five"});
    const auto set = semantic::embed_paragraphs(group, 2, semantic::Weighting::raw);
    semantic::save_embeddings(set, file);

    const auto shape = corpus::shape_of(group);
    const auto loaded = semantic::load_external(file, shape);
    CHECK(loaded.method_tag == "external");
    REQUIRE(loaded.k == set.k);
    for (int j = 0; j < 3; ++j)
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(loaded.at(0, j)[static_cast<size_t>(c)] -
                           set.at(0, j)[static_cast<size_t>(c)]) < 1e-12);
    fs::remove(file);
}

TEST_CASE("load_external validates format") {
    const fs::path file = fs::temp_directory_path() / "narrdyn_embed_bad.txt";
    corpus::GroupShape shape{2, 3, 1, 3, ""};

    io::write_file(file, "# comment\n6 3\n" + std::string("1 2 3\n0 0 1\n1 0 0\n2 2 2\n3 3 3\n4 4 4\n"));
    const auto ok = semantic::load_external(file, shape);
    CHECK(ok.k == 3);
    CHECK(ok.n_narratives() == 2);
    CHECK(ok.at(1, 2)[0] == 4.0);

    io::write_file(file, "5 3\n1 2 3\n0 0 1\n1 0 0\n2 2 2\n3 3 3\n");
    CHECK_THROWS_AS(semantic::load_external(file, shape), ValidationError);

    io::write_file(file, "6 3\n1 2 3\n0 0 1\n1 0 nan\n2 2 2\n3 3 3\n4 4 4\n");
    CHECK_THROWS_AS(semantic::load_external(file, shape), ValidationError);

    io::write_file(file, "6 3\n1 2 3 9\n0 0 1\n1 0 0\n2 2 2\n3 3 3\n4 4 4\n");
    CHECK_THROWS_AS(semantic::load_external(file, shape), ValidationError);

    io::write_file(file, "");
    CHECK_THROWS_AS(semantic::load_external(file, shape), ValidationError);
    fs::remove(file);
}

TEST_CASE("first coordinate series") {
    SUBCASE("k=1 equals the embedding itself") {
        const auto group = tiny_group({"a b", "b c", "c d"});
        const auto set = semantic::embed_paragraphs(group, 1, semantic::Weighting::raw);
        const auto series = semantic::first_coordinate_series(set, 0);
        REQUIRE(series.values.size() == 3);
        for (int j = 0; j < 3; ++j) CHECK(series.values[static_cast<size_t>(j)] == set.at(0, j)[0]);
    }

    SUBCASE("constant paragraphs give a constant series") {
        const auto group = tiny_group({"same words here now", "same words here now",
                                       "same words here now"});
        const auto set = semantic::embed_paragraphs(group, 1, semantic::Weighting::raw);
        const auto series = semantic::first_coordinate_series(set, 0);
        CHECK(std::abs(series.values[0] - series.values[1]) < 1e-10);
        CHECK(std::abs(series.values[0] - series.values[2]) < 1e-10);
    }

    SUBCASE("synthetic bridge ensemble yields a varying series of length n") {
        testkit::SyntheticGroupSpec spec;
        spec.n_narratives = 3;
        spec.n_paragraphs = 30;
        spec.dim = 4;
        spec.sigma = 0.5;
        spec.seed = 11;
        const auto ensemble = testkit::brownian_bridge_group(spec);
        const auto series = semantic::first_coordinate_series(ensemble.embeddings, 1);
        REQUIRE(static_cast<int>(series.values.size()) == 30);
        double mean = 0.0;
        for (double v : series.values) mean += v;
        mean /= 30.0;
        double variance = 0.0;
        for (double v : series.values) variance += (v - mean) * (v - mean);
        CHECK(variance > 0.0);
    }

    SUBCASE("bad narrative index") {
        const auto group = tiny_group({"a b", "b c"});
        const auto set = semantic::embed_paragraphs(group, 1, semantic::Weighting::raw);
        CHECK_THROWS_AS(semantic::first_coordinate_series(set, 5), ValidationError);
    }
}
