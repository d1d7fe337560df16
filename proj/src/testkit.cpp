#include "narrdyn/testkit.hpp"

#include <cstdio>

#include "narrdyn/errors.hpp"
#include "narrdyn/io.hpp"
#include "narrdyn/rng.hpp"

namespace narrdyn::testkit {

namespace {

void check_spec(const SyntheticGroupSpec& spec) {
    if (spec.n_narratives < 2) throw ValidationError("synthetic spec: N must be >= 2");
    if (spec.n_paragraphs < 2) throw ValidationError("synthetic spec: n must be >= 2");
    if (spec.dim < 1) throw ValidationError("synthetic spec: k must be >= 1");
    if (spec.sigma < 0.0) throw ValidationError("synthetic spec: sigma must be >= 0");
}

std::string synthetic_id(int i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "synth_%04d", i);
    return buf;
}

}  // namespace

SyntheticEnsemble brownian_bridge_group(const SyntheticGroupSpec& spec) {
    check_spec(spec);
    std::vector<double> a = spec.anchor_a_vec;
    std::vector<double> b = spec.anchor_b_vec;
    if (a.empty()) a.assign(static_cast<size_t>(spec.dim), 0.0);
    if (b.empty()) b.assign(static_cast<size_t>(spec.dim), 1.0);
    if (static_cast<int>(a.size()) != spec.dim || static_cast<int>(b.size()) != spec.dim)
        throw ValidationError("synthetic spec: anchor vectors must have dimension k");

    const int n = spec.n_paragraphs;
    const int k = spec.dim;

    SyntheticEnsemble ensemble;
    ensemble.shape = corpus::GroupShape{spec.n_narratives, n, 1, n, "brownian_bridge"};
    ensemble.embeddings.k = k;
    ensemble.embeddings.method_tag = "external";
    ensemble.embeddings.vectors.resize(static_cast<size_t>(spec.n_narratives));
    ensemble.ids.reserve(static_cast<size_t>(spec.n_narratives));

    std::vector<std::vector<double>> walk(static_cast<size_t>(n),
                                          std::vector<double>(static_cast<size_t>(k)));
    for (int i = 0; i < spec.n_narratives; ++i) {
        ensemble.ids.push_back(synthetic_id(i));
        auto gen = rng::make_engine(rng::derive_seed(spec.seed, static_cast<uint64_t>(i)));

        // random walk W with W_1 = 0, then bridge
        // B_j = a + t_j (b - a) + W_j - t_j W_n, t_j = (j-1)/(n-1)
        for (int c = 0; c < k; ++c) walk[0][static_cast<size_t>(c)] = 0.0;
        for (int j = 1; j < n; ++j)
            for (int c = 0; c < k; ++c)
                walk[static_cast<size_t>(j)][static_cast<size_t>(c)] =
                    walk[static_cast<size_t>(j - 1)][static_cast<size_t>(c)] +
                    spec.sigma * rng::normal(gen);

        auto& narrative = ensemble.embeddings.vectors[static_cast<size_t>(i)];
        narrative.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(k)));
        for (int j = 0; j < n; ++j) {
            const double t = static_cast<double>(j) / (n - 1);
            for (int c = 0; c < k; ++c) {
                const auto cc = static_cast<size_t>(c);
                narrative[static_cast<size_t>(j)][cc] =
                    a[cc] + t * (b[cc] - a[cc]) + walk[static_cast<size_t>(j)][cc] -
                    t * walk[static_cast<size_t>(n - 1)][cc];
            }
        }
        // endpoints are the anchors exactly, independent of rounding
        narrative.front() = a;
        narrative.back() = b;
    }
    return ensemble;
}

Lexicon make_lexicon(int n_pools, int words_per_pool, uint64_t seed) {
    if (n_pools < 1 || words_per_pool < 1)
        throw ValidationError("make_lexicon: pools and words per pool must be >= 1");
    Lexicon lexicon;
    lexicon.pools.resize(static_cast<size_t>(n_pools));
    auto gen = rng::make_engine(rng::derive_seed(seed, "lexicon"));
    for (int pool = 0; pool < n_pools; ++pool) {
        auto& words = lexicon.pools[static_cast<size_t>(pool)];
        words.reserve(static_cast<size_t>(words_per_pool));
        for (int w = 0; w < words_per_pool; ++w) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "topic%02d_%c%c%c%02d", pool,
                          static_cast<char>('a' + rng::uniform_below(gen, 26)),
                          static_cast<char>('a' + rng::uniform_below(gen, 26)),
                          static_cast<char>('a' + rng::uniform_below(gen, 26)), w);
            words.emplace_back(buf);
        }
    }
    lexicon.filler = {"the", "and", "then", "while", "after", "before",
                      "with", "into", "from",  "again", "still", "once"};
    return lexicon;
}

void text_synth_group(const SyntheticGroupSpec& spec, const Lexicon& lexicon,
                      const std::filesystem::path& directory, int min_words) {
    check_spec(spec);
    const int n = spec.n_paragraphs;
    if (static_cast<int>(lexicon.pools.size()) < n)
        throw ValidationError("text_synth_group: lexicon needs at least n word pools");

    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw IoError("cannot create directory: " + directory.string());

    const int words_per_paragraph = min_words + 10;

    // Paragraph j leans on pool j with some mass on the neighbors, so
    // consecutive positions share vocabulary and the ensemble has a
    // traversable topic chain.
    auto make_paragraph = [&](int j, rng::Engine& gen) {
        std::string text;
        for (int w = 0; w < words_per_paragraph; ++w) {
            const double u = rng::uniform01(gen);
            const std::vector<std::string>* source;
            if (u < 0.5) {
                source = &lexicon.pools[static_cast<size_t>(j)];
            } else if (u < 0.7 && j > 0) {
                source = &lexicon.pools[static_cast<size_t>(j - 1)];
            } else if (u < 0.9 && j + 1 < n) {
                source = &lexicon.pools[static_cast<size_t>(j + 1)];
            } else if (!lexicon.filler.empty()) {
                source = &lexicon.filler;
            } else {
                source = &lexicon.pools[static_cast<size_t>(j)];
            }
            if (w) text.push_back(w % 12 == 0 ? '\n' : ' ');
            text += (*source)[rng::uniform_below(gen, source->size())];
        }
        return text;
    };

    // anchors: identical texts for every narrative at positions 1 and n
    auto anchor_gen = rng::make_engine(rng::derive_seed(spec.seed, "anchors"));
    const std::string anchor_a = make_paragraph(0, anchor_gen);
    const std::string anchor_b = make_paragraph(n - 1, anchor_gen);

    for (int i = 0; i < spec.n_narratives; ++i) {
        auto gen = rng::make_engine(rng::derive_seed(spec.seed, static_cast<uint64_t>(i)));
        std::string file_text;
        for (int j = 0; j < n; ++j) {
            if (j) file_text += "\n\n";
            if (j == 0)
                file_text += anchor_a;
            else if (j == n - 1)
                file_text += anchor_b;
            else
                file_text += make_paragraph(j, gen);
        }
        file_text.push_back('\n');
        io::write_file(directory / (synthetic_id(i) + ".txt"), file_text);
    }
}

}  // namespace narrdyn::testkit
