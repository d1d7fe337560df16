#pragma once

// Synthetic ensembles with known ground truth: Brownian bridges between two
// anchor vectors (whose mean is the straight minimal-action path) and a
// topic-pool text generator that exercises the full ingestion + embedding
// pipeline.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "narrdyn/corpus.hpp"
#include "narrdyn/semantic.hpp"

namespace narrdyn::testkit {

struct SyntheticGroupSpec {
    int n_narratives = 0;           // N >= 2
    int n_paragraphs = 0;           // n >= 2
    int dim = 0;                    // k >= 1
    double sigma = 0.0;             // per-step noise scale, >= 0
    std::vector<double> anchor_a_vec;
    std::vector<double> anchor_b_vec;
    uint64_t seed = 0;
};

struct SyntheticEnsemble {
    semantic::EmbeddingSet embeddings;
    corpus::GroupShape shape;
    std::vector<std::string> ids;
};

// Each narrative is a discrete Brownian bridge from anchor_a_vec (position 1)
// to anchor_b_vec (position n); endpoints are exact, interior mean converges
// to the straight line. Per-narrative streams derive from (seed, i).
SyntheticEnsemble brownian_bridge_group(const SyntheticGroupSpec& spec);

struct Lexicon {
    std::vector<std::vector<std::string>> pools;  // one word pool per position
    std::vector<std::string> filler;
};

// Deterministic synthetic lexicon with n_pools disjoint topic pools.
Lexicon make_lexicon(int n_pools, int words_per_pool, uint64_t seed);

// Writes n_narratives text files of n_paragraphs each into the directory.
// Paragraph j draws mostly from pool j with some mass on the neighboring
// pools, so consecutive positions overlap lexically; paragraphs 1 and n are
// fixed anchor texts shared by every file. Output loads through
// corpus::load_group with zero rejects.
void text_synth_group(const SyntheticGroupSpec& spec, const Lexicon& lexicon,
                      const std::filesystem::path& directory, int min_words = 40);

}  // namespace narrdyn::testkit
