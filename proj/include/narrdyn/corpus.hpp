#pragma once

// Ingestion and permutation of narrative groups. A group is an ensemble of
// narratives that all have the same paragraph count n and share the text of
// two anchor paragraphs; the anchors pin the endpoints of the path analysis
// downstream.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace narrdyn::corpus {

struct GroupConfig {
    int n_paragraphs = 0;
    int anchor_a = 0;  // 1-based paragraph index
    int anchor_b = 0;  // 1-based, anchor_a < anchor_b <= n
    int min_words = 40;
    std::string label;
};

struct Narrative {
    std::string id;  // file stem
    std::vector<std::string> paragraphs;
};

struct NarrativeGroup {
    std::vector<Narrative> narratives;  // sorted by id
    int n_paragraphs = 0;
    int anchor_a = 0;
    int anchor_b = 0;
    std::string label;

    int size() const { return static_cast<int>(narratives.size()); }
};

// Group structure without the texts; enough for the path-space machinery.
struct GroupShape {
    int n_narratives = 0;
    int n_paragraphs = 0;
    int anchor_a = 0;
    int anchor_b = 0;
    std::string label;
};

GroupShape shape_of(const NarrativeGroup& group);

struct ValidationReport {
    int accepted = 0;
    std::vector<std::pair<std::string, std::string>> rejected;  // (id, reason)
    std::vector<std::string> anchor_mismatches;

    std::string to_json() const;
};

// Count of maximal whitespace-delimited tokens.
int word_count(const std::string& paragraph_text);

// Collapse all whitespace runs to single spaces and trim; used for anchor
// comparison so line wrapping differences do not break anchor identity.
std::string normalize_whitespace(const std::string& text);

// Split a narrative file into paragraphs on runs of blank lines.
std::vector<std::string> split_paragraphs(const std::string& text);

// Load every .txt file in the directory, validate against the config, and
// return the accepted narratives sorted by id together with an itemized
// report. Rejection reasons: wrong_count, short_paragraph, anchor_mismatch.
// Anchor reference text is the most common normalized (anchor_a, anchor_b)
// pair among count/length-conforming narratives (ties: the pair held by the
// lexicographically smallest id).
std::pair<NarrativeGroup, ValidationReport> load_group(
    const std::filesystem::path& directory, const GroupConfig& config);

// Independent uniform random permutation of each narrative's paragraphs.
// pin_anchors keeps the two anchor positions fixed and permutes the rest.
NarrativeGroup permute_group(const NarrativeGroup& group, uint64_t seed,
                             bool pin_anchors = false);

// The per-narrative permutations permute_group applies for a given seed;
// perm[j] = source position of the paragraph placed at position j.
std::vector<std::vector<int>> group_permutations(int n_narratives, int n_paragraphs,
                                                 uint64_t seed, bool pin_anchors = false,
                                                 int anchor_a = 0, int anchor_b = 0);

GroupConfig parse_group_config(const std::string& json_text);

}  // namespace narrdyn::corpus
