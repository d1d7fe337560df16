#include "narrdyn/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <json.hpp>

#include "narrdyn/errors.hpp"
#include "narrdyn/io.hpp"
#include "narrdyn/rng.hpp"

namespace narrdyn::corpus {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

void check_config(const GroupConfig& cfg) {
    if (cfg.n_paragraphs < 1)
        throw ValidationError("group config: n must be >= 1");
    if (!(1 <= cfg.anchor_a && cfg.anchor_a < cfg.anchor_b && cfg.anchor_b <= cfg.n_paragraphs))
        throw ValidationError("group config: anchors must satisfy 1 <= anchor_a < anchor_b <= n");
    if (cfg.min_words < 0)
        throw ValidationError("group config: min_words must be >= 0");
}

}  // namespace

GroupShape shape_of(const NarrativeGroup& group) {
    return GroupShape{group.size(), group.n_paragraphs, group.anchor_a, group.anchor_b,
                      group.label};
}

int word_count(const std::string& text) {
    int count = 0;
    bool in_word = false;
    for (char c : text) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

std::string normalize_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<std::string> split_paragraphs(const std::string& text) {
    std::vector<std::string> paragraphs;
    std::string current;
    size_t pos = 0;
    auto flush = [&] {
        if (normalize_whitespace(current).empty()) {
            current.clear();
            return;
        }
        paragraphs.push_back(current);
        current.clear();
    };
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (normalize_whitespace(line).empty()) {
            flush();
        } else {
            if (!current.empty()) current.push_back('\n');
            current += line;
        }
        pos = eol + 1;
    }
    flush();
    return paragraphs;
}

std::pair<NarrativeGroup, ValidationReport> load_group(const std::filesystem::path& directory,
                                                       const GroupConfig& config) {
    check_config(config);

    std::error_code ec;
    if (!std::filesystem::is_directory(directory, ec) || ec)
        throw IoError("not a readable directory: " + directory.string());

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

    ValidationReport report;
    std::vector<Narrative> conforming;  // passed count + length checks
    for (const auto& file : files) {
        Narrative narrative;
        narrative.id = file.stem().string();
        narrative.paragraphs = split_paragraphs(io::read_file(file));
        if (static_cast<int>(narrative.paragraphs.size()) != config.n_paragraphs) {
            report.rejected.emplace_back(narrative.id, "wrong_count");
            continue;
        }
        bool too_short = false;
        for (const auto& p : narrative.paragraphs) {
            if (word_count(p) < config.min_words) {
                too_short = true;
                break;
            }
        }
        if (too_short) {
            report.rejected.emplace_back(narrative.id, "short_paragraph");
            continue;
        }
        conforming.push_back(std::move(narrative));
    }

    // Majority vote on the normalized anchor pair; ties go to the pair held
    // by the lexicographically smallest id (files are already id-sorted).
    std::map<std::pair<std::string, std::string>, int> votes;
    for (const auto& n : conforming) {
        votes[{normalize_whitespace(n.paragraphs[static_cast<size_t>(config.anchor_a - 1)]),
               normalize_whitespace(n.paragraphs[static_cast<size_t>(config.anchor_b - 1)])}]++;
    }
    std::pair<std::string, std::string> reference;
    int best = -1;
    for (const auto& n : conforming) {
        std::pair<std::string, std::string> key{
            normalize_whitespace(n.paragraphs[static_cast<size_t>(config.anchor_a - 1)]),
            normalize_whitespace(n.paragraphs[static_cast<size_t>(config.anchor_b - 1)])};
        if (votes[key] > best) {
            best = votes[key];
            reference = key;
        }
    }

    NarrativeGroup group;
    group.n_paragraphs = config.n_paragraphs;
    group.anchor_a = config.anchor_a;
    group.anchor_b = config.anchor_b;
    group.label = config.label;
    for (auto& n : conforming) {
        std::pair<std::string, std::string> key{
            normalize_whitespace(n.paragraphs[static_cast<size_t>(config.anchor_a - 1)]),
            normalize_whitespace(n.paragraphs[static_cast<size_t>(config.anchor_b - 1)])};
        if (key != reference) {
            report.rejected.emplace_back(n.id, "anchor_mismatch");
            report.anchor_mismatches.push_back(n.id);
            continue;
        }
        group.narratives.push_back(std::move(n));
    }
    report.accepted = group.size();

    // rejected entries were appended in two passes; restore id order
    std::sort(report.rejected.begin(), report.rejected.end());

    if (group.size() == 0)
        throw ValidationError("no narrative in " + directory.string() +
                              " passed validation (candidates: " + std::to_string(files.size()) +
                              ")");
    return {std::move(group), std::move(report)};
}

std::vector<std::vector<int>> group_permutations(int n_narratives, int n_paragraphs,
                                                 uint64_t seed, bool pin_anchors, int anchor_a,
                                                 int anchor_b) {
    std::vector<std::vector<int>> perms;
    perms.reserve(static_cast<size_t>(n_narratives));
    for (int i = 0; i < n_narratives; ++i) {
        auto gen = rng::make_engine(rng::derive_seed(seed, static_cast<uint64_t>(i)));
        if (!pin_anchors) {
            perms.push_back(rng::random_permutation(n_paragraphs, gen));
            continue;
        }
        std::vector<int> movable;
        for (int j = 0; j < n_paragraphs; ++j)
            if (j != anchor_a - 1 && j != anchor_b - 1) movable.push_back(j);
        rng::shuffle(movable, gen);
        std::vector<int> perm(static_cast<size_t>(n_paragraphs));
        size_t next = 0;
        for (int j = 0; j < n_paragraphs; ++j) {
            if (j == anchor_a - 1 || j == anchor_b - 1)
                perm[static_cast<size_t>(j)] = j;
            else
                perm[static_cast<size_t>(j)] = movable[next++];
        }
        perms.push_back(std::move(perm));
    }
    return perms;
}

NarrativeGroup permute_group(const NarrativeGroup& group, uint64_t seed, bool pin_anchors) {
    const auto perms = group_permutations(group.size(), group.n_paragraphs, seed, pin_anchors,
                                          group.anchor_a, group.anchor_b);
    NarrativeGroup out = group;
    for (int i = 0; i < group.size(); ++i) {
        const auto& src = group.narratives[static_cast<size_t>(i)].paragraphs;
        auto& dst = out.narratives[static_cast<size_t>(i)].paragraphs;
        for (int j = 0; j < group.n_paragraphs; ++j)
            dst[static_cast<size_t>(j)] =
                src[static_cast<size_t>(perms[static_cast<size_t>(i)][static_cast<size_t>(j)])];
    }
    return out;
}

std::string ValidationReport::to_json() const {
    nlohmann::json j;
    j["accepted"] = accepted;
    j["rejected"] = nlohmann::json::array();
    for (const auto& [id, reason] : rejected)
        j["rejected"].push_back({{"id", id}, {"reason", reason}});
    j["anchor_mismatches"] = anchor_mismatches;
    return j.dump(2) + "\n";
}

GroupConfig parse_group_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("group config: invalid JSON: ") + e.what());
    }
    GroupConfig cfg;
    try {
        cfg.n_paragraphs = j.at("n").get<int>();
        cfg.anchor_a = j.at("anchor_a").get<int>();
        cfg.anchor_b = j.at("anchor_b").get<int>();
        cfg.min_words = j.value("min_words", 40);
        cfg.label = j.value("label", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("group config: ") + e.what());
    }
    check_config(cfg);
    return cfg;
}

}  // namespace narrdyn::corpus
