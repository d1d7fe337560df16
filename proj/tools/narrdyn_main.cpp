// narrdyn: test ordered vector ensembles against an action principle.
//
// Subcommands: ingest, embed, synth, analyze, dimension. All outputs are
// plain CSV/JSON/DOT plus a manifest that pins config, input hashes, and
// seeds, so any bundle can be reproduced bit-for-bit.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "narrdyn/corpus.hpp"
#include "narrdyn/errors.hpp"
#include "narrdyn/io.hpp"
#include "narrdyn/minpath.hpp"
#include "narrdyn/pathspace.hpp"
#include "narrdyn/rng.hpp"
#include "narrdyn/runstats.hpp"
#include "narrdyn/semantic.hpp"
#include "narrdyn/takens.hpp"
#include "narrdyn/testkit.hpp"
#include "narrdyn/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace narrdyn;

namespace {

struct ManifestBuilder {
    std::string subcommand;
    json config = json::object();
    json inputs = json::object();
    json seeds = json::object();
    std::vector<fs::path> outputs;
    fs::path out_dir;

    void add_input(const fs::path& path) { inputs[path.string()] = io::hash_file(path); }

    void add_input_dir(const fs::path& dir) {
        std::error_code ec;
        if (!fs::is_directory(dir, ec) || ec)
            throw IoError("not a readable directory: " + dir.string());
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file()) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        std::string combined;
        for (const auto& f : files)
            combined += f.filename().string() + ":" + io::hash_file(f) + "\n";
        inputs[dir.string()] = io::fnv1a_hex(combined);
    }

    void write(const fs::path& path, const std::string& content) {
        io::write_file(path, content);
        outputs.push_back(path);
    }

    void finalize() {
        json m;
        m["tool"] = std::string(kToolName) + " " + kVersion;
        m["subcommand"] = subcommand;
        m["config"] = config;
        m["inputs"] = inputs;
        m["seeds"] = seeds;
        json outs = json::object();
        std::sort(outputs.begin(), outputs.end());
        for (const auto& f : outputs) outs[f.filename().string()] = io::hash_file(f);
        m["outputs"] = outs;
        io::write_file(out_dir / "manifest.json", m.dump(2) + "\n");
    }
};

struct GroupConfigFlags {
    std::string config_file;
    int n = 0;
    int anchor_a = 0;
    int anchor_b = 0;
    int min_words = 40;
    std::string label;
};

void add_group_config_flags(CLI::App* cmd, GroupConfigFlags& flags) {
    cmd->add_option("--group-config", flags.config_file,
                    "JSON file with {n, anchor_a, anchor_b, min_words, label}");
    cmd->add_option("--n", flags.n, "paragraphs per narrative");
    cmd->add_option("--anchor-a", flags.anchor_a, "first anchor position (1-based)");
    cmd->add_option("--anchor-b", flags.anchor_b, "second anchor position (1-based)");
    cmd->add_option("--min-words", flags.min_words, "minimum words per paragraph");
    cmd->add_option("--label", flags.label, "group label");
}

corpus::GroupConfig resolve_group_config(const GroupConfigFlags& flags,
                                         ManifestBuilder* manifest) {
    corpus::GroupConfig cfg;
    if (!flags.config_file.empty()) {
        cfg = corpus::parse_group_config(io::read_file(flags.config_file));
        if (manifest) manifest->add_input(flags.config_file);
        // direct flags override file values
        if (flags.n > 0) cfg.n_paragraphs = flags.n;
        if (flags.anchor_a > 0) cfg.anchor_a = flags.anchor_a;
        if (flags.anchor_b > 0) cfg.anchor_b = flags.anchor_b;
    } else {
        cfg.n_paragraphs = flags.n;
        cfg.anchor_a = flags.anchor_a;
        cfg.anchor_b = flags.anchor_b;
        cfg.min_words = flags.min_words;
        cfg.label = flags.label;
    }
    if (cfg.n_paragraphs == 0)
        throw ValidationError("group config required: --group-config or --n/--anchor-a/--anchor-b");
    return cfg;
}

json group_config_json(const corpus::GroupConfig& cfg) {
    return json{{"n", cfg.n_paragraphs},
                {"anchor_a", cfg.anchor_a},
                {"anchor_b", cfg.anchor_b},
                {"min_words", cfg.min_words},
                {"label", cfg.label}};
}

std::pair<int, int> parse_range(const std::string& text, int n) {
    const auto dots = text.find("..");
    if (dots == std::string::npos)
        throw ValidationError("range: expected a..b, got " + text);
    int a = 0, b = 0;
    try {
        a = std::stoi(text.substr(0, dots));
        b = std::stoi(text.substr(dots + 2));
    } catch (const std::exception&) {
        throw ValidationError("range: expected a..b, got " + text);
    }
    if (!(1 <= a && a < b && b <= n))
        throw ValidationError("range: need 1 <= a < b <= " + std::to_string(n));
    return {a, b};
}

std::vector<int> parse_m_range(const std::string& text) {
    const auto dots = text.find("..");
    std::vector<int> range;
    if (dots == std::string::npos) {
        range.push_back(std::stoi(text));
        return range;
    }
    const int a = std::stoi(text.substr(0, dots));
    const int b = std::stoi(text.substr(dots + 2));
    if (a < 1 || b < a) throw ValidationError("m-range: need 1 <= a <= b");
    for (int m = a; m <= b; ++m) range.push_back(m);
    return range;
}

void warn_dims(int dims) {
    if (dims < 100 || dims > 500)
        std::cerr << "warning: --dims " << dims << " is outside the usual 100..500 range\n";
}

// LSA embedding with k clamped to what the matrix supports.
semantic::EmbeddingSet embed_clamped(const corpus::NarrativeGroup& group, int dims,
                                     semantic::Weighting weighting) {
    auto [vocab, matrix] = semantic::build_matrix(group, weighting);
    const int k = std::min(dims, std::min(matrix.rows, matrix.cols));
    if (k < dims)
        std::cerr << "warning: clamping --dims " << dims << " to " << k
                  << " (matrix is " << matrix.rows << "x" << matrix.cols << ")\n";
    const auto svd = semantic::truncated_svd(matrix, k);
    return semantic::embeddings_from_svd(svd, group.size(), group.n_paragraphs);
}

// Reads "<rows> <k>" from an embedding file header (skipping comments).
long embedding_file_rows(const fs::path& file) {
    std::istringstream in(io::read_file(file));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream header(line);
        long rows = 0, k = 0;
        if (!(header >> rows >> k))
            throw ValidationError("embedding file: malformed header line: " + line);
        return rows;
    }
    throw ValidationError("embedding file: missing header");
}

// ---------------------------------------------------------------- ingest --

int cmd_ingest(const fs::path& corpus_dir, const GroupConfigFlags& cfg_flags,
               const fs::path& out_dir) {
    ManifestBuilder manifest;
    manifest.subcommand = "ingest";
    manifest.out_dir = out_dir;
    const auto cfg = resolve_group_config(cfg_flags, &manifest);
    manifest.config = group_config_json(cfg);
    manifest.add_input_dir(corpus_dir);

    auto [group, report] = corpus::load_group(corpus_dir, cfg);
    manifest.write(out_dir / "validation_report.json", report.to_json());
    manifest.finalize();

    std::cout << "accepted " << report.accepted << " narratives, rejected "
              << report.rejected.size() << "\n";
    return 0;
}

// ----------------------------------------------------------------- embed --

int cmd_embed(const fs::path& corpus_dir, const GroupConfigFlags& cfg_flags, int dims,
              const std::string& weighting_name, const fs::path& out_dir) {
    ManifestBuilder manifest;
    manifest.subcommand = "embed";
    manifest.out_dir = out_dir;
    const auto cfg = resolve_group_config(cfg_flags, &manifest);
    const auto weighting = semantic::parse_weighting(weighting_name);
    manifest.config = group_config_json(cfg);
    manifest.config["dims"] = dims;
    manifest.config["weighting"] = weighting_name;
    manifest.add_input_dir(corpus_dir);
    warn_dims(dims);

    auto [group, report] = corpus::load_group(corpus_dir, cfg);
    const auto set = embed_clamped(group, dims, weighting);
    semantic::save_embeddings(set, out_dir / "embeddings.txt");
    manifest.outputs.push_back(out_dir / "embeddings.txt");
    manifest.write(out_dir / "validation_report.json", report.to_json());
    manifest.finalize();

    std::cout << "embedded " << group.size() << " narratives x " << group.n_paragraphs
              << " paragraphs at k=" << set.k << "\n";
    return 0;
}

// ----------------------------------------------------------------- synth --

int cmd_synth(const std::string& mode, int big_n, int n, int dims, double sigma,
              uint64_t seed, const fs::path& out_dir) {
    ManifestBuilder manifest;
    manifest.subcommand = "synth";
    manifest.out_dir = out_dir;
    manifest.config = {{"mode", mode}, {"N", big_n}, {"n", n},
                       {"dims", dims}, {"sigma", sigma}};
    manifest.seeds["base"] = seed;

    testkit::SyntheticGroupSpec spec;
    spec.n_narratives = big_n;
    spec.n_paragraphs = n;
    spec.dim = dims;
    spec.sigma = sigma;
    spec.seed = seed;

    corpus::GroupConfig cfg;
    cfg.n_paragraphs = n;
    cfg.anchor_a = 1;
    cfg.anchor_b = n;
    cfg.label = "synthetic_" + mode;

    if (mode == "bridge") {
        const auto ensemble = testkit::brownian_bridge_group(spec);
        semantic::save_embeddings(ensemble.embeddings, out_dir / "embeddings.txt");
        manifest.outputs.push_back(out_dir / "embeddings.txt");
    } else if (mode == "text") {
        spec.dim = 1;  // unused by the text generator
        const auto lexicon = testkit::make_lexicon(n, 40, seed);
        testkit::text_synth_group(spec, lexicon, out_dir / "corpus", cfg.min_words);
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(out_dir / "corpus"))
            files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        manifest.outputs.insert(manifest.outputs.end(), files.begin(), files.end());
    } else {
        throw ValidationError("synth: mode must be bridge or text");
    }
    manifest.write(out_dir / "group_config.json", group_config_json(cfg).dump(2) + "\n");
    manifest.finalize();

    std::cout << "wrote synthetic " << mode << " ensemble (N=" << big_n << ", n=" << n
              << ") to " << out_dir.string() << "\n";
    return 0;
}

// --------------------------------------------------------------- analyze --

struct AnalyzeOptions {
    int dims = 300;
    std::string weighting = "log_entropy";
    std::string metric = "sq_euclidean";
    std::string tsp = "auto";
    int restarts = minpath::kDefaultRestarts;
    int start = 0;  // 1-based path position; 0 = default (anchor)
    int end = 0;
    std::string range;  // "a..b" restriction, empty = all
    uint64_t seed = 0;
    bool pin_anchors = false;
};

struct VariantOutputs {
    pathspace::AveragePath path;
    std::string tag;
};

int cmd_analyze(const fs::path& corpus_dir, const fs::path& embeddings_file,
                const GroupConfigFlags& cfg_flags, const AnalyzeOptions& options,
                const fs::path& out_dir) {
    if (corpus_dir.empty() == embeddings_file.empty())
        throw ValidationError("analyze: provide exactly one of --corpus or --embeddings");

    ManifestBuilder manifest;
    manifest.subcommand = "analyze";
    manifest.out_dir = out_dir;
    const auto cfg = resolve_group_config(cfg_flags, &manifest);
    manifest.config = group_config_json(cfg);
    manifest.config["dims"] = options.dims;
    manifest.config["weighting"] = options.weighting;
    manifest.config["metric"] = options.metric;
    manifest.config["tsp"] = options.tsp;
    manifest.config["restarts"] = options.restarts;
    manifest.config["range"] = options.range;
    manifest.config["pin_anchors"] = options.pin_anchors;
    manifest.seeds["base"] = options.seed;
    const uint64_t shuffle_seed = rng::derive_seed(options.seed, "shuffle");
    const uint64_t tsp_seed = rng::derive_seed(options.seed, "tsp");
    manifest.seeds["shuffle"] = shuffle_seed;
    manifest.seeds["tsp"] = tsp_seed;

    const auto metric = pathspace::parse_metric(options.metric);
    const auto weighting = semantic::parse_weighting(options.weighting);

    // load embeddings either from the corpus via LSA or from an external file
    semantic::EmbeddingSet set;
    corpus::GroupShape shape;
    if (!corpus_dir.empty()) {
        manifest.add_input_dir(corpus_dir);
        warn_dims(options.dims);
        auto [group, report] = corpus::load_group(corpus_dir, cfg);
        manifest.write(out_dir / "validation_report.json", report.to_json());
        set = embed_clamped(group, options.dims, weighting);
        shape = corpus::shape_of(group);
    } else {
        manifest.add_input(embeddings_file);
        const long rows = embedding_file_rows(embeddings_file);
        if (rows % cfg.n_paragraphs != 0)
            throw ValidationError("embedding file rows not divisible by n");
        shape = corpus::GroupShape{static_cast<int>(rows / cfg.n_paragraphs),
                                   cfg.n_paragraphs, cfg.anchor_a, cfg.anchor_b, cfg.label};
        set = semantic::load_external(embeddings_file, shape);
    }

    const int n = shape.n_paragraphs;
    auto [range_a, range_b] =
        options.range.empty() ? std::pair<int, int>{1, n} : parse_range(options.range, n);

    int start = options.start > 0 ? options.start
                                  : (range_a <= shape.anchor_a && shape.anchor_a <= range_b
                                         ? shape.anchor_a
                                         : range_a);
    int end = options.end > 0 ? options.end
                              : (range_a <= shape.anchor_b && shape.anchor_b <= range_b
                                     ? shape.anchor_b
                                     : range_b);
    if (start < range_a || end > range_b || start == end)
        throw ValidationError("analyze: start/end must be distinct positions inside the range");
    manifest.config["start"] = start;
    manifest.config["end"] = end;

    const int m = range_b - range_a + 1;
    const bool use_exact = options.tsp == "exact" ||
                           (options.tsp == "auto" && m <= minpath::kDefaultExactCutoff);
    if (options.tsp != "exact" && options.tsp != "heuristic" && options.tsp != "auto")
        throw ValidationError("analyze: --tsp must be exact, heuristic, or auto");

    const VariantOutputs variants[2] = {
        {pathspace::average_path(set, shape), "ordered"},
        {pathspace::shuffled_average_path(set, shape, shuffle_seed, options.pin_anchors),
         "shuffled"},
    };

    json actions;
    std::map<std::string, runstats::RunReport> reports;
    for (const auto& variant : variants) {
        manifest.write(out_dir / ("average_path_" + variant.tag + ".csv"),
                       pathspace::average_path_csv(variant.path));
        actions["action_" + variant.tag] = pathspace::action(variant.path).value;

        // restrict to the range window for the minimizers
        std::vector<std::vector<double>> points(
            variant.path.points.begin() + (range_a - 1),
            variant.path.points.begin() + range_b);
        const auto dmat = pathspace::distance_matrix(points, metric);

        const auto order =
            use_exact ? minpath::tsp_exact(dmat, start - range_a, end - range_a)
                      : minpath::tsp_heuristic(dmat, start - range_a, end - range_a,
                                               options.restarts, tsp_seed);
        actions["tsp_cost_" + variant.tag] = order.cost.value;

        std::vector<int> local_order;  // permutation of 1..m for run analysis
        std::vector<int> original_order;
        for (int v : order.order) {
            local_order.push_back(v + 1);
            original_order.push_back(v + range_a);
        }
        const auto report = runstats::ordered_runs(local_order);
        manifest.write(out_dir / ("tsp_" + variant.tag + ".csv"),
                       runstats::order_table_csv(original_order, report));
        manifest.write(out_dir / ("run_report_" + variant.tag + ".json"), report.to_json());
        reports.emplace(variant.tag, report);

        const auto tree = minpath::mst(dmat);
        std::vector<std::string> labels;
        for (int v = 0; v < m; ++v) labels.push_back(std::to_string(v + range_a));
        manifest.write(out_dir / ("mst_" + variant.tag + ".dot"),
                       minpath::tree_to_dot(tree, labels));
        manifest.write(out_dir / ("mst_" + variant.tag + "_edges.csv"),
                       minpath::tree_edges_csv(tree));
    }
    actions["metric"] = options.metric;
    actions["tsp_solver"] = use_exact ? "exact" : "heuristic";
    manifest.write(out_dir / "actions.json", actions.dump(2) + "\n");
    manifest.write(out_dir / "comparison.json",
                   runstats::compare_reports(reports.at("ordered"), reports.at("shuffled"))
                       .to_json());
    manifest.finalize();

    std::cout << "analysis bundle written to " << out_dir.string() << "\n";
    return 0;
}

// ------------------------------------------------------------- dimension --

int cmd_dimension(const std::string& series_file, const std::string& text_file,
                  const fs::path& corpus_dir, const GroupConfigFlags& cfg_flags,
                  int narrative_index, bool lorenz_demo, const std::string& m_range_text,
                  int tau, int r_count, int dims, const std::string& weighting_name,
                  uint64_t seed, const fs::path& out_dir) {
    ManifestBuilder manifest;
    manifest.subcommand = "dimension";
    manifest.out_dir = out_dir;
    manifest.seeds["base"] = seed;
    const uint64_t shuffle_seed = rng::derive_seed(seed, "shuffle");
    manifest.seeds["shuffle"] = shuffle_seed;

    takens::DelaySeries series;
    if (lorenz_demo) {
        takens::LorenzParams params;
        params.steps = 21000;
        params.transient = 5000;
        series = takens::lorenz_series(params).x;
        manifest.config["input"] = "lorenz_demo";
    } else if (!series_file.empty()) {
        series = takens::series_from_csv(io::read_file(series_file),
                                         fs::path(series_file).stem().string());
        manifest.add_input(series_file);
        manifest.config["input"] = series_file;
    } else if (!text_file.empty()) {
        // one long text: paragraphs in order form a single-narrative group
        corpus::Narrative narrative;
        narrative.id = fs::path(text_file).stem().string();
        narrative.paragraphs = corpus::split_paragraphs(io::read_file(text_file));
        if (narrative.paragraphs.size() < 2)
            throw ValidationError("dimension: text file has fewer than 2 paragraphs");
        corpus::NarrativeGroup group;
        group.n_paragraphs = static_cast<int>(narrative.paragraphs.size());
        group.anchor_a = 1;
        group.anchor_b = group.n_paragraphs;
        group.narratives.push_back(std::move(narrative));
        const auto set =
            embed_clamped(group, dims, semantic::parse_weighting(weighting_name));
        series = semantic::first_coordinate_series(set, 0, group.narratives[0].id);
        manifest.add_input(text_file);
        manifest.config["input"] = text_file;
        manifest.config["dims"] = dims;
        manifest.config["weighting"] = weighting_name;
    } else if (!corpus_dir.empty()) {
        const auto cfg = resolve_group_config(cfg_flags, &manifest);
        auto [group, report] = corpus::load_group(corpus_dir, cfg);
        if (narrative_index < 0 || narrative_index >= group.size())
            throw ValidationError("dimension: --narrative index out of range");
        const auto set =
            embed_clamped(group, dims, semantic::parse_weighting(weighting_name));
        series = semantic::first_coordinate_series(
            set, narrative_index, group.narratives[static_cast<size_t>(narrative_index)].id);
        manifest.add_input_dir(corpus_dir);
        manifest.config["input"] = corpus_dir.string();
        manifest.config["narrative"] = narrative_index;
        manifest.config["dims"] = dims;
        manifest.config["weighting"] = weighting_name;
    } else {
        throw ValidationError(
            "dimension: provide --series, --text, --corpus, or --lorenz-demo");
    }

    const auto m_range = parse_m_range(m_range_text);
    const int tau_eff = tau > 0 ? tau : takens::first_acf_zero(series);
    manifest.config["m_range"] = m_range_text;
    manifest.config["tau"] = tau_eff;
    manifest.config["r_count"] = r_count;

    // shared radii: built from the ordered series at the largest m
    const int m_max = m_range.back();
    const auto cloud_max = takens::delay_embed(series, m_max, tau_eff);
    const auto radii = takens::default_radii(cloud_max, m_max * tau_eff, r_count);

    const auto ordered = takens::dimension_sweep_at(series, m_range, tau_eff, radii);
    const auto shuffled_series = takens::shuffle_series(series, shuffle_seed);
    const auto shuffled = takens::dimension_sweep_at(shuffled_series, m_range, tau_eff, radii);

    manifest.write(out_dir / "dimension_ordered.csv", takens::dimension_curve_csv(ordered));
    manifest.write(out_dir / "dimension_shuffled.csv", takens::dimension_curve_csv(shuffled));
    manifest.write(out_dir / "series.csv", takens::series_csv(series));
    manifest.finalize();

    std::cout << "dimension curves written to " << out_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"action-principle analysis of ordered vector ensembles"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate a corpus directory");
    std::string ingest_corpus, ingest_out = "out";
    GroupConfigFlags ingest_cfg;
    ingest->add_option("--corpus", ingest_corpus, "directory of .txt narratives")->required();
    add_group_config_flags(ingest, ingest_cfg);
    ingest->add_option("--out", ingest_out, "output directory");

    // embed
    auto* embed = app.add_subcommand("embed", "compute LSA paragraph embeddings");
    std::string embed_corpus, embed_out = "out";
    std::string embed_weighting = "log_entropy";
    int embed_dims = 300;
    GroupConfigFlags embed_cfg;
    embed->add_option("--corpus", embed_corpus, "directory of .txt narratives")->required();
    add_group_config_flags(embed, embed_cfg);
    embed->add_option("--dims", embed_dims, "embedding dimensions");
    embed->add_option("--weighting", embed_weighting, "raw|log_entropy|tfidf");
    embed->add_option("--out", embed_out, "output directory");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic ensemble");
    std::string synth_mode = "bridge", synth_out = "out";
    int synth_n_narratives = 100, synth_n = 20, synth_dims = 50;
    double synth_sigma = 1.0;
    uint64_t synth_seed = 0;
    synth->add_option("--mode", synth_mode, "bridge|text");
    synth->add_option("--N", synth_n_narratives, "ensemble size");
    synth->add_option("--n", synth_n, "path length (paragraphs)");
    synth->add_option("--dims", synth_dims, "embedding dimension (bridge mode)");
    synth->add_option("--sigma", synth_sigma, "per-step noise scale (bridge mode)");
    synth->add_option("--seed", synth_seed, "base seed");
    synth->add_option("--out", synth_out, "output directory");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "full ordered/shuffled path analysis");
    std::string analyze_corpus, analyze_embeddings, analyze_out = "out";
    GroupConfigFlags analyze_cfg;
    AnalyzeOptions analyze_opts;
    analyze->add_option("--corpus", analyze_corpus, "directory of .txt narratives");
    analyze->add_option("--embeddings", analyze_embeddings, "embedding file");
    add_group_config_flags(analyze, analyze_cfg);
    analyze->add_option("--dims", analyze_opts.dims, "LSA dimensions");
    analyze->add_option("--weighting", analyze_opts.weighting, "raw|log_entropy|tfidf");
    analyze->add_option("--metric", analyze_opts.metric, "sq_euclidean|euclidean");
    analyze->add_option("--tsp", analyze_opts.tsp, "exact|heuristic|auto");
    analyze->add_option("--restarts", analyze_opts.restarts, "heuristic restarts");
    analyze->add_option("--start", analyze_opts.start, "path start position (1-based)");
    analyze->add_option("--end", analyze_opts.end, "path end position (1-based)");
    analyze->add_option("--range", analyze_opts.range, "restrict to positions a..b");
    analyze->add_option("--seed", analyze_opts.seed, "base seed");
    analyze->add_flag("--pin-anchors", analyze_opts.pin_anchors,
                      "keep anchor positions fixed when shuffling");
    analyze->add_option("--out", analyze_out, "output directory");

    // dimension
    auto* dimension = app.add_subcommand("dimension", "delay-embedding dimension curves");
    std::string dim_series, dim_text, dim_corpus, dim_m_range = "2..8";
    std::string dim_weighting = "log_entropy", dim_out = "out";
    GroupConfigFlags dim_cfg;
    int dim_narrative = 0, dim_tau = 0, dim_r_count = 40, dim_dims = 300;
    bool dim_lorenz = false;
    uint64_t dim_seed = 0;
    dimension->add_option("--series", dim_series, "single-column CSV series");
    dimension->add_option("--text", dim_text, "single long text file");
    dimension->add_option("--corpus", dim_corpus, "corpus directory");
    add_group_config_flags(dimension, dim_cfg);
    dimension->add_option("--narrative", dim_narrative, "narrative index (corpus mode)");
    dimension->add_flag("--lorenz-demo", dim_lorenz, "use a generated Lorenz X series");
    dimension->add_option("--m-range", dim_m_range, "embedding dimensions a..b");
    dimension->add_option("--tau", dim_tau, "delay in samples (0 = first ACF zero)");
    dimension->add_option("--r-count", dim_r_count, "number of radii");
    dimension->add_option("--dims", dim_dims, "LSA dimensions (text/corpus mode)");
    dimension->add_option("--weighting", dim_weighting, "raw|log_entropy|tfidf");
    dimension->add_option("--seed", dim_seed, "base seed");
    dimension->add_option("--out", dim_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(ingest_corpus, ingest_cfg, ingest_out);
        if (embed->parsed())
            return cmd_embed(embed_corpus, embed_cfg, embed_dims, embed_weighting, embed_out);
        if (synth->parsed())
            return cmd_synth(synth_mode, synth_n_narratives, synth_n, synth_dims, synth_sigma,
                             synth_seed, synth_out);
        if (analyze->parsed())
            return cmd_analyze(analyze_corpus, analyze_embeddings, analyze_cfg, analyze_opts,
                               analyze_out);
        if (dimension->parsed())
            return cmd_dimension(dim_series, dim_text, dim_corpus, dim_cfg, dim_narrative,
                                 dim_lorenz, dim_m_range, dim_tau, dim_r_count, dim_dims,
                                 dim_weighting, dim_seed, dim_out);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
