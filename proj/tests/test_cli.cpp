#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <sys/wait.h>

#include "narrdyn/io.hpp"

namespace fs = std::filesystem;
using narrdyn::io::read_file;

namespace {

int run_cli(const std::string& args) {
    const std::string command =
        std::string(NARRDYN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / ("narrdyn_cli_" + name);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::map<std::string, std::string> bundle_contents(const fs::path& dir) {
    std::map<std::string, std::string> contents;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            contents[fs::relative(entry.path(), dir).string()] = read_file(entry.path());
    return contents;
}

}  // namespace

TEST_CASE("synth text round-trips through ingest with zero rejects") {
    TempDir dir("roundtrip");
    const auto synth_out = dir.path / "synth";
    REQUIRE(run_cli("synth --mode text --N 12 --n 5 --seed 3 --out " + synth_out.string()) == 0);
    REQUIRE(fs::exists(synth_out / "corpus"));
    REQUIRE(fs::exists(synth_out / "group_config.json"));

    const auto ingest_out = dir.path / "ingest";
    REQUIRE(run_cli("ingest --corpus " + (synth_out / "corpus").string() + " --group-config " +
                    (synth_out / "group_config.json").string() + " --out " +
                    ingest_out.string()) == 0);
    const auto report = read_file(ingest_out / "validation_report.json");
    CHECK(report.find("\"accepted\": 12") != std::string::npos);

    SUBCASE("same seed reproduces the corpus byte for byte") {
        const auto synth_out2 = dir.path / "synth2";
        REQUIRE(run_cli("synth --mode text --N 12 --n 5 --seed 3 --out " +
                        synth_out2.string()) == 0);
        CHECK(bundle_contents(synth_out / "corpus") == bundle_contents(synth_out2 / "corpus"));
    }
}

TEST_CASE("analyze produces a deterministic bundle") {
    TempDir dir("analyze");
    const auto synth_out = dir.path / "synth";
    REQUIRE(run_cli("synth --mode bridge --N 40 --n 10 --dims 6 --sigma 0.8 --seed 11 --out " +
                    synth_out.string()) == 0);

    const std::string analyze_args = "analyze --embeddings " +
                                     (synth_out / "embeddings.txt").string() +
                                     " --group-config " +
                                     (synth_out / "group_config.json").string() +
                                     " --seed 5 --out ";
    const auto out_a = dir.path / "bundle_a";
    const auto out_b = dir.path / "bundle_b";
    REQUIRE(run_cli(analyze_args + out_a.string()) == 0);
    REQUIRE(run_cli(analyze_args + out_b.string()) == 0);

    const auto a = bundle_contents(out_a);
    const auto b = bundle_contents(out_b);
    CHECK(a == b);

    // the expected artifact set
    for (const char* name :
         {"average_path_ordered.csv", "average_path_shuffled.csv", "actions.json",
          "tsp_ordered.csv", "tsp_shuffled.csv", "mst_ordered.dot", "mst_ordered_edges.csv",
          "mst_shuffled.dot", "mst_shuffled_edges.csv", "run_report_ordered.json",
          "run_report_shuffled.json", "comparison.json", "manifest.json"})
        CHECK(a.count(name) == 1);

    SUBCASE("noiseless bridge recovers the identity order") {
        const auto clean = dir.path / "clean";
        REQUIRE(run_cli("synth --mode bridge --N 10 --n 8 --dims 4 --sigma 0 --seed 2 --out " +
                        clean.string()) == 0);
        const auto out = dir.path / "clean_bundle";
        REQUIRE(run_cli("analyze --embeddings " + (clean / "embeddings.txt").string() +
                        " --group-config " + (clean / "group_config.json").string() +
                        " --seed 1 --out " + out.string()) == 0);
        const auto tsp = read_file(out / "tsp_ordered.csv");
        CHECK(tsp.substr(0, tsp.find('\n')) == "1,2,3,4,5,6,7,8");
        const auto run_report = read_file(out / "run_report_ordered.json");
        CHECK(run_report.find("\"prefix_run\": 8") != std::string::npos);
    }
}

TEST_CASE("analyze respects range restriction") {
    TempDir dir("range");
    const auto synth_out = dir.path / "synth";
    REQUIRE(run_cli("synth --mode bridge --N 10 --n 12 --dims 4 --sigma 0 --seed 4 --out " +
                    synth_out.string()) == 0);
    const auto out = dir.path / "bundle";
    REQUIRE(run_cli("analyze --embeddings " + (synth_out / "embeddings.txt").string() +
                    " --group-config " + (synth_out / "group_config.json").string() +
                    " --range 3..9 --seed 1 --out " + out.string()) == 0);
    const auto tsp = read_file(out / "tsp_ordered.csv");
    CHECK(tsp.substr(0, tsp.find('\n')) == "3,4,5,6,7,8,9");
}

TEST_CASE("exit codes distinguish failure classes") {
    TempDir dir("errors");

    // validation failure: nonsense flags combination
    CHECK(run_cli("analyze --seed 1 --out " + (dir.path / "x").string()) == 2);

    // io failure: unreadable corpus directory
    CHECK(run_cli("ingest --corpus /no/such/dir --n 5 --anchor-a 1 --anchor-b 5 --out " +
                  (dir.path / "y").string()) == 4);

    // validation failure: corrupt narrative directory (all rejected)
    const auto bad_corpus = dir.path / "bad";
    fs::create_directories(bad_corpus);
    narrdyn::io::write_file(bad_corpus / "only.txt", "too short\n");
    CHECK(run_cli("ingest --corpus " + bad_corpus.string() +
                  " --n 5 --anchor-a 1 --anchor-b 5 --out " + (dir.path / "z").string()) == 2);

    // unknown flag
    CHECK(run_cli("analyze --definitely-not-a-flag") == 2);
}

TEST_CASE("timing: synth and analyze stay within budget") {
    TempDir dir("timing");
    const auto synth_out = dir.path / "synth";

    auto t0 = std::chrono::steady_clock::now();
    REQUIRE(run_cli("synth --mode bridge --N 500 --n 20 --dims 50 --sigma 0.42 --seed 9 --out " +
                    synth_out.string()) == 0);
    const double synth_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(synth_s < 10.0);

    t0 = std::chrono::steady_clock::now();
    REQUIRE(run_cli("analyze --embeddings " + (synth_out / "embeddings.txt").string() +
                    " --group-config " + (synth_out / "group_config.json").string() +
                    " --tsp exact --seed 9 --out " + (dir.path / "bundle").string()) == 0);
    const double analyze_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(analyze_s < 60.0);  // n=20 including the exact solver
}

TEST_CASE("dimension handles a long plain text") {
    TempDir dir("longtext");
    // a long many-paragraph document with slowly drifting vocabulary
    std::string text;
    for (int paragraph = 0; paragraph < 600; ++paragraph) {
        for (int w = 0; w < 14; ++w)
            text += "word" + std::to_string((paragraph + w * 7) % 60) + " ";
        text += "spice" + std::to_string(paragraph % 13) + " ";
        text += "filler" + std::to_string((paragraph * 3) % 11) + "\n\n";
    }
    const auto file = dir.path / "long.txt";
    narrdyn::io::write_file(file, text);

    const auto out = dir.path / "curves";
    REQUIRE(run_cli("dimension --text " + file.string() +
                    " --m-range 2..3 --tau 2 --dims 10 --seed 1 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "dimension_ordered.csv"));
    CHECK(fs::exists(out / "dimension_shuffled.csv"));
    CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("dimension subcommand emits paired curves") {
    TempDir dir("dimension");
    const auto out = dir.path / "curves";
    REQUIRE(run_cli("dimension --lorenz-demo --m-range 2..3 --tau 20 --seed 1 --out " +
                    out.string()) == 0);
    const auto ordered = read_file(out / "dimension_ordered.csv");
    const auto shuffled = read_file(out / "dimension_shuffled.csv");
    CHECK(ordered.find("m,d2,r_min,r_max,r_squared\n") == 0);
    CHECK(std::count(ordered.begin(), ordered.end(), '\n') == 3);
    CHECK(std::count(shuffled.begin(), shuffled.end(), '\n') == 3);

    SUBCASE("single-m range gives single-row curves") {
        const auto single = dir.path / "single";
        REQUIRE(run_cli("dimension --lorenz-demo --m-range 2..2 --tau 20 --seed 1 --out " +
                        single.string()) == 0);
        const auto csv = read_file(single / "dimension_ordered.csv");
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
    }
}
