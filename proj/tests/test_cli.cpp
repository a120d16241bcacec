#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "paragram/digest.hpp"
#include "support/paths.hpp"

#ifndef PARAGRAM_CLI_PATH
#define PARAGRAM_CLI_PATH "paragram"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(PARAGRAM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path dir;
    explicit TempDir(const std::string& name) : dir(fs::temp_directory_path() / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string str() const { return dir.string(); }
};

void write(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// Small two-relation dataset with a symmetric structure.
void write_toy_dataset(const fs::path& dir) {
    write(dir / "train.txt",
          "a\tr\tb\nb\tr\ta\nc\tr\td\nd\tr\tc\na\ts\tc\nb\ts\td\nc\ts\ta\n");
    write(dir / "valid.txt", "a\tr\tc\n");
    write(dir / "test.txt", "b\tr\td\nd\ts\tb\n");
}

}  // namespace

TEST_CASE("train writes checkpoint, log and manifest; reruns are byte-identical") {
    TempDir data("paragram_cli_data");
    TempDir out1("paragram_cli_out1");
    TempDir out2("paragram_cli_out2");
    write_toy_dataset(data.dir);
    write(data.dir / "config.json",
          R"({"dim": 4, "max_epochs": 12, "patience_epochs": 12, "batch_size": 4,
             "negatives_per_positive": 4, "learning_rate": 0.05, "seed": 3})");

    std::string base = "train --config " + (data.dir / "config.json").string() + " --data " +
                       data.str();
    REQUIRE(run(base + " --out " + out1.str()) == 0);
    REQUIRE(run(base + " --out " + out2.str()) == 0);

    CHECK(fs::exists(out1.dir / "checkpoint.json"));
    CHECK(fs::exists(out1.dir / "training_log.csv"));
    CHECK(fs::exists(out1.dir / "manifest.json"));

    // Log has a header plus at most max_epochs rows.
    std::istringstream log(slurp(out1.dir / "training_log.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(log, line))
        if (!line.empty()) ++rows;
    CHECK(rows >= 1);
    CHECK(rows <= 12);

    // Same seed: byte-identical checkpoints; logs identical up to wall time.
    CHECK(slurp(out1.dir / "checkpoint.json") == slurp(out2.dir / "checkpoint.json"));
    auto strip_wall = [](const std::string& csv) {
        std::istringstream in(csv);
        std::string row, out;
        while (std::getline(in, row)) out += row.substr(0, row.rfind(',')) + "\n";
        return out;
    };
    CHECK(strip_wall(slurp(out1.dir / "training_log.csv")) ==
          strip_wall(slurp(out2.dir / "training_log.csv")));

    // Manifest artifacts exist and hash-match.
    json manifest = json::parse(slurp(out1.dir / "manifest.json"));
    for (const auto& artifact : manifest.at("artifacts")) {
        std::string path = artifact.at("path").get<std::string>();
        CHECK(fs::exists(path));
        CHECK(paragram::sha256_file_hex(path) == artifact.at("sha256").get<std::string>());
    }
}

TEST_CASE("invalid config key exits with code 2 and names the key") {
    TempDir data("paragram_cli_badcfg");
    write_toy_dataset(data.dir);
    write(data.dir / "config.json", R"({"learning_rte": 0.1})");
    int code = run("train --config " + (data.dir / "config.json").string() + " --data " +
                   data.str() + " --out " + data.str() + "/out");
    CHECK(code == 2);
}

TEST_CASE("eval of a constructed model on its own graph gives mrr 1") {
    TempDir data("paragram_cli_eval");
    // Construct sees all triples; the dataset splits them train/test with the
    // same first-appearance vocabulary order.
    write(data.dir / "train.txt", "a\tr\tb\nb\tr\tc\nc\tr\ta\n");
    write(data.dir / "test.txt", "a\tr\tc\n");
    write(data.dir / "all.tsv", "a\tr\tb\nb\tr\tc\nc\tr\ta\na\tr\tc\n");

    std::string ck = (data.dir / "ck.json").string();
    REQUIRE(run("construct --graph " + (data.dir / "all.tsv").string() + " --out " + ck) == 0);
    std::string report = (data.dir / "report.json").string();
    REQUIRE(run("eval --checkpoint " + ck + " --data " + data.str() + " --out " + report) == 0);
    json j = json::parse(slurp(report));
    CHECK(j.at("mrr").get<double>() == doctest::Approx(1.0));
    CHECK(j.at("per_relation").size() == 1);
}

TEST_CASE("eval rejects a checkpoint with mismatched vocabulary") {
    TempDir data("paragram_cli_mismatch");
    write_toy_dataset(data.dir);
    int code = run("eval --checkpoint " + fixture_path("intersection.json") + " --data " +
                   data.str());
    CHECK(code == 3);
}

TEST_CASE("eval stratified by pattern derives per-pattern test sets") {
    TempDir data("paragram_cli_pattern");
    write(data.dir / "train.txt", "a\tr\tb\nb\tr\tc\nc\tr\ta\n");
    write(data.dir / "test.txt", "b\tr\ta\n");
    write(data.dir / "all.tsv", "a\tr\tb\nb\tr\tc\nc\tr\ta\nb\tr\ta\n");
    write(data.dir / "patterns.txt", "r(Y,X) => r(X,Y)\n");
    std::string ck = (data.dir / "ck.json").string();
    REQUIRE(run("construct --graph " + (data.dir / "all.tsv").string() + " --out " + ck) == 0);
    std::string out = (data.dir / "per_pattern.json").string();
    REQUIRE(run("eval --checkpoint " + ck + " --data " + data.str() +
                " --stratify pattern --patterns " + (data.dir / "patterns.txt").string() +
                " --out " + out) == 0);
    json j = json::parse(slurp(out));
    REQUIRE(j.size() == 1);
    CHECK(j[0].at("n_triples").get<int>() == 1);
}

TEST_CASE("certify emits a general-composition certificate for the fixture") {
    TempDir data("paragram_cli_certify");
    std::string out = (data.dir / "certs.json").string();
    REQUIRE(run("certify --checkpoint " + fixture_path("general_composition.json") + " --out " +
                out) == 0);
    json certs = json::parse(slurp(out));
    bool found = false;
    for (const auto& c : certs)
        if (c.at("pattern") == "general-composition") found = true;
    CHECK(found);
}

TEST_CASE("construct exit codes: ok, cap exceeded, empty graph") {
    TempDir data("paragram_cli_construct");
    write(data.dir / "g.tsv", "a\tr\tb\nb\tr\tc\n");
    CHECK(run("construct --graph " + (data.dir / "g.tsv").string() + " --out " +
              (data.dir / "ok.json").string()) == 0);
    CHECK(run("construct --graph " + (data.dir / "g.tsv").string() + " --cap 2 --out " +
              (data.dir / "cap.json").string()) == 4);
    write(data.dir / "empty.tsv", "");
    CHECK(run("construct --graph " + (data.dir / "empty.tsv").string() + " --out " +
              (data.dir / "empty.json").string()) == 0);
}

TEST_CASE("inspect summarizes datasets and checkpoints") {
    TempDir data("paragram_cli_inspect");
    write_toy_dataset(data.dir);
    CHECK(run("inspect --data " + data.str()) == 0);
    CHECK(run("inspect --checkpoint " + fixture_path("intersection.json")) == 0);
    CHECK(run("inspect --checkpoint /nonexistent.json") == 3);
}

TEST_CASE("random checkpoint certifies no equality-based pattern at slack 0") {
    TempDir data("paragram_cli_random");
    // Random continuous parameters: region equalities are measure-zero.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(-1.0, 1.0), width(0.1, 0.8);
    json ck;
    ck["format_version"] = 1;
    ck["dim"] = 2;
    ck["variant"] = "base";
    ck["entity_ids"] = std::vector<std::string>{"a", "b"};
    ck["relation_ids"] = std::vector<std::string>{"r0", "r1", "r2"};
    ck["entities"] = std::vector<std::vector<double>>{{0.0, 0.0}, {0.0, 0.0}};
    json rels = json::array();
    for (int r = 0; r < 3; ++r) {
        json rel;
        rel["c_h"] = std::vector<double>{val(rng), val(rng)};
        rel["c_t"] = std::vector<double>{val(rng), val(rng)};
        rel["d_h"] = std::vector<double>{width(rng), width(rng)};
        rel["d_t"] = std::vector<double>{width(rng), width(rng)};
        rel["r_h"] = std::vector<double>{val(rng), val(rng)};
        rel["r_t"] = std::vector<double>{val(rng), val(rng)};
        rels.push_back(rel);
    }
    ck["relations"] = rels;
    write(data.dir / "random.json", ck.dump());
    std::string out = (data.dir / "certs.json").string();
    REQUIRE(run("certify --checkpoint " + (data.dir / "random.json").string() + " --out " + out) ==
            0);
    json certs = json::parse(slurp(out));
    for (const auto& c : certs) {
        CHECK(c.at("pattern") != "symmetry");
        CHECK(c.at("pattern") != "inversion");
        CHECK(c.at("pattern") != "compositional-definition");
    }
}

TEST_CASE("eval stratified by relation reports one row per relation") {
    TempDir data("paragram_cli_tworel");
    write(data.dir / "train.txt", "a\tr\tb\nb\ts\tc\n");
    write(data.dir / "test.txt", "b\tr\ta\nc\ts\tb\n");
    write(data.dir / "all.tsv", "a\tr\tb\nb\ts\tc\nb\tr\ta\nc\ts\tb\n");
    std::string ck = (data.dir / "ck.json").string();
    REQUIRE(run("construct --graph " + (data.dir / "all.tsv").string() + " --out " + ck) == 0);
    std::string report = (data.dir / "report.json").string();
    REQUIRE(run("eval --checkpoint " + ck + " --data " + data.str() + " --out " + report) == 0);
    json j = json::parse(slurp(report));
    CHECK(j.at("per_relation").size() == 2);
}
