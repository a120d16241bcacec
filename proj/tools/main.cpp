// Command-line entry point: train / eval / certify / construct / inspect.
// Exit codes: 0 ok, 2 config error, 3 data or checkpoint error, 4 resource
// cap exceeded, 1 internal error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paragram/construct.hpp"
#include "paragram/digest.hpp"
#include "paragram/errors.hpp"
#include "paragram/eval.hpp"
#include "paragram/geometry.hpp"
#include "paragram/kg.hpp"
#include "paragram/model.hpp"
#include "paragram/patterns.hpp"
#include "paragram/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace paragram;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << text;
}

// Every emitted artifact is listed with a content hash; wall time is
// metadata and excluded from the byte-for-byte reproducibility guarantee.
struct Manifest {
    std::string command;
    json config;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, std::string>> artifacts;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    void add_input(const std::string& path) { inputs.emplace_back(path, sha256_file_hex(path)); }
    void add_artifact(const std::string& path) {
        artifacts.emplace_back(path, sha256_file_hex(path));
    }
    void write(const std::string& path) const {
        json j;
        j["command"] = command;
        j["config"] = config;
        j["seed"] = seed;
        j["wall_time_seconds"] = wall_seconds;
        json in = json::array(), out = json::array();
        for (const auto& [p, h] : inputs) in.push_back(json{{"path", p}, {"sha256", h}});
        for (const auto& [p, h] : artifacts) out.push_back(json{{"path", p}, {"sha256", h}});
        j["inputs"] = in;
        j["artifacts"] = out;
        write_file(path, j.dump(2) + "\n");
    }
};

json config_snapshot(const TrainConfig& cfg) {
    return json{{"dim", cfg.dim},
                {"variant", variant_name(cfg.variant)},
                {"learning_rate", cfg.learning_rate},
                {"margin", cfg.margin},
                {"adversarial_temperature", cfg.adversarial_temperature},
                {"negatives_per_positive", cfg.negatives_per_positive},
                {"batch_size", cfg.batch_size},
                {"max_epochs", cfg.max_epochs},
                {"patience_epochs", cfg.patience_epochs},
                {"min_hits10_gain", cfg.min_hits10_gain},
                {"d_min", cfg.d_min},
                {"seed", cfg.seed}};
}

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    TrainConfig cfg = parse_train_config(read_file(config_path));
    std::vector<std::string> warnings;
    KnowledgeGraph kg = load_dataset(data_dir, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

    TrainResult result = train(kg, cfg);
    std::cerr << "training stopped: " << result.stop_reason << " after " << result.log.size()
              << " epoch(s)\n";

    fs::create_directories(out_dir);
    std::string ck_path = out_dir + "/checkpoint.json";
    std::string log_path = out_dir + "/training_log.csv";
    save_checkpoint(result.model, ck_path);
    write_training_log_csv(result.log, log_path);

    Manifest manifest;
    manifest.command = "train";
    manifest.config = config_snapshot(cfg);
    manifest.seed = cfg.seed;
    manifest.add_input(config_path);
    for (const char* name : {"train.txt", "valid.txt", "test.txt"}) {
        std::string p = data_dir + std::string("/") + name;
        if (fs::exists(p)) manifest.add_input(p);
    }
    manifest.add_artifact(ck_path);
    manifest.add_artifact(log_path);
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.write(out_dir + "/manifest.json");
    return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& data_dir,
             const std::string& stratify, const std::string& pattern_file, int steps,
             const std::string& out_path) {
    ModelConfig model = load_checkpoint(checkpoint);
    KnowledgeGraph kg = load_dataset(data_dir);
    model.check_bound_to(kg);
    FilterIndex filter = FilterIndex::build(kg);

    if (stratify == "pattern") {
        if (pattern_file.empty()) throw ConfigError("--stratify pattern needs --patterns FILE");
        std::ifstream in(pattern_file);
        if (!in) throw DataError("cannot open " + pattern_file);
        auto patterns = parse_pattern_file(in, kg);
        json out = json::array();
        for (const GroundPattern& p : patterns) {
            int chase_steps = steps > 0 ? steps : 64;  // fixpoint is reached early anyway
            std::vector<Triple> subset = derive_pattern_testset(kg, p, chase_steps);
            RankingReport report = evaluate_triples(model, kg, filter, subset);
            std::cout << p.text() << ": " << subset.size() << " derived test triples, mrr "
                      << report.mrr << "\n";
            out.push_back(json{{"pattern", p.text()},
                               {"n_triples", subset.size()},
                               {"mrr", report.mrr},
                               {"n_queries", report.n_queries}});
        }
        if (!out_path.empty()) write_file(out_path, out.dump(2) + "\n");
        return 0;
    }

    RankingReport report = evaluate(model, kg, filter, Split::Test);
    std::cout << report_to_table(report);
    if (stratify == "cardinality") {
        for (std::uint32_t r = 0; r < kg.n_relations(); ++r) {
            try {
                CardinalityClass c = classify_relation_cardinality(kg, r);
                std::cout << "class[" << kg.relations[r] << "] = " << cardinality_name(c.tag)
                          << " (mu_rt " << c.mu_rt << ", mu_rh " << c.mu_rh << ")\n";
            } catch (const DataError&) {
                std::cout << "class[" << kg.relations[r] << "] = unclassified\n";
            }
        }
    }
    if (!out_path.empty()) write_file(out_path, report_to_json(report));
    return 0;
}

int cmd_certify(const std::string& checkpoint, const std::string& relations, double slack,
                double domain_bound, const std::string& out_path) {
    ModelConfig model = load_checkpoint(checkpoint);
    CertifyOptions opts;
    opts.slack = slack;
    opts.domain_bound = domain_bound;
    if (!relations.empty()) {
        std::istringstream in(relations);
        std::string name;
        while (std::getline(in, name, ',')) {
            bool found = false;
            for (std::uint32_t r = 0; r < model.n_relations(); ++r)
                if (model.relation_ids[r] == name) {
                    opts.relations.push_back(r);
                    found = true;
                }
            if (!found) throw DataError("relation `" + name + "` not in checkpoint");
        }
    }
    auto certs = certify_patterns(model, opts);
    std::string text = certificates_to_json(certs);
    if (!out_path.empty())
        write_file(out_path, text);
    else
        std::cout << text;
    std::cerr << certs.size() << " certified pattern(s)\n";
    return 0;  // certification is a report, not a test
}

int cmd_construct(const std::string& graph_path, const std::string& out_path, std::size_t cap,
                  double margin) {
    KnowledgeGraph kg;
    {
        std::ifstream in(graph_path);
        if (!in) throw DataError("cannot open " + graph_path);
        parse_triples(in, graph_path, Split::Train, kg);
    }
    BuildOptions opts;
    opts.cap = cap;
    opts.margin = margin;
    ModelConfig model = build_capturing_model(kg, opts);

    // Exhaustive verification scan over all |E|^2 * |R| triples.
    bool exact = true;
    std::size_t checked = 0;
    for (std::uint32_t r = 0; r < kg.n_relations() && exact; ++r)
        for (std::uint32_t h = 0; h < kg.n_entities() && exact; ++h)
            for (std::uint32_t t = 0; t < kg.n_entities() && exact; ++t) {
                ++checked;
                if (is_true(model, Triple{h, r, t}) != kg.known(Triple{h, r, t})) exact = false;
            }
    save_checkpoint(model, out_path);

    json report{{"exact", exact},
                {"dim", model.dim},
                {"entities", kg.n_entities()},
                {"relations", kg.n_relations()},
                {"triples", kg.train.size()},
                {"checked", checked}};
    std::cout << report.dump(2) << "\n";
    return exact ? 0 : 1;
}

int cmd_inspect(const std::string& data_dir, const std::string& checkpoint) {
    if (!checkpoint.empty()) {
        ModelConfig model = load_checkpoint(checkpoint);
        std::cout << "checkpoint: dim " << model.dim << ", variant "
                  << variant_name(model.variant) << ", " << model.n_entities() << " entities, "
                  << model.n_relations() << " relations\n";
    }
    if (!data_dir.empty()) {
        std::vector<std::string> warnings;
        KnowledgeGraph kg = load_dataset(data_dir, &warnings);
        std::cout << "dataset: " << kg.n_entities() << " entities, " << kg.n_relations()
                  << " relations, " << kg.train.size() << " train / " << kg.valid.size()
                  << " valid / " << kg.test.size() << " test triples";
        if (!warnings.empty()) std::cout << " (" << warnings.size() << " duplicate lines dropped)";
        std::cout << "\n";
        for (std::uint32_t r = 0; r < kg.n_relations(); ++r) {
            try {
                CardinalityClass c = classify_relation_cardinality(kg, r);
                std::cout << "  " << kg.relations[r] << ": " << cardinality_name(c.tag)
                          << " (mu_rt " << c.mu_rt << ", mu_rh " << c.mu_rh << ")\n";
            } catch (const DataError&) {
                std::cout << "  " << kg.relations[r] << ": no train triples\n";
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph embeddings with relations as hyper-parallelograms"};
    app.require_subcommand(1);

    auto* train_cmd = app.add_subcommand("train", "Train a model");
    std::string config_path, data_dir, out_dir;
    train_cmd->add_option("--config", config_path, "TrainConfig JSON or key=value file")
        ->required();
    train_cmd->add_option("--data", data_dir, "Dataset directory (train/valid/test .txt)")
        ->required();
    train_cmd->add_option("--out", out_dir, "Output directory")->required();

    auto* eval_cmd = app.add_subcommand("eval", "Filtered-ranking evaluation");
    std::string checkpoint, stratify = "relation", pattern_file, report_out;
    int steps = 0;
    eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint JSON")->required();
    eval_cmd->add_option("--data", data_dir, "Dataset directory")->required();
    eval_cmd->add_option("--stratify", stratify, "relation|cardinality|pattern");
    eval_cmd->add_option("--patterns", pattern_file, "Pattern file for --stratify pattern");
    eval_cmd->add_option("--steps", steps, "Forward-chaining steps (0 = fixpoint)");
    eval_cmd->add_option("--out", report_out, "Write the report JSON here");

    auto* certify_cmd = app.add_subcommand("certify", "Certify captured inference patterns");
    std::string relations;
    double slack = 0.0, domain_bound = 0.0;
    certify_cmd->add_option("--checkpoint", checkpoint, "Checkpoint JSON")->required();
    certify_cmd->add_option("--relations", relations, "Comma-separated relation subset");
    certify_cmd->add_option("--slack", slack, "Geometric slack for near-captures");
    certify_cmd->add_option("--domain-bound", domain_bound,
                            "Bound of the entity universe (0 = unbounded)");
    certify_cmd->add_option("--out", report_out, "Write certificates JSON here");

    auto* construct_cmd = app.add_subcommand("construct", "Build an exact capture of a graph");
    std::string graph_path, construct_out;
    std::size_t cap = 64;
    double margin = 0.5;
    construct_cmd->add_option("--graph", graph_path, "TSV triple file")->required();
    construct_cmd->add_option("--out", construct_out, "Checkpoint output path")->required();
    construct_cmd->add_option("--cap", cap, "Guard on |E|*|R|");
    construct_cmd->add_option("--margin", margin, "Entity separation margin");

    auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a dataset or checkpoint");
    inspect_cmd->add_option("--data", data_dir, "Dataset directory");
    inspect_cmd->add_option("--checkpoint", checkpoint, "Checkpoint JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(config_path, data_dir, out_dir);
        if (eval_cmd->parsed())
            return cmd_eval(checkpoint, data_dir, stratify, pattern_file, steps, report_out);
        if (certify_cmd->parsed())
            return cmd_certify(checkpoint, relations, slack, domain_bound, report_out);
        if (construct_cmd->parsed()) return cmd_construct(graph_path, construct_out, cap, margin);
        if (inspect_cmd->parsed()) return cmd_inspect(data_dir, checkpoint);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CapError& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
