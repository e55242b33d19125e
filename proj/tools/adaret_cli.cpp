// SPDX-License-Identifier: Apache-2.0
// Command-line front end: dataset preparation, training, evaluation and
// experiment drivers.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adaret/data/batches.hpp"
#include "adaret/data/interactions.hpp"
#include "adaret/data/split.hpp"
#include "adaret/data/synthetic.hpp"
#include "adaret/engine/checkpoint.hpp"
#include "adaret/engine/retrieval.hpp"
#include "adaret/engine/trainer.hpp"
#include "adaret/eval/evaluate.hpp"
#include "adaret/eval/sweep.hpp"

namespace fs = std::filesystem;
using namespace adaret;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    bool quiet = false;
};

struct InputOptions {
    std::string path;
    std::string delimiter = "tab";
    bool header = false;
    std::optional<std::int64_t> min_timestamp;
    std::size_t min_count = 5;
    bool no_filter = false;
};

config::TrainConfig resolve_config(const Globals& g) {
    config::TrainConfig cfg;
    if (!g.config_path.empty()) cfg = config::load_config(g.config_path);
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        config::set_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed) cfg.seed = *g.seed;
    cfg.validate();
    return cfg;
}

data::InteractionLog read_log(const InputOptions& in) {
    data::LoadOptions opts;
    if (in.delimiter == "tab") {
        opts.delimiter = '\t';
    } else if (in.delimiter == "comma") {
        opts.delimiter = ',';
    } else {
        throw ConfigError("--delimiter must be tab or comma");
    }
    opts.header = in.header;
    opts.min_timestamp = in.min_timestamp;
    auto log = data::load_interactions(in.path, opts);
    return in.no_filter ? log : data::kcore_filter(log, in.min_count);
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.path, "Interaction file (user, item, timestamp)")->required();
    cmd->add_option("--delimiter", in.delimiter, "Field separator: tab or comma")->capture_default_str();
    cmd->add_flag("--header", in.header, "Skip the first line");
    cmd->add_option("--min-timestamp", in.min_timestamp, "Drop records before this timestamp");
    cmd->add_option("--min-count", in.min_count, "k-core threshold for users and items")->capture_default_str();
    cmd->add_flag("--no-filter", in.no_filter, "Skip k-core filtering");
}

data::Phase parse_split(const std::string& s) {
    if (s == "valid") return data::Phase::valid;
    if (s == "test") return data::Phase::test;
    throw ConfigError("--split must be valid or test");
}

void append_line(const fs::path& path, const std::string& line) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot write " + path.string());
    out << line << '\n';
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive multi-round retrieval for sequential recommendation"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "key = value configuration file");
    app.add_option("--seed", g.seed, "Random seed (overrides the config)");
    app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--set", g.overrides, "Config override key=value (repeatable)");
    app.add_flag("--quiet", g.quiet, "Suppress progress output");

    InputOptions input;
    std::string dataset_path, checkpoint_path, split_name = "test", label, rounds_csv, lambdas_csv;
    std::optional<int> k_override;
    std::vector<std::string> users;

    auto* prepare = app.add_subcommand("prepare", "Ingest, filter and split an interaction file");
    add_input_options(prepare, input);

    auto* stats = app.add_subcommand("stats", "Print dataset statistics as JSON");
    add_input_options(stats, input);

    auto* pretrain = app.add_subcommand("pretrain", "Train the sequence encoder alone");
    pretrain->add_option("--data", dataset_path, "Prepared dataset (dataset.json)")->required();

    auto* finetune = app.add_subcommand("finetune", "Train encoder and adapters from a pretrained checkpoint");
    finetune->add_option("--data", dataset_path, "Prepared dataset")->required();
    finetune->add_option("--checkpoint", checkpoint_path, "Pretrained checkpoint directory")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Leave-one-out evaluation of a checkpoint");
    evaluate->add_option("--data", dataset_path, "Prepared dataset")->required();
    evaluate->add_option("--checkpoint", checkpoint_path, "Checkpoint directory")->required();
    evaluate->add_option("--split", split_name, "valid or test")->capture_default_str();
    evaluate->add_option("--k", k_override, "Cutoff K (defaults to eval_k)");
    evaluate->add_option("--label", label, "Label stored in the report");

    auto* recommend = app.add_subcommand("recommend", "Print top-K items for users");
    recommend->add_option("--data", dataset_path, "Prepared dataset")->required();
    recommend->add_option("--checkpoint", checkpoint_path, "Checkpoint directory")->required();
    recommend->add_option("--user", users, "Raw user id (repeatable)")->required();
    recommend->add_option("--k", k_override, "Number of items (defaults to eval_k)");

    auto* sweep = app.add_subcommand("sweep", "Finetune and evaluate over a T x lambda grid");
    sweep->add_option("--data", dataset_path, "Prepared dataset")->required();
    sweep->add_option("--checkpoint", checkpoint_path, "Pretrained checkpoint directory")->required();
    sweep->add_option("--rounds", rounds_csv, "Comma-separated T values (default 3..8)");
    sweep->add_option("--lambdas", lambdas_csv, "Comma-separated lambda values (default 0.1..0.9 step 0.2)");
    sweep->add_option("--split", split_name, "valid or test")->capture_default_str();

    auto* ablate = app.add_subcommand("ablate", "Run the seven component-removal variants");
    ablate->add_option("--data", dataset_path, "Prepared dataset")->required();
    ablate->add_option("--checkpoint", checkpoint_path, "Pretrained checkpoint directory")->required();
    ablate->add_option("--split", split_name, "valid or test")->capture_default_str();

    std::string synth_kind = "clusters", synth_output;
    std::size_t synth_users = 1000, synth_items = 20, synth_length = 12;
    auto* synth = app.add_subcommand("synth", "Write a synthetic interaction file");
    synth->add_option("--kind", synth_kind, "cycle or clusters")->capture_default_str();
    synth->add_option("--output", synth_output, "Destination TSV")->required();
    synth->add_option("--users", synth_users, "Number of users")->capture_default_str();
    synth->add_option("--items", synth_items, "cycle: ring size; clusters: items per cluster")->capture_default_str();
    synth->add_option("--length", synth_length, "cycle: interactions per user")->capture_default_str();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    auto progress = [&](const std::string& msg) {
        if (!g.quiet) std::cerr << msg << '\n';
    };
    auto epoch_logger = [&](int epoch, double loss, double hr) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "epoch %d loss %.6f valid_hr %.4f", epoch, loss, hr);
        progress(buf);
    };

    try {
        const fs::path out_dir(g.out_dir);
        if (prepare->parsed()) {
            const auto log = read_log(input);
            const auto split = data::build_split(log);
            fs::create_directories(out_dir);
            data::save_split(split, out_dir / "dataset.json");
            std::cout << data::stats_json(data::stats(log)) << '\n';
        } else if (stats->parsed()) {
            std::cout << data::stats_json(data::stats(read_log(input))) << '\n';
        } else if (synth->parsed()) {
            data::InteractionLog log;
            if (synth_kind == "cycle") {
                log = data::cycle_log(synth_users, synth_items, synth_length, g.seed.value_or(1));
            } else if (synth_kind == "clusters") {
                data::TwoClusterOptions o;
                o.users = synth_users;
                o.cluster_size = synth_items;
                o.seed = g.seed.value_or(1);
                log = data::two_cluster_log(o);
            } else {
                throw ConfigError("--kind must be cycle or clusters");
            }
            data::write_interactions(log, synth_output);
        } else if (pretrain->parsed()) {
            const auto cfg = resolve_config(g);
            const auto split = data::load_split(dataset_path);
            auto outcome = engine::pretrain(split.dataset, cfg, epoch_logger);
            const auto dir = out_dir / "pretrained";
            engine::save_checkpoint(outcome.model.to_checkpoint("pretrained", outcome.history.best_epoch), dir);
            progress("best epoch " + std::to_string(outcome.history.best_epoch) + ", checkpoint " + dir.string());
        } else if (finetune->parsed()) {
            const auto cfg = resolve_config(g);
            const auto split = data::load_split(dataset_path);
            const auto base = engine::load_checkpoint(checkpoint_path);
            auto outcome = engine::finetune(split.dataset, base, cfg, epoch_logger);
            const auto dir = out_dir / "finetuned";
            engine::save_checkpoint(outcome.model.to_checkpoint("finetuned", outcome.history.best_epoch), dir);
            progress("best epoch " + std::to_string(outcome.history.best_epoch) + ", checkpoint " + dir.string());
        } else if (evaluate->parsed()) {
            const auto split = data::load_split(dataset_path);
            const auto ckpt = engine::load_checkpoint(checkpoint_path);
            const auto model = engine::Model::from_checkpoint(ckpt);
            auto spec = eval::EvalSpec::from_config(ckpt.config);
            if (ckpt.phase == "pretrained") {
                spec.rounds = 1;
                spec.toggles = config::AdapterToggles::all_off();
            }
            if (k_override) spec.k = static_cast<std::size_t>(*k_override);
            auto report = eval::evaluate(model, split.dataset, parse_split(split_name), spec);
            report.label = label;
            report.epoch = ckpt.epoch;
            const auto line = eval::to_json_line(report);
            fs::create_directories(out_dir);
            append_line(out_dir / "report.jsonl", line);
            std::cout << line << '\n';
        } else if (recommend->parsed()) {
            const auto split = data::load_split(dataset_path);
            const auto ckpt = engine::load_checkpoint(checkpoint_path);
            const auto model = engine::Model::from_checkpoint(ckpt);
            engine::RetrievalSpec spec{static_cast<std::size_t>(k_override.value_or(ckpt.config.eval_k)),
                                       ckpt.config.rounds, ckpt.config.toggles};
            if (ckpt.phase == "pretrained") {
                spec.rounds = 1;
                spec.toggles = config::AdapterToggles::all_off();
            }
            for (const auto& raw : users) {
                const auto& seq = split.dataset.users.at(split.vocab.user_id(raw));
                auto history = data::full_history(seq);
                history.pop_back();  // everything up to the held-out test item
                const auto result = engine::retrieve(model, history, history, spec);
                std::cout << raw;
                for (std::size_t i = 0; i < result.items.size(); ++i) {
                    std::cout << '\t' << split.vocab.item_raw[static_cast<std::size_t>(result.items[i])] << ':'
                              << result.rounds[i];
                }
                std::cout << '\n';
            }
        } else if (sweep->parsed()) {
            const auto cfg = resolve_config(g);
            const auto split = data::load_split(dataset_path);
            const auto base = engine::load_checkpoint(checkpoint_path);
            eval::SweepGrid grid;
            if (!rounds_csv.empty()) {
                grid.rounds.clear();
                for (const auto& s : split_csv(rounds_csv)) grid.rounds.push_back(std::stoi(s));
            }
            if (!lambdas_csv.empty()) {
                grid.lambdas.clear();
                for (const auto& s : split_csv(lambdas_csv)) grid.lambdas.push_back(std::stod(s));
            }
            const auto rows = eval::sweep(split.dataset, base, grid, cfg, parse_split(split_name),
                                          [](const std::string& w) { std::cerr << "warning: " << w << '\n'; });
            fs::create_directories(out_dir);
            std::ofstream(out_dir / "sweep.csv") << eval::sweep_csv(rows);
            std::cout << eval::sweep_csv(rows);
        } else if (ablate->parsed()) {
            const auto cfg = resolve_config(g);
            const auto split = data::load_split(dataset_path);
            const auto base = engine::load_checkpoint(checkpoint_path);
            fs::create_directories(out_dir);
            const auto path = out_dir / "ablation.jsonl";
            std::ofstream(path, std::ios::trunc).close();
            eval::run_ablation(split.dataset, base, cfg, parse_split(split_name), [&](const eval::MetricReport& r) {
                const auto line = eval::to_json_line(r);
                append_line(path, line);
                std::cout << line << '\n';
            });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
