#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "stride/harness.hpp"

namespace {

using stride::Json;

struct SizeFlags {
    int H = 5, S = 3, A = 3, N = 2, T = 3, K = 40;
    int instances = 20;
    std::uint64_t seed = 0;
    std::string out;
};

void add_size_flags(CLI::App* cmd, SizeFlags& f) {
    cmd->add_option("--H", f.H, "horizon");
    cmd->add_option("--S", f.S, "number of states");
    cmd->add_option("--A", f.A, "number of actions");
    cmd->add_option("--N", f.N, "number of agents (vcg)");
    cmd->add_option("--T", f.T, "bargaining deadline");
    cmd->add_option("--K", f.K, "number of episodes (mdp-unknown)");
    cmd->add_option("--instances", f.instances, "instance count");
    cmd->add_option("--seed", f.seed, "base seed");
    cmd->add_option("--out", f.out, "output directory or file");
}

Json make_instance(const std::string& kind, const SizeFlags& f, const std::string& board) {
    if (kind == "mdp-known") {
        return stride::generate_instance(f.S, f.A, f.H, f.seed).to_json();
    }
    if (kind == "mdp-unknown") {
        return Json{{"mdp", stride::generate_instance(f.S, f.A, f.H, f.seed).to_json()},
                    {"K", f.K},
                    {"env_seed", f.seed ^ 0x5bd1e995u}};
    }
    if (kind == "vcg") {
        return stride::generate_mechanism_instance(f.N, f.S, f.A, f.H, f.seed).to_json();
    }
    if (kind == "bargain") return stride::sample_complete_bargain(f.T, f.seed).to_json();
    if (kind == "bargain-incomplete") {
        return stride::sample_incomplete_bargain(f.T, f.seed).to_json();
    }
    if (kind == "boardgame") {
        if (board.empty()) {
            return stride::node_to_json(
                stride::make_empty_node(stride::GameVariant::TicTacToe, 3, 3, 3));
        }
        return stride::node_to_json(
            stride::parse_board(stride::GameVariant::TicTacToe, 3, 3, 3, board, 'X'));
    }
    throw stride::OpError("unknown-module", kind);
}

void write_or_print(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream file(out);
    file << text;
}

int run_command(const std::string& kind, const SizeFlags& f) {
    stride::ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.H = f.H;
    cfg.S = f.S;
    cfg.A = f.A;
    cfg.N = f.N;
    cfg.T = f.T;
    cfg.K = f.K;
    cfg.instances = f.instances;
    cfg.seed = f.seed;
    cfg.out_dir = f.out;
    stride::MetricsReport report = stride::run_experiment(cfg);
    std::cout << report.aggregate_csv();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stride: strategic decision making with tool-calling reasoning sessions"};
    app.require_subcommand(1);

    const std::vector<std::string> kinds = {"mdp-known", "mdp-unknown",        "vcg",
                                            "bargain",   "bargain-incomplete", "boardgame"};

    SizeFlags gen_flags;
    std::string gen_kind = "mdp-known";
    auto* gen = app.add_subcommand("gen", "generate problem instances as JSONL");
    gen->add_option("--kind", gen_kind, "problem kind")->check(CLI::IsMember(kinds));
    add_size_flags(gen, gen_flags);

    SizeFlags run_flags;
    std::string run_kind;
    auto* run = app.add_subcommand("run", "run a scripted-agent experiment");
    run->add_option("kind", run_kind, "problem kind")
        ->required()
        ->check(CLI::IsMember(kinds));
    add_size_flags(run, run_flags);

    std::string eval_records;
    auto* eval = app.add_subcommand("eval", "recompute aggregates from a records file");
    eval->add_option("--records", eval_records, "records.jsonl path")->required();

    SizeFlags demo_flags;
    std::string demo_kind = "mdp-known";
    std::string demo_board;
    auto* demo = app.add_subcommand("demo", "generate a demonstration trace");
    demo->add_option("--kind", demo_kind, "problem kind")->check(CLI::IsMember(kinds));
    demo->add_option("--board", demo_board, "board position, e.g. \"X../.O./...\"");
    add_size_flags(demo, demo_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            std::string out_text;
            for (int i = 0; i < gen_flags.instances; ++i) {
                SizeFlags f = gen_flags;
                f.seed = gen_flags.seed + static_cast<std::uint64_t>(i);
                out_text += Json{{"seed", f.seed}, {"kind", gen_kind},
                                 {"instance", make_instance(gen_kind, f, "")}}
                                .dump();
                out_text += '\n';
            }
            write_or_print(gen_flags.out, out_text);
        } else if (run->parsed()) {
            return run_command(run_kind, run_flags);
        } else if (eval->parsed()) {
            std::ifstream file(eval_records);
            if (!file) throw stride::OpError("missing-file", eval_records);
            std::string line;
            int n = 0;
            std::map<std::string, double> sums;
            while (std::getline(file, line)) {
                if (line.empty()) continue;
                Json rec = Json::parse(line);
                ++n;
                for (const auto& [key, value] : rec.at("data").items()) {
                    if (value.is_number()) {
                        sums[key] += value.get<double>();
                    } else if (value.is_boolean()) {
                        sums[key] += value.get<bool>() ? 1.0 : 0.0;
                    }
                }
            }
            if (n == 0) throw stride::OpError("malformed-transcript", "no records");
            std::cout << "metric,value\n";
            std::cout << "records," << n << "\n";
            for (const auto& [key, total] : sums) {
                std::cout << "mean_" << key << "," << (total / n) << "\n";
            }
        } else if (demo->parsed()) {
            Json instance = make_instance(demo_kind, demo_flags, demo_board);
            stride::Demonstration d = stride::generate_demonstration(demo_kind, instance);
            write_or_print(demo_flags.out, d.to_json().dump(2));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
