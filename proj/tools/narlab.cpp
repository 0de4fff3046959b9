// narlab command line: an interactive reasoner session (repl), the batch
// experiment runner (run), and transcript replay verification (replay).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "narlab/shell.hpp"

namespace {

// Shared --config handling; returns false (with a message) for unknown keys
// or bad values.
bool apply_config(narlab::SessionConfig& cfg, const std::string& kv, std::string& err) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
        err = "--config expects key=value, got '" + kv + "'";
        return false;
    }
    std::string key = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
        err = "--config " + key + ": not a number: '" + value + "'";
        return false;
    }
    auto bad = [&](const std::string& why) {
        err = "--config " + key + ": " + why;
        return false;
    };
    bool integral = v == static_cast<double>(static_cast<long long>(v));
    if (key == "decay") {
        if (v <= 0.0 || v >= 1.0) return bad("needs a value in (0,1)");
        cfg.engine.decay = v;
    } else if (key == "threshold") {
        if (v <= 0.0 || v > 1.0) return bad("needs a value in (0,1]");
        cfg.engine.threshold = v;
    } else if (key == "motorbabbling") {
        if (v < 0.0 || v > 1.0) return bad("needs a probability in [0,1]");
        cfg.engine.babble_prob = v;
    } else if (key == "deadline") {
        if (v < 1 || !integral) return bad("needs a step count >= 1");
        cfg.engine.deadline = static_cast<long long>(v);
    } else if (key == "horizon") {
        if (v < 1 || !integral) return bad("needs a step count >= 1");
        cfg.engine.horizon = static_cast<long long>(v);
    } else if (key == "babblingops") {
        if (v < 1 || !integral) return bad("needs a count >= 1");
        cfg.babbling_ops = static_cast<std::size_t>(v);
    } else if (key == "volume") {
        if (v < 0 || v > 100 || !integral) return bad("needs an integer in 0..100");
        cfg.volume = static_cast<int>(v);
    } else if (key == "window") {
        if (v < 1 || !integral) return bad("needs a count >= 1");
        cfg.engine.window_capacity = static_cast<std::size_t>(v);
    } else if (key == "queue") {
        if (v < 1 || !integral) return bad("needs a count >= 1");
        cfg.engine.queue_capacity = static_cast<std::size_t>(v);
    } else if (key == "memory") {
        if (v < 1 || !integral) return bad("needs a count >= 1");
        cfg.engine.memory_capacity = static_cast<std::size_t>(v);
    } else {
        err = "--config: unknown key '" + key + "'";
        return false;
    }
    return true;
}

// stoull alone would accept trailing garbage ("0,1" -> 0), so require an
// all-digit token.
bool parse_u64(const std::string& text, std::uint64_t& out) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) return false;
    out = std::stoull(text);
    return true;
}

bool parse_seeds(const std::string& spec, std::vector<std::uint64_t>& out, std::string& err) {
    auto dots = spec.find("..");
    try {
        if (dots == std::string::npos) {
            std::uint64_t s = 0;
            if (!parse_u64(spec, s)) throw std::invalid_argument(spec);
            out = {s};
            return true;
        }
        std::uint64_t lo = 0;
        std::uint64_t hi = 0;
        if (!parse_u64(spec.substr(0, dots), lo) || !parse_u64(spec.substr(dots + 2), hi))
            throw std::invalid_argument(spec);
        if (hi < lo) {
            err = "--seeds: empty range '" + spec + "'";
            return false;
        }
        out.clear();
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        return true;
    } catch (const std::exception&) {
        err = "--seeds: cannot parse '" + spec + "'";
        return false;
    }
}

int run_repl(const narlab::SessionConfig& cfg) {
    narlab::Session session(cfg);
    std::string line;
    while (std::getline(std::cin, line)) {
        for (const auto& out : session.exec_line(line)) std::cout << out << "\n";
        std::cout.flush();
    }
    return 0;
}

int run_replay(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << "error: cannot open " << path << "\n";
        return 3;
    }
    std::vector<std::string> transcript;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) transcript.push_back(line);
    std::vector<std::string> expected;
    std::vector<std::string> actual;
    try {
        expected = narlab::recorded_executions(transcript);
        actual = narlab::replay_executions(transcript);
    } catch (const std::exception& e) {
        std::cerr << "error: bad transcript " << path << ": " << e.what() << "\n";
        return 3;
    }
    if (expected != actual) {
        std::size_t i = 0;
        while (i < expected.size() && i < actual.size() && expected[i] == actual[i]) ++i;
        std::cerr << "replay mismatch at execution " << (i + 1) << ": recorded "
                  << (i < expected.size() ? expected[i] : "(nothing)") << ", replay produced "
                  << (i < actual.size() ? actual[i] : "(nothing)") << " ("
                  << expected.size() << " recorded, " << actual.size() << " replayed)\n";
        return 1;
    }
    std::cout << "replay OK (" << actual.size() << " executions)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"narlab: sensorimotor reasoner and conditioning laboratory"};
    app.require_subcommand(1);

    std::vector<std::string> config_kv;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto* repl = app.add_subcommand("repl", "interactive line-protocol session");
    repl->add_option("--seed", seed, "engine rng seed")->each([&](const std::string&) { seed_given = true; });
    repl->add_option("--config", config_kv, "engine setting as key=value");

    int task = 1;
    std::string seeds_spec;
    std::string out_dir = "results";
    auto* run = app.add_subcommand("run", "run one experimental task over seeds");
    run->add_option("--task", task, "task id: 1, 2 or 3")->required();
    auto* seed_opt = run->add_option("--seed", seed, "single seed")
                         ->each([&](const std::string&) { seed_given = true; });
    auto* seeds_opt = run->add_option("--seeds", seeds_spec, "seed range, e.g. 0..9");
    seed_opt->excludes(seeds_opt);
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--config", config_kv, "engine setting as key=value");

    std::string replay_path;
    auto* replay = app.add_subcommand("replay", "verify a recorded transcript");
    replay->add_option("--in", replay_path, "transcript .jsonl file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    narlab::SessionConfig cfg;
    std::string err;
    for (const auto& kv : config_kv) {
        if (!apply_config(cfg, kv, err)) {
            std::cerr << "error: " << err << "\n";
            return 2;
        }
    }
    if (seed_given) cfg.engine.seed = seed;

    if (repl->parsed()) return run_repl(cfg);
    if (replay->parsed()) return run_replay(replay_path);

    narlab::BatchOptions opt;
    opt.task = task;
    opt.out_dir = out_dir;
    opt.lab.engine = cfg.engine;
    if (seed_given) opt.seeds = {seed};
    if (!seeds_spec.empty()) {
        if (!parse_seeds(seeds_spec, opt.seeds, err)) {
            std::cerr << "error: " << err << "\n";
            return 2;
        }
    }
    return narlab::batch_run(opt);
}
