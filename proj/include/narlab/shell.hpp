#pragma once

// Line-protocol front end. A Session accepts the same lines a transcript
// contains: config directives, Narsese sentences, bare step counts, and
// comments. Parse problems produce a diagnostic line, never an abort.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "engine.hpp"
#include "lab.hpp"
#include "narsese.hpp"

namespace narlab {

struct SessionConfig {
    std::vector<std::string> ops;  // slot i holds the name registered as index i+1
    std::size_t babbling_ops = 0;  // 0 = babble over every registered operation
    int volume = 100;              // >= 50 echoes derived hypotheses
    EngineConfig engine;
};

class Session {
public:
    explicit Session(SessionConfig cfg = {}) : cfg_(std::move(cfg)) {}

    bool engine_built() const { return engine_.has_value(); }

    const Engine& engine() {
        ensure_engine();
        return *engine_;
    }

    std::vector<std::string> exec_line(const std::string& text) {
        ParsedInput pi;
        try {
            pi = parse_line(text);
        } catch (const SyntaxError& e) {
            return {std::string("parse error: ") + e.what()};
        } catch (const UnknownDirective& e) {
            return {std::string("parse error: ") + e.what()};
        }
        if (std::holds_alternative<Comment>(pi)) return {};
        if (auto* d = std::get_if<ConfigDirective>(&pi)) return apply_directive(*d);
        if (auto* sc = std::get_if<StepCount>(&pi)) {
            ensure_engine().step(sc->n);
            return {};
        }
        const auto& s = std::get<Sentence>(pi);
        std::vector<std::string> out;
        try {
            IngestResult r = ensure_engine().ingest(s);
            for (const auto& op : r.executions) out.push_back(op + " executed");
            if (cfg_.volume >= 50)
                for (const auto& [term, truth] : r.derivations)
                    out.push_back("Derived: " + term.str() + ". " + format_truth(truth));
        } catch (const UnknownOperation& e) {
            out.push_back(std::string("error: ") + e.what());
        }
        return out;
    }

private:
    Engine& ensure_engine() {
        if (!engine_) {
            engine_.emplace(cfg_.engine);
            for (const auto& op : cfg_.ops)
                if (!op.empty()) engine_->register_operation(op);
            engine_->set_babbling_ops(cfg_.babbling_ops);
        }
        return *engine_;
    }

    std::vector<std::string> apply_directive(const ConfigDirective& d) {
        auto bad = [&](const std::string& why) -> std::vector<std::string> {
            return {"config error: *" + d.key + ": " + why};
        };
        if (d.key == "setopname") {
            auto sp = d.value.find(' ');
            std::size_t index = std::stoull(d.value.substr(0, sp));
            std::string name = d.value.substr(sp + 1);
            if (cfg_.ops.size() < index) cfg_.ops.resize(index);
            cfg_.ops[index - 1] = name;
            if (engine_) engine_->register_operation(name);
            return {};
        }
        char* end = nullptr;
        double v = std::strtod(d.value.c_str(), &end);
        if (end != d.value.c_str() + d.value.size()) return bad("not a number: " + d.value);
        if (d.key == "babblingops") {
            if (v < 1 || v != static_cast<long long>(v)) return bad("needs a count >= 1");
            cfg_.babbling_ops = static_cast<std::size_t>(v);
            if (engine_) engine_->set_babbling_ops(cfg_.babbling_ops);
        } else if (d.key == "motorbabbling") {
            if (v < 0.0 || v > 1.0) return bad("needs a probability in [0,1]");
            cfg_.engine.babble_prob = v;
            if (engine_) engine_->set_babble_prob(v);
        } else if (d.key == "volume") {
            if (v < 0 || v > 100 || v != static_cast<long long>(v)) return bad("needs an integer in 0..100");
            cfg_.volume = static_cast<int>(v);
        } else if (d.key == "decay") {
            if (v <= 0.0 || v >= 1.0) return bad("needs a value in (0,1)");
            cfg_.engine.decay = v;
            if (engine_) engine_->set_decay(v);
        } else if (d.key == "threshold") {
            if (v <= 0.0 || v > 1.0) return bad("needs a value in (0,1]");
            cfg_.engine.threshold = v;
            if (engine_) engine_->set_threshold(v);
        } else if (d.key == "deadline") {
            if (v < 1 || v != static_cast<long long>(v)) return bad("needs a step count >= 1");
            cfg_.engine.deadline = static_cast<long long>(v);
            if (engine_) engine_->set_deadline(cfg_.engine.deadline);
        } else if (d.key == "seed") {
            if (v < 0 || v != static_cast<std::uint64_t>(v)) return bad("needs a nonnegative integer");
            cfg_.engine.seed = static_cast<std::uint64_t>(v);
            if (engine_) engine_->reseed(cfg_.engine.seed);
        }
        return {};
    }

    SessionConfig cfg_;
    std::optional<Engine> engine_;
};

// Feeds every recorded input line of a JSON-lines transcript to a fresh
// Session and returns the operations it executed. The directive lines at the
// head of a lab transcript reconstruct the original configuration.
inline std::vector<std::string> replay_executions(const std::vector<std::string>& transcript) {
    Session session;
    std::vector<std::string> execs;
    for (const auto& line : transcript) {
        auto j = nlohmann::json::parse(line);
        if (j.at("type") != "line") continue;
        for (const auto& out : session.exec_line(j.at("text").get<std::string>())) {
            if (out.size() > 9 && out.compare(out.size() - 9, 9, " executed") == 0)
                execs.push_back(out.substr(0, out.size() - 9));
        }
    }
    return execs;
}

// The executions a transcript claims were made, for comparison with a replay.
inline std::vector<std::string> recorded_executions(const std::vector<std::string>& transcript) {
    std::vector<std::string> execs;
    for (const auto& line : transcript) {
        auto j = nlohmann::json::parse(line);
        if (j.at("type") == "exec") execs.push_back(j.at("op").get<std::string>());
    }
    return execs;
}

struct BatchOptions {
    int task = 1;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::string out_dir = "results";
    LabConfig lab;
};

// Exit codes: 0 success, 1 engine fault, 2 usage error, 3 I/O error.
inline int batch_run(const BatchOptions& opt, std::ostream& log = std::cout) {
    if (opt.task < 1 || opt.task > 3) {
        log << "error: task must be 1, 2 or 3\n";
        return 2;
    }
    if (opt.seeds.empty()) {
        log << "error: no seeds given\n";
        return 2;
    }
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) {
        log << "error: cannot create " << opt.out_dir << ": " << ec.message() << "\n";
        return 3;
    }
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream f(std::filesystem::path(opt.out_dir) / name, std::ios::binary);
        f << content;
        return !f.fail();
    };
    std::vector<ExperimentResult> results;
    for (auto seed : opt.seeds) {
        ExperimentResult res;
        try {
            res = run_experiment(opt.task, seed, opt.lab);
        } catch (const EngineFault& e) {
            log << "engine fault (task " << opt.task << ", seed " << seed << "): " << e.what() << "\n";
            return 1;
        }
        std::string stem = "task" + std::to_string(opt.task) + "_seed" + std::to_string(seed);
        std::string jsonl;
        for (const auto& l : res.transcript) jsonl += l + "\n";
        if (!write(stem + "_accuracy.csv", accuracy_csv(res)) ||
            !write(stem + "_hypotheses.csv", hypotheses_csv(res)) ||
            !write(stem + "_transcript.jsonl", jsonl)) {
            log << "error: cannot write outputs under " << opt.out_dir << "\n";
            return 3;
        }
        int correct = 0;
        for (const auto& r : res.records) correct += r.correct ? 1 : 0;
        log << "task " << opt.task << " seed " << seed << ": " << correct << "/"
            << res.records.size() << " trials correct\n";
        results.push_back(std::move(res));
    }
    if (!write("task" + std::to_string(opt.task) + "_summary.csv", summary_csv(results))) {
        log << "error: cannot write summary under " << opt.out_dir << "\n";
        return 3;
    }
    return 0;
}

} // namespace narlab
