#pragma once

// Operant-conditioning laboratory: three discrimination tasks run as seeded
// sessions against the engine, speaking the same line protocol a person
// would type. Task 1 is a simple two-choice discrimination, task 2 reverses
// the contingency halfway, task 3 makes the correct choice conditional on a
// sample stimulus.

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "engine.hpp"
#include "narsese.hpp"

namespace narlab {

class EngineFault : public std::runtime_error {
public:
    explicit EngineFault(const std::string& what) : std::runtime_error(what) {}
};

struct LabConfig {
    EngineConfig engine;
    int response_window = 8;     // steps granted after the goal before scoring no-response
    int inter_trial_steps = 100; // pause between trials
};

struct TrialSpec {
    std::vector<std::string> stimuli;  // literal protocol lines, presentation order
    std::string correct_op;
    int condition_id = 0;
};

struct PhaseSpec {
    std::string name;  // Baseline / Training / Testing, optionally numbered
    int blocks = 1;
    bool feedback = false;
    std::map<int, std::string> contingency;  // condition -> correct operation
};

struct TrialRecord {
    int condition_id = 0;
    std::string phase;
    int block_index = 0;  // 1-based within phase
    std::string correct_op;
    std::optional<std::string> executed;
    bool correct = false;
    std::optional<std::string> feedback_sent;
    long long clock_at_goal = 0;
};

struct HypothesisSample {
    long long clock = 0;
    std::string hypothesis;
    double frequency = 0.0;   // absent hypotheses sample as (0, 0)
    double confidence = 0.0;
};

struct BlockAccuracy {
    std::string phase;
    int block_index = 0;
    double accuracy = 0.0;
};

struct Metrics {
    std::vector<BlockAccuracy> per_block;
    std::map<std::string, std::vector<std::tuple<long long, double, double>>> trajectories;
};

struct ExperimentResult {
    int task = 0;
    std::uint64_t seed = 0;
    std::vector<TrialRecord> records;
    std::vector<HypothesisSample> samples;
    std::vector<std::string> transcript;  // JSON lines; replayable
};

inline const std::map<int, std::vector<std::string>>& task_conditions(int task) {
    static const std::map<int, std::vector<std::string>> two_choice = {
        {0, {"<A1 --> [left]>. :|:", "<A2 --> [right]>. :|:"}},
        {1, {"<A2 --> [left]>. :|:", "<A1 --> [right]>. :|:"}},
    };
    static const std::map<int, std::vector<std::string>> conditional = {
        {0, {"<A1 --> [sample]>. :|:", "<B1 --> [left]>. :|:", "<B2 --> [right]>. :|:"}},
        {1, {"<A1 --> [sample]>. :|:", "<B2 --> [left]>. :|:", "<B1 --> [right]>. :|:"}},
        {2, {"<A2 --> [sample]>. :|:", "<B1 --> [left]>. :|:", "<B2 --> [right]>. :|:"}},
        {3, {"<A2 --> [sample]>. :|:", "<B2 --> [left]>. :|:", "<B1 --> [right]>. :|:"}},
    };
    if (task == 3) return conditional;
    return two_choice;
}

// Hypotheses whose truth trajectories the metrics follow.
inline std::vector<Term> task_targets(int task) {
    auto imp1 = [](const char* s, const char* where, const char* op) {
        return compose_implication({Term::prop(s, where)}, std::string("^") + op, Term::atom("G"));
    };
    auto imp2 = [](const char* sample, const char* b, const char* where, const char* op) {
        return compose_implication({Term::prop(sample, "sample"), Term::prop(b, where)},
                                   std::string("^") + op, Term::atom("G"));
    };
    switch (task) {
        case 1: return {imp1("A1", "left", "left"), imp1("A1", "right", "right")};
        case 2: return {imp1("A1", "left", "left"), imp1("A2", "right", "right")};
        default:
            return {imp2("A1", "B1", "left", "left"), imp2("A1", "B1", "right", "right"),
                    imp2("A2", "B2", "left", "left"), imp2("A2", "B2", "right", "right")};
    }
}

inline std::vector<PhaseSpec> task_phases(int task) {
    std::map<int, std::string> two = {{0, "^left"}, {1, "^right"}};
    std::map<int, std::string> two_reversed = {{0, "^right"}, {1, "^left"}};
    std::map<int, std::string> cond = {{0, "^left"}, {1, "^right"}, {2, "^right"}, {3, "^left"}};
    switch (task) {
        case 1:
            return {{"Baseline", 3, false, two}, {"Training", 3, true, two}, {"Testing", 3, false, two}};
        case 2:
            return {{"Baseline", 2, false, two},   {"Training1", 4, true, two},
                    {"Testing1", 2, false, two},   {"Training2", 4, true, two_reversed},
                    {"Testing2", 2, false, two_reversed}};
        default:
            return {{"Baseline", 3, false, cond}, {"Training", 6, true, cond}, {"Testing", 3, false, cond}};
    }
}

// Twelve trials with balanced condition counts, order shuffled by the
// caller's rng stream.
inline std::vector<TrialSpec> generate_block(int task, const PhaseSpec& phase, Rng& rng) {
    const auto& conds = task_conditions(task);
    const int reps = task == 3 ? 3 : 6;
    std::vector<int> ids;
    for (const auto& [id, lines] : conds)
        for (int r = 0; r < reps; ++r) ids.push_back(id);
    rng.shuffle(ids);
    std::vector<TrialSpec> out;
    out.reserve(ids.size());
    for (int id : ids)
        out.push_back({conds.at(id), phase.contingency.at(id), id});
    return out;
}

namespace detail {

inline std::string json_line(const nlohmann::json& j) { return j.dump(); }

// Feed one protocol line to the engine and log it.
inline IngestResult feed_line(Engine& eng, const std::string& text,
                              std::vector<std::string>& transcript) {
    transcript.push_back(json_line({{"type", "line"}, {"clock", eng.now()}, {"text", text}}));
    ParsedInput pi = parse_line(text);
    if (auto* sc = std::get_if<StepCount>(&pi)) {
        eng.step(sc->n);
        return {};
    }
    return eng.ingest(std::get<Sentence>(pi));
}

} // namespace detail

inline TrialRecord run_trial(Engine& eng, const TrialSpec& trial, bool feedback,
                             const std::string& phase, int block_index,
                             std::vector<std::string>& transcript,
                             const LabConfig& lc = {}) {
    TrialRecord rec;
    rec.condition_id = trial.condition_id;
    rec.phase = phase;
    rec.block_index = block_index;
    rec.correct_op = trial.correct_op;
    for (const auto& line : trial.stimuli) detail::feed_line(eng, line, transcript);
    rec.clock_at_goal = eng.now();
    IngestResult r = detail::feed_line(eng, "G! :|:", transcript);
    if (!r.executions.empty()) {
        rec.executed = r.executions.front();
        bool known = false;
        for (const auto& o : eng.operations())
            if (o == *rec.executed) known = true;
        if (!known) throw EngineFault("engine emitted unregistered operation " + *rec.executed);
        transcript.push_back(detail::json_line(
            {{"type", "exec"}, {"clock", eng.now()}, {"op", *rec.executed}}));
    } else {
        detail::feed_line(eng, std::to_string(lc.response_window), transcript);
    }
    rec.correct = rec.executed && *rec.executed == trial.correct_op;
    if (feedback) {
        rec.feedback_sent = rec.correct ? "G. :|:" : "G. :|: {0.0 0.9}";
        detail::feed_line(eng, *rec.feedback_sent, transcript);
    }
    detail::feed_line(eng, std::to_string(lc.inter_trial_steps), transcript);
    transcript.push_back(detail::json_line({{"type", "trial"},
                                            {"phase", phase},
                                            {"block", block_index},
                                            {"condition", trial.condition_id},
                                            {"executed", rec.executed ? nlohmann::json(*rec.executed)
                                                                      : nlohmann::json(nullptr)},
                                            {"correct", rec.correct},
                                            {"feedback", rec.feedback_sent
                                                             ? nlohmann::json(*rec.feedback_sent)
                                                             : nlohmann::json(nullptr)}}));
    return rec;
}

inline ExperimentResult run_experiment(int task, std::uint64_t seed, LabConfig lc = {}) {
    if (task < 1 || task > 3) throw std::invalid_argument("task must be 1, 2 or 3");
    lc.engine.seed = seed;
    Engine eng(lc.engine);
    eng.register_operation("^left");
    eng.register_operation("^right");
    eng.set_babbling_ops(2);

    ExperimentResult res;
    res.task = task;
    res.seed = seed;
    res.transcript.push_back(detail::json_line({{"type", "config"},
                                                {"task", task},
                                                {"seed", seed},
                                                {"decay", lc.engine.decay},
                                                {"threshold", lc.engine.threshold},
                                                {"motorbabbling", lc.engine.babble_prob},
                                                {"deadline", lc.engine.deadline},
                                                {"horizon", lc.engine.horizon},
                                                {"response_window", lc.response_window}}));
    // The directive block mirrors a hand-typed session so the transcript can
    // be replayed through the shell verbatim.
    for (const std::string& line : {std::string("*volume=0"),
                                    std::string("*seed=") + std::to_string(seed),
                                    std::string("*decay=") + format_real(lc.engine.decay),
                                    std::string("*threshold=") + format_real(lc.engine.threshold),
                                    std::string("*deadline=") + std::to_string(lc.engine.deadline),
                                    std::string("*babblingops=2"),
                                    std::string("*motorbabbling=") + format_real(lc.engine.babble_prob),
                                    std::string("*setopname 1 ^left"),
                                    std::string("*setopname 2 ^right")})
        res.transcript.push_back(detail::json_line({{"type", "line"}, {"clock", 0}, {"text", line}}));

    Rng block_rng(seed * 7919 + 1);
    const auto targets = task_targets(task);
    for (const auto& phase : task_phases(task)) {
        for (int b = 1; b <= phase.blocks; ++b) {
            for (const auto& trial : generate_block(task, phase, block_rng))
                res.records.push_back(run_trial(eng, trial, phase.feedback, phase.name, b,
                                                res.transcript, lc));
            for (const auto& t : targets) {
                HypothesisSample s;
                s.clock = eng.now();
                s.hypothesis = t.str();
                if (auto tv = eng.query_hypothesis(t)) {
                    s.frequency = tv->frequency;
                    s.confidence = tv->confidence;
                }
                res.samples.push_back(s);
                res.transcript.push_back(detail::json_line({{"type", "sample"},
                                                            {"clock", s.clock},
                                                            {"hypothesis", s.hypothesis},
                                                            {"frequency", s.frequency},
                                                            {"confidence", s.confidence}}));
            }
        }
    }
    return res;
}

// Accuracy per block and truth trajectories, derivable from the records and
// samples alone (no engine state), so replays can be cross-checked.
inline Metrics compute_metrics(const std::vector<TrialRecord>& records,
                               const std::vector<HypothesisSample>& samples) {
    Metrics m;
    for (const auto& r : records) {
        if (m.per_block.empty() || m.per_block.back().phase != r.phase ||
            m.per_block.back().block_index != r.block_index)
            m.per_block.push_back({r.phase, r.block_index, 0.0});
        m.per_block.back().accuracy += r.correct ? 1.0 : 0.0;
    }
    for (auto& b : m.per_block) b.accuracy /= 12.0;
    for (const auto& s : samples)
        m.trajectories[s.hypothesis].emplace_back(s.clock, s.frequency, s.confidence);
    return m;
}

namespace detail {

inline std::string fixed6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace detail

inline std::string accuracy_csv(const ExperimentResult& res) {
    Metrics m = compute_metrics(res.records, res.samples);
    std::string out = "task,seed,phase,block,accuracy\n";
    for (const auto& b : m.per_block)
        out += std::to_string(res.task) + "," + std::to_string(res.seed) + "," + b.phase + "," +
               std::to_string(b.block_index) + "," + detail::fixed6(b.accuracy) + "\n";
    return out;
}

inline std::string hypotheses_csv(const ExperimentResult& res) {
    std::string out = "task,seed,clock,hypothesis,frequency,confidence\n";
    for (const auto& s : res.samples)
        out += std::to_string(res.task) + "," + std::to_string(res.seed) + "," +
               std::to_string(s.clock) + "," + s.hypothesis + "," + detail::fixed6(s.frequency) +
               "," + detail::fixed6(s.confidence) + "\n";
    return out;
}

// Median per-block accuracy across seeds; blocks are aligned by position in
// the phase ladder, which is identical for a given task.
inline std::string summary_csv(const std::vector<ExperimentResult>& results) {
    std::string out = "task,phase,block,median_accuracy\n";
    if (results.empty()) return out;
    std::vector<Metrics> ms;
    ms.reserve(results.size());
    for (const auto& r : results) ms.push_back(compute_metrics(r.records, r.samples));
    for (std::size_t i = 0; i < ms.front().per_block.size(); ++i) {
        std::vector<double> accs;
        accs.reserve(ms.size());
        for (const auto& m : ms) accs.push_back(m.per_block[i].accuracy);
        std::sort(accs.begin(), accs.end());
        double median = accs.size() % 2 == 1
                            ? accs[accs.size() / 2]
                            : 0.5 * (accs[accs.size() / 2 - 1] + accs[accs.size() / 2]);
        out += std::to_string(results.front().task) + "," + ms.front().per_block[i].phase + "," +
               std::to_string(ms.front().per_block[i].block_index) + "," +
               detail::fixed6(median) + "\n";
    }
    return out;
}

} // namespace narlab
