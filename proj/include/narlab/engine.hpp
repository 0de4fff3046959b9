#pragma once

// The sensorimotor reasoner. Events enter a sliding window and a bounded
// attention queue; judgments that follow an operation induce procedural
// hypotheses `(stimuli &/ op) =/> outcome`; goals are answered by deduction
// over stored hypotheses or by motor babbling; every executed operation
// registers anticipations whose failure feeds back negative evidence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "narsese.hpp"
#include "rng.hpp"
#include "term.hpp"
#include "truth.hpp"

namespace narlab {

struct EngineConfig {
    double decay = 0.75;            // per-step confidence decay (projection)
    double threshold = 0.501;       // decision expectation threshold
    double babble_prob = 0.9;       // motor babbling probability per goal
    double evidence_capacity = 4.0; // cap on stored total evidence per hypothesis
    double fail_confidence = 0.015; // confidence of a deadline-failure observation
    long long deadline = 50;        // anticipation lifetime in steps
    long long horizon = 20;         // how far back antecedents still count as present
    std::size_t window_capacity = 20;
    std::size_t queue_capacity = 512;
    std::size_t memory_capacity = 4096;
    std::size_t stamp_capacity = 64;  // newest stamps kept per hypothesis
    std::uint64_t seed = 0;
};

class UnknownOperation : public std::runtime_error {
public:
    UnknownOperation() : std::runtime_error("goal requires operations but none are registered") {}
};

struct Event {
    Term term;
    std::string key;   // canonical term text
    double frequency;
    long long time;
    bool is_op;
    std::uint64_t stamp;
};

struct Anticipation {
    std::string key;        // hypothesis whose prediction is outstanding
    std::string predicted;  // consequent term text
    long long deadline;
    double predicted_confidence;  // deduction confidence at firing time
};

struct Decision {
    enum class Kind { Execute, Babble, NoAction };
    Kind kind = Kind::NoAction;
    std::string operation;        // Execute / Babble
    std::string implication_key;  // Execute only
    double expectation = 0.0;     // Execute only
};

struct InducedCandidate {
    Term implication;
    TruthValue truth;                  // single-observation truth
    std::vector<std::uint64_t> stamps; // window evidence; caller adds the outcome stamp
};

struct IngestResult {
    std::vector<std::string> executions;                    // operation names, with caret
    std::vector<std::pair<Term, TruthValue>> derivations;   // hypothesis and its stored truth
};

class Engine {
public:
    explicit Engine(EngineConfig cfg = {}) : cfg_(cfg), rng_(cfg.seed) {}

    void register_operation(const std::string& name_with_caret) {
        if (name_with_caret.empty() || name_with_caret[0] != '^')
            throw std::invalid_argument("operation names start with '^'");
        for (const auto& o : ops_)
            if (o == name_with_caret) return;
        ops_.push_back(name_with_caret);
    }
    const std::vector<std::string>& operations() const { return ops_; }

    // n = 0 means "babble over all registered operations".
    void set_babbling_ops(std::size_t n) { babble_ops_ = n; }
    void set_babble_prob(double p) { cfg_.babble_prob = p; }
    void set_threshold(double t) { cfg_.threshold = t; }
    void set_decay(double d) { cfg_.decay = d; }
    void set_deadline(long long d) { cfg_.deadline = d; }
    void reseed(std::uint64_t s) { rng_.reseed(s); }
    const EngineConfig& config() const { return cfg_; }

    long long now() const { return clock_; }
    std::size_t window_size() const { return window_.size(); }
    std::size_t queue_size() const { return queue_.size(); }
    std::size_t memory_size() const { return memory_.size(); }
    std::size_t anticipation_count() const { return anticipations_.size(); }
    std::size_t eviction_count() const { return evictions_; }

    IngestResult ingest(const Sentence& s) {
        IngestResult out;
        if (s.punctuation == Punctuation::Goal) {
            Decision d = decide(s);
            if (d.kind != Decision::Kind::NoAction) execute_operation(d.operation, out);
            ++clock_;
            return out;
        }
        if (s.term.kind == TermKind::Implication) {
            TruthValue stored = revise_into_memory(s.term, s.truth, {fresh_stamp()});
            out.derivations.emplace_back(s.term, stored);
            ++clock_;
            return out;
        }
        const bool is_op = s.term.kind == TermKind::Operation;
        const std::string key = s.term.str();
        const std::uint64_t sid = fresh_stamp();
        if (!is_op) {
            settle_anticipations(key, s.truth.frequency, out);
            for (auto& cand : induce(s.term, s.truth.frequency)) {
                cand.stamps.push_back(sid);
                TruthValue stored = revise_into_memory(cand.implication, cand.truth, cand.stamps);
                out.derivations.emplace_back(std::move(cand.implication), stored);
            }
        }
        push_event(Event{s.term, key, s.truth.frequency, clock_, is_op, sid});
        ++clock_;
        return out;
    }

    void step(long long n) {
        for (long long i = 0; i < n; ++i) {
            ++clock_;
            std::vector<Anticipation> keep;
            keep.reserve(anticipations_.size());
            for (auto& a : anticipations_) {
                if (clock_ > a.deadline) {
                    auto it = memory_.find(a.key);
                    if (it != memory_.end())
                        revise_evidence(it->second, {0.0, cfg_.fail_confidence}, {fresh_stamp()});
                } else {
                    keep.push_back(std::move(a));
                }
            }
            anticipations_ = std::move(keep);
        }
    }

    // Single-observation hypotheses suggested by `outcome` arriving now: one
    // per recent stimulus preceding the latest operation, plus one per
    // ordered stimulus pair. Confidence starts at 0.5 and decays with the
    // age of the oldest antecedent element.
    std::vector<InducedCandidate> induce(const Term& outcome, double frequency) const {
        std::vector<InducedCandidate> cands;
        const Event* op_event = nullptr;
        for (auto it = window_.rbegin(); it != window_.rend(); ++it) {
            if (it->is_op && clock_ - it->time <= cfg_.horizon) { op_event = &*it; break; }
        }
        if (!op_event) return cands;

        struct Obs { Term term; long long time; std::uint64_t stamp; };
        std::map<std::string, Obs> latest;  // most recent observation per stimulus
        for (const auto& ev : window_) {
            if (!ev.is_op && ev.time < op_event->time && clock_ - ev.time <= cfg_.horizon)
                latest[ev.key] = Obs{ev.term, ev.time, ev.stamp};
        }
        std::vector<Obs> stimuli;
        stimuli.reserve(latest.size());
        for (auto& [k, obs] : latest) stimuli.push_back(obs);
        std::sort(stimuli.begin(), stimuli.end(),
                  [](const Obs& a, const Obs& b) { return a.time < b.time; });

        auto add = [&](const std::vector<Term>& stims, long long first_time,
                       std::vector<std::uint64_t> stamps) {
            double c = 0.5 * std::pow(cfg_.decay, static_cast<double>(clock_ - first_time));
            if (c < 1e-6) return;
            stamps.push_back(op_event->stamp);
            cands.push_back({compose_implication(stims, op_event->key, outcome),
                             {frequency, c}, std::move(stamps)});
        };
        for (const auto& s : stimuli) add({s.term}, s.time, {s.stamp});
        for (std::size_t i = 0; i < stimuli.size(); ++i)
            for (std::size_t j = i + 1; j < stimuli.size(); ++j)
                add({stimuli[i].term, stimuli[j].term}, stimuli[i].time,
                    {stimuli[i].stamp, stimuli[j].stamp});
        return cands;
    }

    // Evidence-space merge of an observation into memory. Overlapping stamps
    // mean the same evidence was seen already: choice keeps the more
    // confident truth instead of double-counting.
    TruthValue revise_into_memory(const Term& implication, const TruthValue& observed,
                                  const std::vector<std::uint64_t>& stamps) {
        if (implication.kind != TermKind::Implication)
            throw std::invalid_argument("only implications are stored in concept memory");
        if (count_operations(*implication.left) > 1)
            throw std::invalid_argument("antecedent may contain at most one operation");
        const std::string key = implication.str();
        auto it = memory_.find(key);
        if (it == memory_.end()) {
            if (memory_.size() >= cfg_.memory_capacity) evict_lowest_priority();
            Concept c;
            c.term = implication;
            auto parts = decompose_implication(implication);
            c.stimuli = std::move(parts.stimuli);
            c.op = parts.op;
            c.consequent_key = parts.consequent.str();
            Evidence e = evidence_from_truth(observed);
            c.positive = e.positive;
            c.total = e.total;
            cap_evidence(c);
            c.stamps.insert(stamps.begin(), stamps.end());
            trim_stamps(c);
            c.created = created_seq_++;
            c.last_use = clock_;
            c.use_count = 1;
            it = memory_.emplace(key, std::move(c)).first;
            return truth_from_evidence({it->second.positive, it->second.total});
        }
        return revise_evidence(it->second, observed, stamps);
    }

    // Ranks every eligible hypothesis for the goal: desire = deduction of
    // the goal's desire with the hypothesis truth projected by the staleness
    // of the newest input event. Argmax by expectation, ties by confidence,
    // then by earlier creation.
    Decision decide(const Sentence& goal) {
        const std::string goal_key = goal.term.str();
        const long long dt = clock_ - newest_input_time();
        const Concept* best = nullptr;
        double best_ex = 0.0, best_conf = 0.0;
        for (auto& [key, c] : memory_) {
            if (c.op.empty() || c.consequent_key != goal_key || c.total <= 0.0) continue;
            if (!antecedent_present(c)) continue;
            TruthValue imp = truth_from_evidence({c.positive, c.total});
            double ex = expectation(deduction(goal.truth, project(imp, dt, cfg_.decay)));
            bool better = !best || ex > best_ex ||
                          (ex == best_ex && (imp.confidence > best_conf ||
                           (imp.confidence == best_conf && c.created < best->created)));
            if (better) { best = &c; best_ex = ex; best_conf = imp.confidence; }
        }
        Decision d;
        if (best && best_ex >= cfg_.threshold) {
            d.kind = Decision::Kind::Execute;
            d.operation = best->op;
            d.implication_key = best->term.str();
            d.expectation = best_ex;
            return d;
        }
        if (ops_.empty()) throw UnknownOperation();
        if (rng_.next_unit() < cfg_.babble_prob) {
            std::size_t n = babble_ops_ == 0 ? ops_.size() : std::min(babble_ops_, ops_.size());
            d.kind = Decision::Kind::Babble;
            d.operation = ops_[rng_.next_index(n)];
        }
        return d;
    }

    // Opens a prediction for the hypothesis' consequent; its strength is the
    // deduction confidence the hypothesis would support right now.
    void register_anticipation(const Term& implication, long long fired_at) {
        const std::string key = implication.str();
        for (const auto& a : anticipations_)
            if (a.key == key) return;  // one outstanding prediction per hypothesis
        auto parts = decompose_implication(implication);
        double cpred = 0.0;
        if (auto it = memory_.find(key); it != memory_.end()) {
            TruthValue imp = truth_from_evidence({it->second.positive, it->second.total});
            long long dt = clock_ - newest_input_time();
            cpred = deduction({1.0, 0.9}, project(imp, dt, cfg_.decay)).confidence;
        }
        anticipations_.push_back({key, parts.consequent.str(), fired_at + cfg_.deadline, cpred});
    }

    std::optional<TruthValue> query_hypothesis(const Term& pattern) const {
        auto it = memory_.find(pattern.str());
        if (it == memory_.end() || it->second.total <= 0.0) return std::nullopt;
        return truth_from_evidence({it->second.positive, it->second.total});
    }

    std::optional<Evidence> evidence_of(const Term& pattern) const {
        auto it = memory_.find(pattern.str());
        if (it == memory_.end()) return std::nullopt;
        return Evidence{it->second.positive, it->second.total};
    }

    std::vector<std::pair<std::string, TruthValue>> memory_snapshot() const {
        std::vector<std::pair<std::string, TruthValue>> out;
        out.reserve(memory_.size());
        for (const auto& [key, c] : memory_)
            out.emplace_back(key, truth_from_evidence({c.positive, c.total}));
        return out;
    }

    // Highest-priority queue entry (and removes it). Priority is the event
    // truth's expectation decayed by age.
    std::optional<std::string> pop_attention() {
        if (queue_.empty()) return std::nullopt;
        std::size_t best = 0;
        for (std::size_t i = 1; i < queue_.size(); ++i)
            if (queue_priority(queue_[i]) > queue_priority(queue_[best])) best = i;
        std::string key = queue_[best].key;
        queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(best));
        return key;
    }

private:
    struct Concept {
        Term term;
        std::vector<Term> stimuli;
        std::string op;  // with caret; empty for purely temporal links
        std::string consequent_key;
        double positive = 0.0;
        double total = 0.0;
        std::set<std::uint64_t> stamps;
        long long created = 0;
        long long last_use = 0;
        long long use_count = 0;
    };

    struct QueueItem {
        std::string key;
        double base;  // expectation at entry
        long long entered;
    };

    std::uint64_t fresh_stamp() { return ++stamp_seq_; }

    long long newest_input_time() const {
        for (auto it = window_.rbegin(); it != window_.rend(); ++it)
            if (!it->is_op) return it->time;
        return clock_;
    }

    bool antecedent_present(const Concept& c) const {
        long long prev = -1;
        for (const auto& s : c.stimuli) {
            const std::string sk = s.str();
            long long t = -1;
            for (auto it = window_.rbegin(); it != window_.rend(); ++it) {
                if (!it->is_op && it->key == sk) { t = it->time; break; }
            }
            if (t < 0 || clock_ - t > cfg_.horizon) return false;
            if (t < prev) return false;  // stimuli must have appeared in order
            prev = t;
        }
        return true;
    }

    void settle_anticipations(const std::string& key, double frequency, IngestResult& out) {
        std::vector<Anticipation> keep;
        keep.reserve(anticipations_.size());
        for (auto& a : anticipations_) {
            if (a.predicted != key) { keep.push_back(std::move(a)); continue; }
            // Prediction resolved. Confirmation needs no extra bookkeeping
            // (induction supplies the positive evidence); an explicit
            // disconfirmation settles the bet at the strength it was made.
            if (frequency < 0.5) {
                auto it = memory_.find(a.key);
                if (it != memory_.end()) {
                    TruthValue stored = revise_evidence(it->second, {0.0, a.predicted_confidence},
                                                        {fresh_stamp()});
                    out.derivations.emplace_back(it->second.term, stored);
                }
            }
        }
        anticipations_ = std::move(keep);
    }

    void execute_operation(const std::string& op, IngestResult& out) {
        const long long fired = clock_;
        const long long dt = clock_ - newest_input_time();
        std::set<std::string> pending;
        for (const auto& a : anticipations_) pending.insert(a.key);
        for (auto& [key, c] : memory_) {
            if (c.op != op || c.total <= 0.0 || pending.count(key)) continue;
            if (!antecedent_present(c)) continue;
            TruthValue imp = truth_from_evidence({c.positive, c.total});
            double cpred = deduction({1.0, 0.9}, project(imp, dt, cfg_.decay)).confidence;
            anticipations_.push_back({key, c.consequent_key, fired + cfg_.deadline, cpred});
        }
        push_event(Event{Term::op(op.substr(1)), op, 1.0, clock_, true, fresh_stamp()});
        out.executions.push_back(op);
    }

    void push_event(Event ev) {
        double base = expectation({ev.frequency, 0.9});
        if (queue_.size() >= cfg_.queue_capacity) {
            std::size_t worst = 0;
            for (std::size_t i = 1; i < queue_.size(); ++i)
                if (queue_priority(queue_[i]) < queue_priority(queue_[worst])) worst = i;
            queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(worst));
        }
        queue_.push_back({ev.key, base, ev.time});
        window_.push_back(std::move(ev));
        if (window_.size() > cfg_.window_capacity) window_.pop_front();
    }

    double queue_priority(const QueueItem& q) const {
        return q.base * std::pow(cfg_.decay, static_cast<double>(clock_ - q.entered));
    }

    void cap_evidence(Concept& c) const {
        if (c.total > cfg_.evidence_capacity) {
            double scale = cfg_.evidence_capacity / c.total;
            c.positive *= scale;
            c.total = cfg_.evidence_capacity;
        }
    }

    void trim_stamps(Concept& c) const {
        while (c.stamps.size() > cfg_.stamp_capacity) c.stamps.erase(c.stamps.begin());
    }

    TruthValue revise_evidence(Concept& c, const TruthValue& observed,
                               const std::vector<std::uint64_t>& stamps) {
        bool overlap = false;
        for (auto s : stamps)
            if (c.stamps.count(s)) { overlap = true; break; }
        if (overlap) {
            TruthValue stored = truth_from_evidence({c.positive, c.total});
            if (observed.confidence > stored.confidence) {
                Evidence e = evidence_from_truth(observed);
                c.positive = e.positive;
                c.total = e.total;
                cap_evidence(c);
                c.stamps.clear();
                c.stamps.insert(stamps.begin(), stamps.end());
                trim_stamps(c);
            }
            ++overlap_rejections_;
        } else {
            Evidence e = evidence_from_truth(observed);
            c.positive += e.positive;
            c.total += e.total;
            cap_evidence(c);
            c.stamps.insert(stamps.begin(), stamps.end());
            trim_stamps(c);
        }
        c.last_use = clock_;
        ++c.use_count;
        return truth_from_evidence({c.positive, c.total});
    }

    void evict_lowest_priority() {
        auto victim = memory_.end();
        double worst = 0.0;
        for (auto it = memory_.begin(); it != memory_.end(); ++it) {
            double p = static_cast<double>(1 + it->second.use_count) *
                       std::pow(cfg_.decay, static_cast<double>(clock_ - it->second.last_use));
            if (victim == memory_.end() || p < worst) { victim = it; worst = p; }
        }
        if (victim != memory_.end()) {
            memory_.erase(victim);
            ++evictions_;
        }
    }

    EngineConfig cfg_;
    Rng rng_;
    long long clock_ = 0;
    std::deque<Event> window_;
    std::vector<QueueItem> queue_;
    std::map<std::string, Concept> memory_;  // key order makes iteration deterministic
    std::vector<Anticipation> anticipations_;
    std::vector<std::string> ops_;
    std::size_t babble_ops_ = 0;
    std::uint64_t stamp_seq_ = 0;
    long long created_seq_ = 0;
    std::size_t evictions_ = 0;
    std::size_t overlap_rejections_ = 0;
};

} // namespace narlab
