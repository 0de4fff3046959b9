#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "narlab/engine.hpp"
#include "narlab/narsese.hpp"

using namespace narlab;

namespace {

Sentence sent(const std::string& line) {
    return std::get<Sentence>(parse_line(line));
}

Engine make_engine(EngineConfig cfg = {}) {
    Engine eng(cfg);
    eng.register_operation("^left");
    eng.register_operation("^right");
    return eng;
}

Term target(std::vector<Term> stimuli, const char* op) {
    return compose_implication(stimuli, op, Term::atom("G"));
}

} // namespace

TEST_CASE("stimulus events only grow the window") {
    Engine eng = make_engine();
    IngestResult r = eng.ingest(sent("<A1 --> [left]>. :|:"));
    CHECK(r.executions.empty());
    CHECK(r.derivations.empty());
    CHECK(eng.window_size() == 1);
    CHECK(eng.now() == 1);
    CHECK(eng.memory_size() == 0);
}

TEST_CASE("one reinforced conditional trial induces simple and compound hypotheses") {
    Engine eng = make_engine();
    eng.ingest(sent("<A1 --> [sample]>. :|:"));  // t = 0
    eng.ingest(sent("<B2 --> [left]>. :|:"));    // t = 1
    eng.ingest(sent("<B1 --> [right]>. :|:"));   // t = 2
    eng.ingest(sent("^right. :|:"));             // t = 3
    IngestResult r = eng.ingest(sent("G. :|:")); // t = 4
    CHECK(r.derivations.size() == 6);  // 3 singles + 3 ordered pairs
    CHECK(eng.memory_size() == 6);

    // oracle: single-observation confidence is 0.5 * decay^(now - first antecedent)
    const double lam = eng.config().decay;
    auto expect_c = [&](int first_time) { return 0.5 * std::pow(lam, 4 - first_time); };

    Term simple_b1 = target({Term::prop("B1", "right")}, "^right");
    Term simple_a1 = target({Term::prop("A1", "sample")}, "^right");
    Term compound = target({Term::prop("A1", "sample"), Term::prop("B1", "right")}, "^right");

    auto tb1 = eng.query_hypothesis(simple_b1);
    auto ta1 = eng.query_hypothesis(simple_a1);
    auto tc = eng.query_hypothesis(compound);
    REQUIRE(tb1);
    REQUIRE(ta1);
    REQUIRE(tc);
    CHECK(tb1->frequency == 1.0);
    CHECK(tb1->confidence == Catch::Approx(expect_c(2)).margin(1e-9));  // 0.28125
    CHECK(ta1->confidence == Catch::Approx(expect_c(0)).margin(1e-9));  // 0.158203125
    CHECK(tc->confidence == Catch::Approx(expect_c(0)).margin(1e-9));
    // the short-span simple hypothesis is the most confident of the three
    CHECK(tb1->confidence > ta1->confidence);
    CHECK(tb1->confidence > tc->confidence);
}

TEST_CASE("induction needs a recent operation") {
    EngineConfig cfg;
    cfg.babble_prob = 0.0;
    Engine eng = make_engine(cfg);
    eng.ingest(sent("<A1 --> [left]>. :|:"));
    eng.ingest(sent("<A2 --> [right]>. :|:"));
    IngestResult r = eng.ingest(sent("G! :|:"));
    CHECK(r.executions.empty());  // babbling disabled, nothing learned yet
    eng.step(8);
    eng.ingest(sent("G. :|: {0.0 0.9}"));
    CHECK(eng.memory_size() == 0);  // no operation in the window, no hypotheses
}

TEST_CASE("a fired but unconfirmed prediction loses frequency and gains evidence") {
    Engine eng = make_engine();
    eng.ingest(sent("<(<A1 --> [left]> &/ ^left) =/> G>. {1.0 0.5}"));
    Term h = target({Term::prop("A1", "left")}, "^left");
    CHECK(eng.evidence_of(h)->total == Catch::Approx(1.0).margin(1e-12));

    eng.ingest(sent("<A1 --> [left]>. :|:"));
    IngestResult r = eng.ingest(sent("G! :|:"));
    REQUIRE(r.executions == std::vector<std::string>{"^left"});
    CHECK(eng.anticipation_count() == 1);

    double f_before = eng.query_hypothesis(h)->frequency;
    double w_before = eng.evidence_of(h)->total;
    eng.step(eng.config().deadline + 1);
    CHECK(eng.anticipation_count() == 0);
    CHECK(eng.query_hypothesis(h)->frequency < f_before);
    CHECK(eng.evidence_of(h)->total > w_before);
}

TEST_CASE("a confirmed prediction never lowers frequency") {
    Engine eng = make_engine();
    eng.ingest(sent("<(<A1 --> [left]> &/ ^left) =/> G>. {1.0 0.5}"));
    eng.ingest(sent("<A1 --> [left]>. :|:"));
    REQUIRE(eng.ingest(sent("G! :|:")).executions.size() == 1);
    eng.ingest(sent("G. :|:"));  // confirmation before the deadline
    CHECK(eng.anticipation_count() == 0);

    Term h = target({Term::prop("A1", "left")}, "^left");
    CHECK(eng.query_hypothesis(h)->frequency == 1.0);
    eng.step(200);  // resolved predictions cannot fail later
    CHECK(eng.query_hypothesis(h)->frequency == 1.0);
}

TEST_CASE("explicit disconfirmation settles the prediction immediately") {
    Engine eng = make_engine();
    eng.ingest(sent("<(<A1 --> [left]> &/ ^left) =/> G>. {1.0 0.5}"));
    eng.ingest(sent("<A1 --> [left]>. :|:"));
    REQUIRE(eng.ingest(sent("G! :|:")).executions.size() == 1);

    Term h = target({Term::prop("A1", "left")}, "^left");
    double f_before = eng.query_hypothesis(h)->frequency;
    eng.ingest(sent("G. :|: {0.0 0.9}"));
    CHECK(eng.anticipation_count() == 0);
    CHECK(eng.query_hypothesis(h)->frequency < f_before - 0.2);  // bet settled, not a nudge
}

TEST_CASE("anticipations are not duplicated while one is pending") {
    Engine eng = make_engine();
    eng.ingest(sent("<(<A1 --> [left]> &/ ^left) =/> G>. {1.0 0.5}"));
    eng.ingest(sent("<A1 --> [left]>. :|:"));
    REQUIRE(eng.ingest(sent("G! :|:")).executions.size() == 1);
    CHECK(eng.anticipation_count() == 1);
    // the stimulus is still in the window; the goal fires again
    REQUIRE(eng.ingest(sent("G! :|:")).executions.size() == 1);
    CHECK(eng.anticipation_count() == 1);
}

TEST_CASE("decision picks the maximum-expectation candidate") {
    auto build = [&](double c1, double c2) {
        Engine eng = make_engine();
        eng.ingest(sent("<(S1 &/ ^left) =/> G>. {0.9 " + format_real(c1) + "}"));
        eng.ingest(sent("<(S2 &/ ^right) =/> G>. {0.7 " + format_real(c2) + "}"));
        eng.ingest(sent("S1. :|:"));
        eng.ingest(sent("S2. :|:"));
        return eng;
    };
    Engine eng = build(0.6, 0.8);
    Decision d = eng.decide(sent("G! :|:"));
    REQUIRE(d.kind == Decision::Kind::Execute);
    CHECK(d.operation == "^left");
    // dt = 1: project, deduce against desire {1.0 0.9}, take expectation
    CHECK(d.expectation == Catch::Approx(0.6458).margin(1e-9));

    // scaling every candidate confidence by a common factor keeps the argmax
    Engine scaled = build(0.3, 0.4);
    Decision ds = scaled.decide(sent("G! :|:"));
    REQUIRE(ds.kind == Decision::Kind::Execute);
    CHECK(ds.operation == "^left");
}

TEST_CASE("babbling never preempts an above-threshold candidate") {
    Engine eng = make_engine();
    eng.ingest(sent("<(S1 &/ ^left) =/> G>. {1.0 0.8}"));
    eng.ingest(sent("S1. :|:"));
    for (int i = 0; i < 200; ++i) {
        Decision d = eng.decide(sent("G! :|:"));
        REQUIRE(d.kind == Decision::Kind::Execute);
        REQUIRE(d.operation == "^left");
    }
}

TEST_CASE("goals babble at the configured rate when nothing is known") {
    Engine eng = make_engine();
    int babbles = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        Decision d = eng.decide(sent("G! :|:"));
        if (d.kind == Decision::Kind::Babble) ++babbles;
    }
    double rate = static_cast<double>(babbles) / n;
    CHECK(rate > 0.88);
    CHECK(rate < 0.92);
}

TEST_CASE("goals without registered operations are an error") {
    Engine eng{EngineConfig{}};
    CHECK_THROWS_AS(eng.ingest(sent("G! :|:")), UnknownOperation);
}

TEST_CASE("operation-only and purely temporal hypotheses") {
    Engine eng = make_engine();
    eng.ingest(sent("<^left =/> G>."));  // default truth {1.0 0.9}: evidence capped at 4
    Term h = compose_implication({}, "^left", Term::atom("G"));
    CHECK(eng.evidence_of(h)->total == Catch::Approx(4.0));
    Decision d = eng.decide(sent("G! :|:"));
    REQUIRE(d.kind == Decision::Kind::Execute);
    CHECK(d.operation == "^left");

    // a link without any operation is stored but never drives decisions
    Engine eng2 = make_engine();
    eng2.set_babble_prob(0.0);
    eng2.ingest(sent("<q =/> G>."));
    CHECK(eng2.memory_size() == 1);
    Decision d2 = eng2.decide(sent("G! :|:"));
    CHECK(d2.kind == Decision::Kind::NoAction);
}

TEST_CASE("antecedents must be recent and in order") {
    EngineConfig cfg;
    cfg.babble_prob = 0.0;
    Engine eng = make_engine(cfg);
    eng.ingest(sent("<((S1 &/ S2) &/ ^left) =/> G>. {1.0 0.8}"));

    // out of order: S2 before S1
    eng.ingest(sent("S2. :|:"));
    eng.ingest(sent("S1. :|:"));
    CHECK(eng.decide(sent("G! :|:")).kind == Decision::Kind::NoAction);

    // in order: eligible
    eng.ingest(sent("S1. :|:"));
    eng.ingest(sent("S2. :|:"));
    CHECK(eng.decide(sent("G! :|:")).kind == Decision::Kind::Execute);

    // stale: outside the match horizon
    eng.step(eng.config().horizon + 1);
    CHECK(eng.decide(sent("G! :|:")).kind == Decision::Kind::NoAction);
}

TEST_CASE("overlapping stamps are choice-ruled, not revised") {
    Engine eng = make_engine();
    Term h = target({Term::prop("A1", "left")}, "^left");
    eng.revise_into_memory(h, {1.0, 0.5}, {42});
    Evidence e0 = *eng.evidence_of(h);

    // same stamp, same truth: no double counting
    eng.revise_into_memory(h, {1.0, 0.5}, {42});
    CHECK(eng.evidence_of(h)->total == e0.total);

    // same stamp, lower confidence: stored wins
    eng.revise_into_memory(h, {1.0, 0.3}, {42});
    CHECK(eng.evidence_of(h)->total == e0.total);

    // same stamp, higher confidence: challenger wins
    eng.revise_into_memory(h, {1.0, 0.7}, {42});
    CHECK(eng.evidence_of(h)->total == Catch::Approx(0.7 / 0.3));

    // disjoint stamp: genuine revision, evidence accumulates
    double before = eng.evidence_of(h)->total;
    eng.revise_into_memory(h, {1.0, 0.5}, {43});
    CHECK(eng.evidence_of(h)->total == Catch::Approx(before + 1.0));
}

TEST_CASE("stored evidence is capped") {
    Engine eng = make_engine();
    Term h = target({Term::prop("A1", "left")}, "^left");
    for (std::uint64_t s = 0; s < 40; ++s)
        eng.revise_into_memory(h, {1.0, 0.5}, {1000 + s});
    Evidence e = *eng.evidence_of(h);
    CHECK(e.total == Catch::Approx(eng.config().evidence_capacity));
    CHECK(eng.query_hypothesis(h)->frequency == Catch::Approx(1.0));
}

TEST_CASE("window, queue and memory respect their capacities") {
    Engine eng = make_engine();
    for (int i = 0; i < 700; ++i) {
        eng.ingest(sent("S" + std::to_string(i) + ". :|:"));
        REQUIRE(eng.window_size() <= eng.config().window_capacity);
        REQUIRE(eng.queue_size() <= eng.config().queue_capacity);
    }
    CHECK(eng.window_size() == eng.config().window_capacity);
    CHECK(eng.queue_size() == eng.config().queue_capacity);

    EngineConfig small;
    small.memory_capacity = 64;
    Engine eng2 = make_engine(small);
    for (int i = 0; i < 80; ++i) {
        Term h = target({Term::atom("S" + std::to_string(i))}, "^left");
        eng2.revise_into_memory(h, {1.0, 0.5}, {static_cast<std::uint64_t>(i) + 1});
        REQUIRE(eng2.memory_size() <= small.memory_capacity);
    }
    CHECK(eng2.memory_size() == small.memory_capacity);
    CHECK(eng2.eviction_count() == 16);
}

TEST_CASE("two step(50) calls equal one step(100)") {
    auto script = [](Engine& eng, bool split) {
        eng.ingest(sent("<(<A1 --> [left]> &/ ^left) =/> G>. {1.0 0.5}"));
        eng.ingest(sent("<A1 --> [left]>. :|:"));
        eng.ingest(sent("G! :|:"));
        if (split) { eng.step(50); eng.step(50); }
        else       { eng.step(100); }
    };
    Engine a = make_engine(), b = make_engine();
    script(a, true);
    script(b, false);
    CHECK(a.now() == b.now());
    CHECK(a.memory_snapshot() == b.memory_snapshot());
    CHECK(a.anticipation_count() == b.anticipation_count());
}

TEST_CASE("identical seeds replay identically") {
    auto run = [](std::uint64_t seed) {
        EngineConfig cfg;
        cfg.seed = seed;
        Engine eng = make_engine(cfg);
        std::vector<std::string> execs;
        for (int i = 0; i < 40; ++i) {
            eng.ingest(sent("<A1 --> [left]>. :|:"));
            eng.ingest(sent("<A2 --> [right]>. :|:"));
            IngestResult r = eng.ingest(sent("G! :|:"));
            std::string did = r.executions.empty() ? "-" : r.executions.front();
            execs.push_back(did);
            if (did != "-")
                eng.ingest(sent(did == "^left" ? "G. :|:" : "G. :|: {0.0 0.9}"));
            eng.step(100);
        }
        return std::make_pair(execs, eng.memory_snapshot());
    };
    auto [e1, m1] = run(1234);
    auto [e2, m2] = run(1234);
    CHECK(e1 == e2);
    CHECK(m1 == m2);
    auto [e3, m3] = run(1235);
    CHECK((e1 != e3 || m1 != m3));  // different seed, different babbles
}

TEST_CASE("attention queue pops by decayed priority") {
    Engine eng = make_engine();
    eng.ingest(sent("old. :|:"));
    eng.step(30);
    eng.ingest(sent("fresh. :|:"));
    auto first = eng.pop_attention();
    REQUIRE(first);
    CHECK(*first == "fresh");  // same base priority, less decay
    auto second = eng.pop_attention();
    REQUIRE(second);
    CHECK(*second == "old");
    CHECK(eng.queue_size() == 0);
}
