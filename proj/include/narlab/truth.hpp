#pragma once

// Experience-grounded truth values and the evidence arithmetic behind them.
// A truth value (f, c) compresses an evidence record: f = w+/w, c = w/(w+1).

#include <cmath>
#include <stdexcept>

namespace narlab {

struct TruthValue {
    double frequency = 1.0;
    double confidence = 0.9;

    friend bool operator==(const TruthValue& a, const TruthValue& b) {
        return a.frequency == b.frequency && a.confidence == b.confidence;
    }
};

// Positive and total evidence weight. total == 0 means "no evidence yet".
struct Evidence {
    double positive = 0.0;
    double total = 0.0;
};

class NoEvidenceError : public std::logic_error {
public:
    NoEvidenceError() : std::logic_error("truth value requested from empty evidence") {}
};

inline TruthValue truth_from_evidence(const Evidence& e) {
    if (e.total <= 0.0) throw NoEvidenceError();
    return {e.positive / e.total, e.total / (e.total + 1.0)};
}

// Inverse of truth_from_evidence; requires c < 1, which holds for every
// truth value produced from finite evidence.
inline Evidence evidence_from_truth(const TruthValue& t) {
    double w = t.confidence / (1.0 - t.confidence);
    return {t.frequency * w, w};
}

// Revision: evidence-space addition. Caller guarantees the premises rest on
// disjoint evidence (the engine enforces this through stamps).
inline TruthValue revise(const TruthValue& a, const TruthValue& b) {
    Evidence ea = evidence_from_truth(a);
    Evidence eb = evidence_from_truth(b);
    return truth_from_evidence({ea.positive + eb.positive, ea.total + eb.total});
}

// Deduction: f = f1*f2, c = f1*f2*c1*c2.
inline TruthValue deduction(const TruthValue& a, const TruthValue& b) {
    double f = a.frequency * b.frequency;
    return {f, f * a.confidence * b.confidence};
}

// Decision expectation in [0, 1]; 0.5 is total indifference.
inline double expectation(const TruthValue& t) {
    return t.confidence * (t.frequency - 0.5) + 0.5;
}

// Temporal projection: confidence decays by decay^dt, frequency is kept.
inline TruthValue project(const TruthValue& t, long long dt, double decay) {
    if (dt <= 0) return t;
    return {t.frequency, t.confidence * std::pow(decay, static_cast<double>(dt))};
}

} // namespace narlab
