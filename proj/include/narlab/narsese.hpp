#pragma once

// Line-oriented Narsese front end: sentences, config directives, bare step
// counts, and comments. Covers the temporal subset only: property
// inheritance, sequences, one level of procedural implication, operations.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

#include "term.hpp"
#include "truth.hpp"

namespace narlab {

enum class Punctuation { Judgment, Goal };
enum class Occurrence { Now, Eternal };

struct Sentence {
    Term term;
    Punctuation punctuation = Punctuation::Judgment;
    TruthValue truth{1.0, 0.9};  // desire value when punctuation is Goal
    Occurrence occurrence = Occurrence::Eternal;

    friend bool operator==(const Sentence& a, const Sentence& b) {
        return a.term == b.term && a.punctuation == b.punctuation &&
               a.truth == b.truth && a.occurrence == b.occurrence;
    }
};

struct ConfigDirective {
    std::string key;
    std::string value;  // normalized: "setopname" carries "<index> ^<name>"
};

struct StepCount { long long n = 1; };
struct Comment {};

using ParsedInput = std::variant<Sentence, ConfigDirective, StepCount, Comment>;

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& what, std::size_t column)
        : std::runtime_error(what + " (column " + std::to_string(column) + ")"),
          column_(column) {}
    std::size_t column() const { return column_; }
private:
    std::size_t column_;  // 1-based offset of the offending character
};

class UnknownDirective : public std::runtime_error {
public:
    explicit UnknownDirective(const std::string& key)
        : std::runtime_error("unknown directive: *" + key), key_(key) {}
    const std::string& key() const { return key_; }
private:
    std::string key_;
};

inline const std::set<std::string>& directive_keys() {
    static const std::set<std::string> keys = {
        "setopname", "babblingops", "motorbabbling", "volume",
        "decay", "threshold", "deadline", "seed",
    };
    return keys;
}

// Prints v with the fewest decimals that still parse back to the same
// double, so "0.9" stays "0.9" while arbitrary values stay exact.
inline std::string format_real(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    std::string out = buf;
    // keep whole numbers visibly real: 1 -> 1.0
    if (out.find('.') == std::string::npos && out.find('e') == std::string::npos) out += ".0";
    return out;
}

inline std::string format_truth(const TruthValue& t) {
    return "{" + format_real(t.frequency) + " " + format_real(t.confidence) + "}";
}

namespace detail {

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) {}

    std::size_t column() const { return i_ + 1; }
    void skip_ws() { while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_; }

    bool at_end() {
        skip_ws();
        if (i_ >= s_.size()) return true;
        return s_[i_] == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '/';
    }

    char peek() { skip_ws(); return i_ < s_.size() ? s_[i_] : '\0'; }

    bool accept(char c) {
        skip_ws();
        if (i_ < s_.size() && s_[i_] == c) { ++i_; return true; }
        return false;
    }

    bool accept(const char* tok) {
        skip_ws();
        std::size_t n = std::strlen(tok);
        if (s_.compare(i_, n, tok) == 0) { i_ += n; return true; }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) fail(std::string("expected ") + what);
    }

    [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, column()); }

    static bool reserved(char c) {
        return std::strchr("<>(){}[]!.:|^&/*,=", c) != nullptr ||
               c == ' ' || c == '\t' || c == '\r';
    }

    // A name run; '-' participates unless it opens the '-->' copula.
    std::string name() {
        skip_ws();
        std::size_t start = i_;
        while (i_ < s_.size() && !reserved(s_[i_])) {
            if (s_[i_] == '-' && s_.compare(i_ + 1, 2, "->") == 0) break;
            ++i_;
        }
        if (i_ == start) fail("expected a name");
        return s_.substr(start, i_ - start);
    }

    double number() {
        skip_ws();
        std::size_t start = i_;
        while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) ||
                                  std::strchr(".eE+-", s_[i_]) != nullptr))
            ++i_;
        if (i_ == start) fail("expected a number");
        std::string tok = s_.substr(start, i_ - start);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw SyntaxError("malformed number", start + 1);
        return v;
    }

    std::string rest() {
        skip_ws();
        std::size_t stop = s_.size();
        auto c = s_.find("//", i_);
        if (c != std::string::npos) stop = c;
        std::string r = s_.substr(i_, stop - i_);
        while (!r.empty() && (r.back() == ' ' || r.back() == '\t' || r.back() == '\r')) r.pop_back();
        i_ = stop;
        return r;
    }

private:
    const std::string& s_;
    std::size_t i_ = 0;
};

inline void validate_implication(const Term& imp, std::size_t column) {
    if (contains_implication(*imp.left) || contains_implication(*imp.right))
        throw SyntaxError("nested implications are not supported", column);
    if (count_operations(*imp.left) > 1)
        throw SyntaxError("implication antecedent may contain at most one operation", column);
}

inline Term parse_term(Lexer& lx) {
    char c = lx.peek();
    if (c == '<') {
        std::size_t col = lx.column();
        lx.expect('<', "'<'");
        Term first = parse_term(lx);
        if (lx.accept("-->")) {
            if (first.kind != TermKind::Atom)
                throw SyntaxError("property subject must be an atom", col);
            lx.expect('[', "'['");
            std::string p = lx.name();
            lx.expect(']', "']'");
            lx.expect('>', "'>'");
            return Term::prop(first.name, p);
        }
        if (lx.accept("=/>")) {
            Term cons = parse_term(lx);
            lx.expect('>', "'>'");
            Term imp = Term::implication(std::move(first), std::move(cons));
            validate_implication(imp, col);
            return imp;
        }
        lx.fail("expected '-->' or '=/>'");
    }
    if (c == '(') {
        lx.expect('(', "'('");
        Term t = parse_term(lx);
        if (!lx.accept("&/")) lx.fail("expected '&/'");
        t = Term::seq(std::move(t), parse_term(lx));
        while (lx.accept("&/")) t = Term::seq(std::move(t), parse_term(lx));
        lx.expect(')', "')'");
        return t;
    }
    if (c == '^') {
        lx.expect('^', "'^'");
        return Term::op(lx.name());
    }
    if (c == '\0' || Lexer::reserved(c)) lx.fail("expected a term");
    return Term::atom(lx.name());
}

inline TruthValue parse_truth(Lexer& lx) {
    std::size_t col = lx.column();
    lx.expect('{', "'{'");
    double f = lx.number();
    lx.accept(',');  // the paper prints "{0.98, 0.41}" in derivations
    double c = lx.number();
    lx.expect('}', "'}'");
    if (f < 0.0 || f > 1.0) throw SyntaxError("frequency must be in [0,1]", col);
    if (c < 0.0 || c >= 1.0) throw SyntaxError("confidence must be in [0,1)", col);
    return {f, c};
}

inline ParsedInput parse_directive(Lexer& lx) {
    lx.expect('*', "'*'");
    std::size_t col = lx.column();
    std::string key = lx.name();
    if (directive_keys().count(key) == 0) throw UnknownDirective(key);
    if (key == "setopname") {
        std::size_t icol = lx.column();
        double idx = lx.number();
        if (idx < 1 || idx != static_cast<long long>(idx))
            throw SyntaxError("operation index must be a positive integer", icol);
        lx.expect('^', "'^'");
        std::string op = lx.name();
        if (!lx.at_end()) lx.fail("unexpected trailing input");
        return ConfigDirective{key, std::to_string(static_cast<long long>(idx)) + " ^" + op};
    }
    lx.expect('=', "'='");
    std::string value = lx.rest();
    if (value.empty()) throw SyntaxError("directive value must not be empty", col);
    return ConfigDirective{key, value};
}

} // namespace detail

inline ParsedInput parse_line(const std::string& text) {
    detail::Lexer lx(text);
    if (lx.at_end()) return Comment{};
    if (lx.peek() == '*') return detail::parse_directive(lx);

    // A line that is nothing but an integer advances the clock.
    {
        detail::Lexer probe(text);
        std::size_t col = probe.column();
        std::string tok = probe.rest();
        bool numeric = !tok.empty();
        for (std::size_t k = 0; k < tok.size(); ++k) {
            char ch = tok[k];
            if (!(std::isdigit(static_cast<unsigned char>(ch)) || (k == 0 && (ch == '+' || ch == '-'))))
                { numeric = false; break; }
        }
        if (numeric) {
            long long n = std::strtoll(tok.c_str(), nullptr, 10);
            if (n < 1) throw SyntaxError("step count must be >= 1", col);
            return StepCount{n};
        }
    }

    Sentence s;
    s.term = detail::parse_term(lx);
    if (lx.accept('!')) s.punctuation = Punctuation::Goal;
    else if (lx.accept('.')) s.punctuation = Punctuation::Judgment;
    else s.punctuation = Punctuation::Judgment;  // bare term: the paper's derived-hypothesis form
    if (lx.accept(":|:")) s.occurrence = Occurrence::Now;
    if (lx.peek() == '{') s.truth = detail::parse_truth(lx);
    if (!lx.at_end()) lx.fail("unexpected trailing input");
    return s;
}

inline std::string serialize(const Sentence& s) {
    std::string out = s.term.str();
    out += s.punctuation == Punctuation::Goal ? '!' : '.';
    if (s.occurrence == Occurrence::Now) out += " :|:";
    if (!(s.truth == TruthValue{1.0, 0.9})) out += " " + format_truth(s.truth);
    return out;
}

} // namespace narlab
