#pragma once

// Symbolic terms: atoms, property inheritance <S --> [p]>, operations ^op,
// sequences (a &/ b), and temporal implications <ante =/> cons>.
// Terms are immutable; children are shared, copies are cheap.

#include <memory>
#include <string>
#include <vector>

namespace narlab {

enum class TermKind { Atom, Property, Operation, Sequence, Implication };

struct Term {
    TermKind kind = TermKind::Atom;
    std::string name;      // Atom name, Property subject, Operation name (no caret)
    std::string property;  // Property only
    std::shared_ptr<const Term> left, right;  // Sequence / Implication children

    static Term atom(std::string n) {
        Term t; t.kind = TermKind::Atom; t.name = std::move(n); return t;
    }
    static Term prop(std::string subject, std::string p) {
        Term t; t.kind = TermKind::Property;
        t.name = std::move(subject); t.property = std::move(p); return t;
    }
    static Term op(std::string n) {
        Term t; t.kind = TermKind::Operation; t.name = std::move(n); return t;
    }
    static Term seq(Term a, Term b) {
        Term t; t.kind = TermKind::Sequence;
        t.left = std::make_shared<const Term>(std::move(a));
        t.right = std::make_shared<const Term>(std::move(b));
        return t;
    }
    static Term implication(Term ante, Term cons) {
        Term t; t.kind = TermKind::Implication;
        t.left = std::make_shared<const Term>(std::move(ante));
        t.right = std::make_shared<const Term>(std::move(cons));
        return t;
    }

    // Canonical text; also the identity used for map keys and equality.
    std::string str() const {
        switch (kind) {
            case TermKind::Atom: return name;
            case TermKind::Property: return "<" + name + " --> [" + property + "]>";
            case TermKind::Operation: return "^" + name;
            case TermKind::Sequence: return "(" + left->str() + " &/ " + right->str() + ")";
            case TermKind::Implication: return "<" + left->str() + " =/> " + right->str() + ">";
        }
        return {};
    }

    friend bool operator==(const Term& a, const Term& b) {
        if (a.kind != b.kind || a.name != b.name || a.property != b.property) return false;
        if (static_cast<bool>(a.left) != static_cast<bool>(b.left)) return false;
        if (a.left && !(*a.left == *b.left)) return false;
        if (static_cast<bool>(a.right) != static_cast<bool>(b.right)) return false;
        if (a.right && !(*a.right == *b.right)) return false;
        return true;
    }
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
};

inline int count_operations(const Term& t) {
    switch (t.kind) {
        case TermKind::Operation: return 1;
        case TermKind::Sequence:  return count_operations(*t.left) + count_operations(*t.right);
        case TermKind::Implication: return count_operations(*t.left) + count_operations(*t.right);
        default: return 0;
    }
}

inline bool contains_implication(const Term& t) {
    if (t.kind == TermKind::Implication) return true;
    if (t.left && contains_implication(*t.left)) return true;
    if (t.right && contains_implication(*t.right)) return true;
    return false;
}

// Left-spine flattening of a sequence: ((a &/ b) &/ c) -> [a, b, c].
inline void flatten_sequence(const Term& t, std::vector<Term>& out) {
    if (t.kind == TermKind::Sequence) {
        flatten_sequence(*t.left, out);
        flatten_sequence(*t.right, out);
    } else {
        out.push_back(t);
    }
}

// A procedural implication decomposed into its parts. The operation slot is
// empty for purely temporal links.
struct ImplicationParts {
    std::vector<Term> stimuli;  // non-operation antecedent elements, in order
    std::string op;             // operation name with caret, or empty
    Term consequent;
};

inline ImplicationParts decompose_implication(const Term& imp) {
    ImplicationParts p;
    p.consequent = *imp.right;
    std::vector<Term> elems;
    flatten_sequence(*imp.left, elems);
    for (auto& e : elems) {
        if (e.kind == TermKind::Operation) p.op = e.str();
        else p.stimuli.push_back(e);
    }
    return p;
}

// Rebuild the canonical (left-associated, operation-last) implication term.
inline Term compose_implication(const std::vector<Term>& stimuli,
                                const std::string& op_with_caret,
                                const Term& consequent) {
    Term ante;
    bool have = false;
    for (const auto& s : stimuli) {
        ante = have ? Term::seq(std::move(ante), s) : s;
        have = true;
    }
    if (!op_with_caret.empty()) {
        Term o = Term::op(op_with_caret.substr(1));
        ante = have ? Term::seq(std::move(ante), std::move(o)) : std::move(o);
        have = true;
    }
    return Term::implication(std::move(ante), consequent);
}

} // namespace narlab
