#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ipstk/linalg.hpp"
#include "ipstk/poly.hpp"

namespace ipstk {

/// Row label of a span program: a z-literal or the constant 1.
struct SpanLabel {
    enum class Kind { Const1, Pos, Neg };
    Kind kind = Kind::Const1;
    VarId var = 0;

    static SpanLabel one() { return SpanLabel{Kind::Const1, 0}; }
    static SpanLabel pos(VarId v) { return SpanLabel{Kind::Pos, v}; }
    static SpanLabel neg(VarId v) { return SpanLabel{Kind::Neg, v}; }

    bool selected(const std::map<VarId, bool>& alpha) const {
        switch (kind) {
            case Kind::Const1: return true;
            case Kind::Pos: return alpha.at(var);
            case Kind::Neg: return !alpha.at(var);
        }
        return false;
    }
};

struct SpanEntry {
    SpanLabel label;
    SparsePoly vector;
    // Extraction provenance (not serialized): source axiom and cut slot.
    int axiom = -1;
    int slot = -1;
};

/// Span program over a polynomial vector space: labeled vectors plus a
/// target. On input alpha it accepts iff the target lies in the span of the
/// vectors whose labels evaluate to 1. Size is the number of entries.
struct SpanProgram {
    Field field;
    VarTablePtr table;
    std::vector<SpanEntry> entries;
    SparsePoly target;
    std::set<VarId> z_vars;

    SpanProgram(Field f, VarTablePtr t, SparsePoly tgt)
        : field(f), table(std::move(t)), target(std::move(tgt)) {}

    void add(SpanLabel label, SparsePoly vec, int axiom = -1, int slot = -1) {
        require_same_field(field, vec.field());
        require_same_table(table, vec.table());
        if (label.kind != SpanLabel::Kind::Const1 && !z_vars.count(label.var))
            throw std::invalid_argument("span label variable outside the z-set");
        entries.push_back(SpanEntry{label, std::move(vec), axiom, slot});
    }

    std::size_t size() const { return entries.size(); }
};

/// Evaluates the program on a total z-assignment; the witnessing combination
/// (indexed like the selected set) is available to callers that need it.
struct SpanEvalResult {
    bool accepted = false;
    std::vector<std::size_t> selected;          // entry indices picked by alpha
    std::optional<std::vector<Fe>> combination; // over `selected`, when accepted
};

inline SpanEvalResult span_eval_witness(const SpanProgram& s,
                                        const std::map<VarId, bool>& alpha) {
    for (VarId v : s.z_vars)
        if (!alpha.count(v))
            throw std::invalid_argument("span_eval: assignment does not cover the z-set");
    SpanEvalResult res;
    std::vector<SparsePoly> picked;
    for (std::size_t i = 0; i < s.entries.size(); ++i)
        if (s.entries[i].label.selected(alpha)) {
            res.selected.push_back(i);
            picked.push_back(s.entries[i].vector);
        }
    auto span = span_membership(picked, s.target);
    res.accepted = span.inside;
    res.combination = std::move(span.combination);
    return res;
}

inline bool span_eval(const SpanProgram& s, const std::map<VarId, bool>& alpha) {
    return span_eval_witness(s, alpha).accepted;
}

/// Monotone: no row labeled with a negative literal (constant-1 rows are
/// fine).
inline bool is_monotone(const SpanProgram& s) {
    for (const auto& e : s.entries)
        if (e.label.kind == SpanLabel::Kind::Neg) return false;
    return true;
}

struct DesugarResult {
    SpanProgram program;
    /// Set only in the monotone case, when the original program accepts the
    /// all-zero assignment (i.e. computes the constant 1 function); the
    /// desugared program then differs there.
    bool constant_one_flag = false;
};

/// Removes constant-1 labels. A non-monotone program replaces each (1, v) by
/// the pair (z, v), (~z, v) on a fixed pivot variable, growing at most 2x. A
/// monotone program replaces (1, v) by (z_i, v) for every z-variable, growing
/// at most |z| times, and computes the same function unless it is constantly
/// 1 (reported through the flag).
inline DesugarResult desugar_constant_labels(const SpanProgram& s) {
    if (s.z_vars.empty())
        throw std::invalid_argument("desugar_constant_labels: empty z-variable set");
    bool monotone = is_monotone(s);
    DesugarResult out{SpanProgram(s.field, s.table, s.target), false};
    out.program.z_vars = s.z_vars;
    if (monotone) {
        std::map<VarId, bool> zeros;
        for (VarId v : s.z_vars) zeros[v] = false;
        out.constant_one_flag = span_eval(s, zeros);
    }
    // Pivot: lexicographically first z-variable by name.
    VarId pivot = *s.z_vars.begin();
    for (VarId v : s.z_vars)
        if (s.table->name(v) < s.table->name(pivot)) pivot = v;
    for (const auto& e : s.entries) {
        if (e.label.kind != SpanLabel::Kind::Const1) {
            out.program.add(e.label, e.vector, e.axiom, e.slot);
            continue;
        }
        if (monotone) {
            for (VarId v : s.z_vars)
                out.program.add(SpanLabel::pos(v), e.vector, e.axiom, e.slot);
        } else {
            out.program.add(SpanLabel::pos(pivot), e.vector, e.axiom, e.slot);
            out.program.add(SpanLabel::neg(pivot), e.vector, e.axiom, e.slot);
        }
    }
    return out;
}

} // namespace ipstk
