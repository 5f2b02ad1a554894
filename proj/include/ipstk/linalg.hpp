#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "ipstk/poly.hpp"

namespace ipstk {

/// One linear equation sum_i coeffs[i] * unknown_i = rhs over a field.
struct LinearEq {
    std::map<std::size_t, Fe> coeffs;
    Fe rhs;
};

/// Result of exact Gaussian elimination. `solution` is a particular solution
/// with free unknowns set to zero; `pinned[i]` marks unknowns whose value is
/// forced in every solution (pivot row with no free column).
struct LinearSolveResult {
    bool consistent = false;
    std::vector<Fe> solution;
    std::vector<bool> pinned;
};

/// Dense Gauss-Jordan over an exact field. Desk scale: rows x cols fits in
/// memory as Fe values.
inline LinearSolveResult solve_linear_system(const std::vector<LinearEq>& eqs,
                                             std::size_t unknowns, const Field& f) {
    std::size_t rows = eqs.size();
    std::vector<std::vector<Fe>> a(rows, std::vector<Fe>(unknowns + 1, f.zero()));
    for (std::size_t r = 0; r < rows; ++r) {
        for (const auto& [c, v] : eqs[r].coeffs) {
            if (c >= unknowns) throw std::invalid_argument("unknown index out of range");
            a[r][c] = f.add(a[r][c], v);
        }
        a[r][unknowns] = eqs[r].rhs;
    }

    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < unknowns && row < rows; ++col) {
        std::size_t sel = row;
        while (sel < rows && f.is_zero(a[sel][col])) ++sel;
        if (sel == rows) continue;
        std::swap(a[sel], a[row]);
        Fe inv = f.inv(a[row][col]);
        for (std::size_t c = col; c <= unknowns; ++c) a[row][c] = f.mul(a[row][c], inv);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || f.is_zero(a[r][col])) continue;
            Fe factor = a[r][col];
            for (std::size_t c = col; c <= unknowns; ++c)
                a[r][c] = f.sub(a[r][c], f.mul(factor, a[row][c]));
        }
        pivot_col.push_back(col);
        ++row;
    }

    LinearSolveResult res;
    for (std::size_t r = row; r < rows; ++r)
        if (!f.is_zero(a[r][unknowns])) return res; // 0 = nonzero: inconsistent
    res.consistent = true;
    res.solution.assign(unknowns, f.zero());
    res.pinned.assign(unknowns, false);

    std::vector<bool> is_pivot(unknowns, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;
    for (std::size_t r = 0; r < pivot_col.size(); ++r) {
        std::size_t c = pivot_col[r];
        res.solution[c] = a[r][unknowns];
        bool forced = true;
        for (std::size_t c2 = 0; c2 < unknowns; ++c2)
            if (c2 != c && !is_pivot[c2] && !f.is_zero(a[r][c2])) {
                forced = false;
                break;
            }
        res.pinned[c] = forced;
    }
    return res;
}

/// Answer to a span-membership query, with the exact witnessing combination
/// when the target is inside.
struct SpanResult {
    bool inside = false;
    std::optional<std::vector<Fe>> combination;
};

/// Decides whether `target` is an F-linear combination of `vectors`, by
/// Gaussian elimination over the union of the monomial supports. Positive
/// answers come with a combination that reproduces the target exactly.
inline SpanResult span_membership(const std::vector<SparsePoly>& vectors,
                                  const SparsePoly& target) {
    const Field& f = target.field();
    for (const auto& v : vectors) {
        require_same_field(f, v.field());
        require_same_table(target.table(), v.table());
    }

    // Row per monomial in the combined support, column per vector.
    std::map<Monomial, std::size_t, TermOrder> row_of;
    auto row_index = [&](const Monomial& m) {
        auto [it, fresh] = row_of.try_emplace(m, row_of.size());
        return it->second;
    };
    std::vector<std::map<std::size_t, Fe>> cols(vectors.size());
    for (std::size_t j = 0; j < vectors.size(); ++j)
        for (const auto& [m, c] : vectors[j].terms()) cols[j][row_index(m)] = c;
    std::map<std::size_t, Fe> rhs;
    for (const auto& [m, c] : target.terms()) rhs[row_index(m)] = c;

    std::size_t rows = row_of.size();
    std::vector<LinearEq> eqs(rows);
    for (auto& e : eqs) e.rhs = f.zero();
    for (std::size_t j = 0; j < vectors.size(); ++j)
        for (const auto& [r, c] : cols[j]) eqs[r].coeffs[j] = c;
    for (const auto& [r, c] : rhs) eqs[r].rhs = c;

    auto sol = solve_linear_system(eqs, vectors.size(), f);
    SpanResult res;
    res.inside = sol.consistent;
    if (!sol.consistent) return res;

    // Re-substitute and check the witness against the target, term by term.
    SparsePoly check = SparsePoly::zero(f, target.table());
    for (std::size_t j = 0; j < vectors.size(); ++j)
        check += vectors[j].scale(sol.solution[j]);
    if (check != target)
        throw std::logic_error("span_membership witness failed re-substitution");
    res.combination = std::move(sol.solution);
    return res;
}

} // namespace ipstk
