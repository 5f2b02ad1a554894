#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ipstk/formulas.hpp"
#include "ipstk/roabp.hpp"

namespace ipstk {

/// Linear IPS certificate with roABP coefficients: one coefficient program
/// per axiom of the system (zero programs allowed), all in one shared
/// variable order. Target 1 is a refutation; a general target is a
/// derivation.
struct LinearIpsCertificate {
    PolySystem system;
    std::vector<VarId> order;
    std::vector<Roabp> coefficients;
    SparsePoly target;

    LinearIpsCertificate(PolySystem sys, std::vector<VarId> ord, std::vector<Roabp> coeffs,
                         SparsePoly tgt)
        : system(std::move(sys)),
          order(std::move(ord)),
          coefficients(std::move(coeffs)),
          target(std::move(tgt)) {
        if (coefficients.size() != system.entries.size())
            throw std::invalid_argument("certificate needs one coefficient per axiom");
        for (const auto& c : coefficients)
            if (c.order() != order)
                throw std::invalid_argument("coefficient roABP order differs from the shared order");
    }

    /// Width is always recomputed from the coefficients, never trusted.
    std::size_t width() const {
        std::size_t w = 1;
        for (const auto& c : coefficients) w = std::max(w, c.width());
        return w;
    }
};

/// All-zero coefficient vector for a system, in the given order.
inline std::vector<Roabp> zero_coefficients(const PolySystem& s, const std::vector<VarId>& order) {
    std::vector<Roabp> cs;
    cs.reserve(s.entries.size());
    for (std::size_t i = 0; i < s.entries.size(); ++i)
        cs.push_back(Roabp::zero_program(s.field, s.table, order));
    return cs;
}

enum class VerifyMode { Expand, Randomized };

struct VerifyResult {
    bool valid = false;
    std::size_t width = 0;
    std::string report;
};

/// Checks sum_i coeff_i * p_i = target. Expand mode is an exact formal
/// identity check at desk scale. Randomized mode evaluates the whole
/// combination at uniform random points; each trial accepts a wrong
/// certificate with probability at most D / |sample space| where D bounds the
/// total degree of the difference polynomial (DeMillo-Lipton-Schwartz-Zippel).
inline VerifyResult verify_certificate(const LinearIpsCertificate& cert, VerifyMode mode,
                                       const Config& cfg, std::mt19937_64& rng) {
    const Field& f = cert.system.field;
    const VarTablePtr& t = cert.system.table;
    std::set<VarId> in_order(cert.order.begin(), cert.order.end());
    for (const auto& e : cert.system.entries)
        for (VarId v : e.poly.vars())
            if (!in_order.count(v))
                throw std::invalid_argument("axiom variable missing from the shared order: " +
                                            t->name(v));
    for (VarId v : cert.target.vars())
        if (!in_order.count(v))
            throw std::invalid_argument("target variable missing from the shared order");

    VerifyResult res;
    res.width = cert.width();
    std::ostringstream report;

    if (mode == VerifyMode::Expand) {
        SparsePoly sum = SparsePoly::zero(f, t);
        for (std::size_t i = 0; i < cert.coefficients.size(); ++i) {
            if (cert.coefficients[i].is_structural_zero()) continue;
            sum += cert.coefficients[i].expand(cfg.expansion_budget) * cert.system.entries[i].poly;
        }
        res.valid = sum == cert.target;
        if (res.valid) {
            report << "valid, width " << res.width;
        } else {
            report << "invalid: combination differs from target by "
                   << (sum - cert.target).sparsity() << " term(s)";
        }
    } else {
        std::uint64_t dbound = cert.target.degree();
        for (std::size_t i = 0; i < cert.coefficients.size(); ++i)
            dbound = std::max(dbound, cert.coefficients[i].degree_bound() +
                                          cert.system.entries[i].poly.degree());
        res.valid = true;
        for (int trial = 0; trial < cfg.randomized_trials && res.valid; ++trial) {
            std::map<VarId, Fe> point;
            for (VarId v : cert.order) point[v] = f.sample(rng);
            Fe sum = f.zero();
            for (std::size_t i = 0; i < cert.coefficients.size(); ++i) {
                if (cert.coefficients[i].is_structural_zero()) continue;
                sum = f.add(sum, f.mul(cert.coefficients[i].eval(point),
                                       cert.system.entries[i].poly.eval(point)));
            }
            if (sum != cert.target.eval(point)) res.valid = false;
        }
        if (res.valid) {
            report << "valid (randomized, " << cfg.randomized_trials
                   << " trials, per-trial false-accept <= " << dbound << "/"
                   << f.sample_space_size() << "), width " << res.width;
        } else {
            report << "invalid: random evaluation mismatch";
        }
    }
    res.report = report.str();
    return res;
}

/// Substitutes derivations into a certificate: given `outer` over axioms A and
/// for each a in A a derivation of a from B, produces a certificate over B.
/// The coefficient for b is sum_a outer[a] (x) inner_a[b], so the width is at
/// most sum_a width(outer) * width(inner_a).
inline LinearIpsCertificate compose_derivation(const LinearIpsCertificate& outer,
                                               const std::vector<LinearIpsCertificate>& inner) {
    if (inner.size() != outer.system.entries.size())
        throw std::invalid_argument("compose: need one derivation per outer axiom");
    for (std::size_t i = 0; i < inner.size(); ++i) {
        if (inner[i].order != outer.order)
            throw std::invalid_argument("compose: variable order mismatch");
        if (inner[i].target != outer.system.entries[i].poly)
            throw std::invalid_argument("compose: derivation target differs from outer axiom");
        if (inner[i].system.entries.size() != inner[0].system.entries.size())
            throw std::invalid_argument("compose: derivations disagree on the base system");
        for (std::size_t j = 0; j < inner[i].system.entries.size(); ++j)
            if (inner[i].system.entries[j].poly != inner[0].system.entries[j].poly)
                throw std::invalid_argument("compose: derivations disagree on the base system");
    }
    const PolySystem& base = inner[0].system;
    std::vector<Roabp> coeffs;
    coeffs.reserve(base.entries.size());
    for (std::size_t j = 0; j < base.entries.size(); ++j) {
        std::optional<Roabp> acc;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            if (outer.coefficients[i].is_structural_zero()) continue;
            if (inner[i].coefficients[j].is_structural_zero()) continue;
            Roabp term = roabp_mul(outer.coefficients[i], inner[i].coefficients[j]);
            acc = acc ? roabp_add(*acc, term) : std::move(term);
        }
        coeffs.push_back(acc ? std::move(*acc)
                             : Roabp::zero_program(base.field, base.table, outer.order));
    }
    return LinearIpsCertificate(base, outer.order, std::move(coeffs), outer.target);
}

namespace detail {

/// All monomials of total degree <= d over the given variables.
inline void enumerate_monomials(const std::vector<VarId>& vars, std::size_t idx,
                                std::uint32_t budget, Monomial current,
                                std::vector<Monomial>& out) {
    if (idx == vars.size()) {
        out.push_back(std::move(current));
        return;
    }
    for (std::uint32_t e = 0; e <= budget; ++e)
        enumerate_monomials(vars, idx + 1, budget - e, current.times(Monomial::var(vars[idx], e)),
                            out);
}

/// Sparse row-echelon solver for A c = b; rows arrive as sorted sparse
/// (column, value) vectors with the right-hand side stored under column
/// `ncols`.
class SparseGauss {
public:
    SparseGauss(std::size_t ncols, const Field& f) : ncols_(ncols), f_(f) {}

    using Row = std::vector<std::pair<std::size_t, Fe>>;

    /// Reduces and installs a row; returns false when the system becomes
    /// inconsistent (a row reduced to 0 = nonzero).
    bool add_row(Row row) {
        while (!row.empty()) {
            std::size_t lead = row.front().first;
            if (lead == ncols_) return false; // 0 = nonzero
            auto it = pivots_.find(lead);
            if (it == pivots_.end()) {
                Fe inv = f_.inv(row.front().second);
                for (auto& [c, v] : row) v = f_.mul(v, inv);
                pivots_.emplace(lead, std::move(row));
                return true;
            }
            row = subtract(row, it->second, row.front().second);
        }
        return true; // redundant row
    }

    /// Particular solution with free columns zero.
    std::vector<Fe> solve() const {
        std::vector<Fe> sol(ncols_, f_.zero());
        for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
            std::size_t c = it->first;
            Fe val = f_.zero();
            for (const auto& [col, v] : it->second) {
                if (col == c) continue;
                if (col == ncols_) val = f_.add(val, v);
                else val = f_.sub(val, f_.mul(v, sol[col]));
            }
            sol[c] = val;
        }
        return sol;
    }

private:
    Row subtract(const Row& a, const Row& b, const Fe& factor) const {
        Row out;
        out.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
                out.push_back(a[i++]);
            } else if (i == a.size() || b[j].first < a[i].first) {
                Fe v = f_.neg(f_.mul(factor, b[j].second));
                if (!f_.is_zero(v)) out.emplace_back(b[j].first, v);
                ++j;
            } else {
                Fe v = f_.sub(a[i].second, f_.mul(factor, b[j].second));
                if (!f_.is_zero(v)) out.emplace_back(a[i].first, v);
                ++i;
                ++j;
            }
        }
        return out;
    }

    std::size_t ncols_;
    Field f_;
    std::map<std::size_t, Row> pivots_;
};

} // namespace detail

/// Test oracle: searches for a Nullstellensatz refutation with
/// deg(q_i * p_i) <= degree by solving the linear system over the monomial
/// coefficients of the q_i, then packaging each q_i as an roABP in the given
/// order. Returns nullopt when no refutation of that degree exists.
inline std::optional<LinearIpsCertificate> find_ns_refutation(const PolySystem& system,
                                                              std::uint32_t degree,
                                                              const std::vector<VarId>& order,
                                                              const Config& cfg = Config{}) {
    const Field& f = system.field;
    const VarTablePtr& t = system.table;
    std::set<VarId> in_order(order.begin(), order.end());
    for (VarId v : system.occurring_vars())
        if (!in_order.count(v))
            throw std::invalid_argument("system variable missing from the order: " + t->name(v));

    // Unknowns: (axiom i, monomial m) with deg(m) + deg(p_i) <= degree.
    struct Unknown {
        std::size_t axiom;
        Monomial mono;
    };
    std::vector<Unknown> unknowns;
    std::vector<std::size_t> first_unknown(system.entries.size() + 1, 0);
    for (std::size_t i = 0; i < system.entries.size(); ++i) {
        first_unknown[i] = unknowns.size();
        const SparsePoly& p = system.entries[i].poly;
        if (p.is_zero() || p.degree() > degree) continue;
        std::uint32_t room = degree - static_cast<std::uint32_t>(p.degree());
        std::vector<Monomial> monos;
        detail::enumerate_monomials(order, 0, room, Monomial(), monos);
        for (auto& m : monos) unknowns.push_back(Unknown{i, std::move(m)});
        if (unknowns.size() > cfg.ns_column_budget)
            throw BudgetExceeded("find_ns_refutation: unknown count exceeds column budget");
    }
    first_unknown[system.entries.size()] = unknowns.size();

    // Equations: one per monomial of any product m * p_i; rhs is the target 1.
    std::map<Monomial, std::map<std::size_t, Fe>, TermOrder> rows;
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
        const SparsePoly& p = system.entries[unknowns[u].axiom].poly;
        for (const auto& [m, c] : p.terms()) {
            Monomial prod = unknowns[u].mono.times(m);
            auto& row = rows[prod];
            auto [it, fresh] = row.try_emplace(u, c);
            if (!fresh) it->second = f.add(it->second, c);
        }
        if (rows.size() > cfg.ns_row_budget)
            throw BudgetExceeded("find_ns_refutation: equation count exceeds row budget");
    }
    rows.try_emplace(Monomial()); // ensure the constant row exists

    detail::SparseGauss gauss(unknowns.size(), f);
    for (const auto& [mono, row] : rows) {
        detail::SparseGauss::Row r;
        for (const auto& [u, c] : row)
            if (!f.is_zero(c)) r.emplace_back(u, c);
        if (mono.is_unit()) r.emplace_back(unknowns.size(), f.one());
        if (!gauss.add_row(std::move(r))) return std::nullopt;
    }
    std::vector<Fe> sol = gauss.solve();

    std::vector<Roabp> coeffs;
    for (std::size_t i = 0; i < system.entries.size(); ++i) {
        SparsePoly q = SparsePoly::zero(f, t);
        for (std::size_t u = first_unknown[i]; u < first_unknown[i + 1]; ++u)
            q.add_term(unknowns[u].mono, sol[u]);
        coeffs.push_back(Roabp::from_sparse(q, order));
    }
    return LinearIpsCertificate(system, order, std::move(coeffs),
                                SparsePoly::constant(f, t, 1));
}

} // namespace ipstk
