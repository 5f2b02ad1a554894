#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ipstk/certificate.hpp"

namespace ipstk {

enum class NormalMode { Nonmonotone, Monotone };

/// Output of the z-normal-form rewrite: the normalized system P' over fresh
/// auxiliary field variables w, plus for every original polynomial a low-width
/// derivation of it from P'.
struct NormalFormResult {
    PolySystem normalized;
    std::vector<LinearIpsCertificate> derivations; // aligned with the input entries
    NormalMode mode;
    std::vector<VarId> aux_vars;
    std::vector<VarId> order; // shared order of the derivation certificates
};

namespace detail {

inline VarId fresh_var(const VarTablePtr& table, const std::string& base) {
    if (!table->find(base)) return table->intern(base);
    for (int k = 2;; ++k) {
        std::string name = base + "_" + std::to_string(k);
        if (!table->find(name)) return table->intern(name);
    }
}

/// Splits a monomial into its z-part (variables of role Z, with multiplicity,
/// ascending) and the z-free rest.
inline std::pair<std::vector<VarId>, Monomial> split_z(const Monomial& m,
                                                       const PolySystem& sys) {
    std::vector<VarId> zs;
    Monomial rest;
    for (const auto& [v, e] : m.exponents()) {
        if (sys.roles.count(v) && sys.role_of(v) == VarRole::Z) {
            for (std::uint32_t k = 0; k < e; ++k) zs.push_back(v);
        } else {
            rest = rest.times(Monomial::var(v, e));
        }
    }
    return {std::move(zs), std::move(rest)};
}

} // namespace detail

/// Rewrites a P0-side system into z-normal form.
///
/// Nonmonotone mode introduces one w_i per z-variable, replaces each z_i by
/// w_i inside every polynomial, and adds the link equations z_i - w_i. Every
/// original p is derived back through the telescoping identity
///   prod z_{i_j} - prod w_{i_j} = sum_j (prod_{h<j} z_{i_h}) (prod_{g>j} w_{i_g}) (z_{i_j} - w_{i_j}),
/// applied monomial by monomial, so every derivation coefficient is a sum of
/// at most sparsity(p) * deg(p) monomials.
///
/// Monotone mode requires every z-mentioning polynomial to have the shape
/// (prod_{i in I} z_i) * p'(x); it is replaced by p' + sum_i w_{p,i} together
/// with the monomial equations z_i * w_{p,i}, and derived back through
///   (prod z_i) p' = (prod z_i)(p' + sum_i w_{p,i}) - sum_i (prod_{j != i} z_j)(z_i w_{p,i}),
/// whose coefficients are single monomials.
///
/// `base_order` (when given) is extended by inserting the fresh w-variables
/// immediately after the last x-block variable; otherwise a default order
/// x..., w..., z... is built.
inline NormalFormResult to_znormal(const PolySystem& p0, NormalMode mode, const Config& cfg,
                                   std::vector<VarId> base_order = {}) {
    const Field& f = p0.field;
    const VarTablePtr& t = p0.table;

    std::vector<VarId> zvars;
    for (const auto& [v, r] : p0.roles)
        if (r == VarRole::Z) zvars.push_back(v);

    NormalFormResult res{PolySystem(f, t), {}, mode, {}, {}};
    res.normalized.roles = p0.roles;

    // The normalized entries, and per input entry the derivation terms
    // (entry index in the normalized system -> sparse coefficient).
    std::vector<std::map<std::size_t, SparsePoly>> deriv_terms(p0.entries.size());

    if (mode == NormalMode::Nonmonotone) {
        for (const auto& e : p0.entries)
            if (e.poly.degree() > cfg.max_normal_degree)
                throw BudgetExceeded("to_znormal: polynomial degree exceeds the configured bound");
        std::map<VarId, VarId> z_to_w;
        std::map<VarId, std::size_t> link_entry; // z var -> index of (z - w) in P'
        for (VarId z : zvars) {
            VarId w = detail::fresh_var(t, "w" + t->name(z).substr(t->name(z).front() == 'z' ? 1 : 0));
            z_to_w[z] = w;
            res.aux_vars.push_back(w);
            res.normalized.set_role(w, VarRole::AuxW);
        }
        for (std::size_t k = 0; k < p0.entries.size(); ++k) {
            const PsEntry& e = p0.entries[k];
            SparsePoly star = e.poly.rename(z_to_w);
            res.normalized.add(star, e.kind, e.part,
                               e.label.empty() ? "nf" : e.label + " nf");
            deriv_terms[k].emplace(k, SparsePoly::constant(f, t, 1));
        }
        for (VarId z : zvars) {
            SparsePoly link = SparsePoly::variable(f, t, z) -
                              SparsePoly::variable(f, t, z_to_w[z]);
            link_entry[z] = res.normalized.entries.size();
            res.normalized.add(link, AxKind::Axiom, Part::P0, "link " + t->name(z));
        }
        // Telescoping coefficients, monomial by monomial.
        for (std::size_t k = 0; k < p0.entries.size(); ++k) {
            for (const auto& [m, c] : p0.entries[k].poly.terms()) {
                auto [zs, rest] = detail::split_z(m, p0);
                if (zs.empty()) continue;
                for (std::size_t j = 0; j < zs.size(); ++j) {
                    Monomial coeff = rest;
                    for (std::size_t h = 0; h < j; ++h)
                        coeff = coeff.times(Monomial::var(zs[h]));
                    for (std::size_t g = j + 1; g < zs.size(); ++g)
                        coeff = coeff.times(Monomial::var(z_to_w[zs[g]]));
                    auto [it, fresh] = deriv_terms[k].try_emplace(link_entry[zs[j]],
                                                                  SparsePoly::zero(f, t));
                    it->second.add_term(coeff, c);
                }
            }
        }
    } else {
        // Monotone z-normal form.
        struct Plan {
            std::vector<VarId> zs; // I_p, ascending, squarefree
            Monomial zpart;
            SparsePoly prime;           // p'(x)
            std::size_t main_entry = 0; // index of p' + sum w in P'
            std::vector<std::size_t> mono_entries; // indices of z_i * w_{p,i}
            std::vector<VarId> ws;

            explicit Plan(const Field& f, const VarTablePtr& t)
                : prime(SparsePoly::zero(f, t)) {}
        };
        std::vector<std::optional<Plan>> plans(p0.entries.size());
        for (std::size_t k = 0; k < p0.entries.size(); ++k) {
            const PsEntry& e = p0.entries[k];
            std::optional<std::pair<std::vector<VarId>, Monomial>> common;
            SparsePoly prime = SparsePoly::zero(f, t);
            for (const auto& [m, c] : e.poly.terms()) {
                auto [zs, rest] = detail::split_z(m, p0);
                std::set<VarId> distinct(zs.begin(), zs.end());
                if (distinct.size() != zs.size())
                    throw std::invalid_argument(
                        "monotone normal form requires a squarefree z-part");
                Monomial zpart;
                for (VarId z : zs) zpart = zpart.times(Monomial::var(z));
                if (!common) {
                    common = {zs, zpart};
                } else if (common->second != zpart) {
                    throw std::invalid_argument(
                        "monotone normal form requires the shape (prod z_i) * p(x)");
                }
                prime.add_term(rest, c);
            }
            if (!common || common->first.empty()) continue; // z-free, kept as is
            Plan plan(f, t);
            plan.zs = common->first;
            plan.zpart = common->second;
            plan.prime = std::move(prime);
            plans[k] = std::move(plan);
        }
        for (std::size_t k = 0; k < p0.entries.size(); ++k) {
            const PsEntry& e = p0.entries[k];
            if (!plans[k]) {
                res.normalized.add(e.poly, e.kind, e.part, e.label);
                deriv_terms[k].emplace(res.normalized.entries.size() - 1,
                                       SparsePoly::constant(f, t, 1));
                continue;
            }
            Plan& plan = *plans[k];
            SparsePoly main = plan.prime;
            for (VarId z : plan.zs) {
                VarId w = detail::fresh_var(t, "w" + std::to_string(k + 1) + "_" + t->name(z));
                plan.ws.push_back(w);
                res.aux_vars.push_back(w);
                res.normalized.set_role(w, VarRole::AuxW);
                main += SparsePoly::variable(f, t, w);
            }
            plan.main_entry = res.normalized.entries.size();
            res.normalized.add(main, AxKind::Axiom, e.part,
                               (e.label.empty() ? "nf" : e.label + " nf"));
            for (std::size_t i = 0; i < plan.zs.size(); ++i) {
                plan.mono_entries.push_back(res.normalized.entries.size());
                res.normalized.add(SparsePoly::variable(f, t, plan.zs[i]) *
                                       SparsePoly::variable(f, t, plan.ws[i]),
                                   AxKind::Axiom, e.part, "guard " + t->name(plan.zs[i]));
            }
            // (prod z) on the main polynomial, minus the guards.
            deriv_terms[k].emplace(plan.main_entry,
                                   SparsePoly::monomial(f, t, plan.zpart, f.one()));
            for (std::size_t i = 0; i < plan.zs.size(); ++i) {
                Monomial rest;
                for (std::size_t j = 0; j < plan.zs.size(); ++j)
                    if (j != i) rest = rest.times(Monomial::var(plan.zs[j]));
                deriv_terms[k].emplace(plan.mono_entries[i],
                                       SparsePoly::monomial(f, t, rest, f.neg(f.one())));
            }
        }
    }

    // Derivation order: insert the w-variables right after the x-block.
    if (base_order.empty()) {
        std::set<VarId> xs, zs;
        for (const auto& [v, r] : p0.roles) {
            if (r == VarRole::X || r == VarRole::AuxW) xs.insert(v);
            else if (r == VarRole::Z) zs.insert(v);
        }
        for (VarId v : p0.occurring_vars())
            if (!p0.roles.count(v)) xs.insert(v);
        base_order.assign(xs.begin(), xs.end());
        base_order.insert(base_order.end(), res.aux_vars.begin(), res.aux_vars.end());
        base_order.insert(base_order.end(), zs.begin(), zs.end());
        res.order = base_order;
    } else {
        std::size_t last_x = 0;
        for (std::size_t i = 0; i < base_order.size(); ++i) {
            auto it = p0.roles.find(base_order[i]);
            if (it != p0.roles.end() && (it->second == VarRole::X || it->second == VarRole::AuxW))
                last_x = i + 1;
        }
        res.order.assign(base_order.begin(), base_order.begin() + last_x);
        res.order.insert(res.order.end(), res.aux_vars.begin(), res.aux_vars.end());
        res.order.insert(res.order.end(), base_order.begin() + last_x, base_order.end());
    }
    for (VarId w : res.aux_vars) res.normalized.set_role(w, VarRole::AuxW);

    // Package the derivations.
    for (std::size_t k = 0; k < p0.entries.size(); ++k) {
        std::vector<Roabp> coeffs;
        for (std::size_t j = 0; j < res.normalized.entries.size(); ++j) {
            auto it = deriv_terms[k].find(j);
            if (it == deriv_terms[k].end())
                coeffs.push_back(Roabp::zero_program(f, t, res.order));
            else
                coeffs.push_back(Roabp::from_sparse(it->second, res.order));
        }
        res.derivations.emplace_back(res.normalized, res.order, std::move(coeffs),
                                     p0.entries[k].poly);
    }
    return res;
}

/// Equisatisfiability of P and its normal form at one z-assignment: both
/// oracles must agree, with the w-variables solved as linear field values.
inline bool check_equisat(const PolySystem& p, const NormalFormResult& nf,
                          const std::map<VarId, bool>& alpha, const Config& cfg = Config{}) {
    bool before = brute_force_sat(p, alpha, cfg).sat;
    bool after = brute_force_sat(nf.normalized, alpha, cfg).sat;
    return before == after;
}

/// Transports a refutation of P0 u P1 to a refutation of P0' u P1 by
/// composing it with the normal-form derivations. The shared order gains the
/// w-variables right after the x-block, so x' = (x, w) still precedes y and z.
inline LinearIpsCertificate apply_normal_form(const LinearIpsCertificate& refutation,
                                              NormalMode mode, const Config& cfg) {
    const PolySystem& sys = refutation.system;
    const Field& f = sys.field;
    const VarTablePtr& t = sys.table;

    // The x-block must sit at the front of the order.
    bool seen_other = false;
    for (VarId v : refutation.order) {
        auto it = sys.roles.find(v);
        bool is_x = it != sys.roles.end() &&
                    (it->second == VarRole::X || it->second == VarRole::AuxW);
        if (is_x && seen_other)
            throw std::invalid_argument("apply_normal_form: x-variables must precede all others");
        if (!is_x) seen_other = true;
    }

    std::vector<std::size_t> p0_idx, p1_idx;
    for (std::size_t i = 0; i < sys.entries.size(); ++i) {
        if (sys.entries[i].part == Part::P0) p0_idx.push_back(i);
        else p1_idx.push_back(i);
    }
    PolySystem p0 = sys.subsystem(Part::P0);
    NormalFormResult nf = to_znormal(p0, mode, cfg, refutation.order);

    // Combined base system: P0' then the P1 part unchanged.
    PolySystem base(f, t);
    base.roles = nf.normalized.roles;
    for (const auto& e : nf.normalized.entries) base.entries.push_back(e);
    std::size_t p1_offset = base.entries.size();
    for (std::size_t i : p1_idx) base.entries.push_back(sys.entries[i]);

    // Inner derivations over the combined system, one per outer axiom.
    std::vector<LinearIpsCertificate> inner;
    inner.reserve(sys.entries.size());
    std::size_t next_p0 = 0, next_p1 = 0;
    for (std::size_t i = 0; i < sys.entries.size(); ++i) {
        std::vector<Roabp> coeffs;
        if (sys.entries[i].part == Part::P0) {
            const LinearIpsCertificate& d = nf.derivations[next_p0++];
            coeffs = d.coefficients;
            for (std::size_t j = 0; j < p1_idx.size(); ++j)
                coeffs.push_back(Roabp::zero_program(f, t, nf.order));
        } else {
            coeffs = zero_coefficients(base, nf.order);
            coeffs[p1_offset + next_p1] =
                Roabp::constant_program(f, t, f.one(), nf.order);
            ++next_p1;
        }
        inner.emplace_back(base, nf.order, std::move(coeffs), sys.entries[i].poly);
    }

    // Re-base the outer coefficients onto the extended order and compose.
    std::vector<Roabp> outer_coeffs;
    outer_coeffs.reserve(refutation.coefficients.size());
    for (const auto& c : refutation.coefficients) outer_coeffs.push_back(c.with_order(nf.order));
    LinearIpsCertificate outer(sys, nf.order, std::move(outer_coeffs), refutation.target);
    return compose_derivation(outer, inner);
}

/// Syntactic predicate: every polynomial is z-free, of shape z_i * p'(x,w), or
/// (for the nonmonotone link equations) z_i - w_i.
inline bool is_znormal(const PolySystem& s, bool monotone) {
    for (const auto& e : s.entries) {
        bool zfree = true;
        std::optional<VarId> the_z;
        for (const auto& [m, c] : e.poly.terms()) {
            auto [zs, rest] = detail::split_z(m, s);
            if (zs.empty()) continue;
            zfree = false;
            if (zs.size() > 1) return false; // z-degree must be 1
            if (the_z && *the_z != zs[0]) return false; // single z-variable
            the_z = zs[0];
        }
        if (zfree) continue;
        if (monotone) {
            // Shape z_i * p': no z-free terms allowed.
            for (const auto& [m, c] : e.poly.terms()) {
                auto [zs, rest] = detail::split_z(m, s);
                if (zs.empty()) return false;
            }
        }
    }
    return true;
}

} // namespace ipstk
