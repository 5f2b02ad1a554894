#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ipstk/certificate.hpp"
#include "ipstk/normalform.hpp"
#include "ipstk/spanprog.hpp"

namespace ipstk {

/// Variable split for interpolation: every order variable is x-side (X or
/// AuxW), y-side, or shared z. The refutation order must list the whole
/// x-block before any y or z variable.
struct SplitSpec {
    std::map<VarId, VarRole> roles;
    NormalMode p0_mode = NormalMode::Nonmonotone;

    static SplitSpec from_system(const PolySystem& sys,
                                 NormalMode mode = NormalMode::Nonmonotone) {
        SplitSpec spec;
        spec.roles = sys.roles;
        spec.p0_mode = mode;
        return spec;
    }

    bool x_side(VarId v) const {
        auto it = roles.find(v);
        if (it == roles.end())
            throw std::invalid_argument("split spec: variable without a role");
        return it->second == VarRole::X || it->second == VarRole::AuxW ||
               it->second == VarRole::AuxField;
    }
    bool z_side(VarId v) const {
        auto it = roles.find(v);
        return it != roles.end() && it->second == VarRole::Z;
    }
};

namespace detail {

/// Decomposes a z-normal polynomial p into (p', z_j, p'') with p = p' + z_j
/// p''; z_j is absent for z-free polynomials. Throws when p is not in
/// z-normal form.
struct ZNormalParts {
    SparsePoly prime;
    std::optional<VarId> z;
    SparsePoly second;
};

inline ZNormalParts znormal_parts(const SparsePoly& p, const SplitSpec& spec) {
    ZNormalParts parts{SparsePoly::zero(p.field(), p.table()), std::nullopt,
                       SparsePoly::zero(p.field(), p.table())};
    for (const auto& [m, c] : p.terms()) {
        std::optional<VarId> zvar;
        Monomial rest;
        for (const auto& [v, e] : m.exponents()) {
            if (spec.z_side(v)) {
                if (zvar || e > 1)
                    throw std::invalid_argument("axiom is not in z-normal form");
                zvar = v;
            } else {
                rest = rest.times(Monomial::var(v, e));
            }
        }
        if (!zvar) {
            parts.prime.add_term(m, c);
        } else {
            if (parts.z && *parts.z != *zvar)
                throw std::invalid_argument("axiom mentions two z-variables");
            parts.z = zvar;
            parts.second.add_term(rest, c);
        }
    }
    return parts;
}

} // namespace detail

/// The span-program interpolant extracted from a verified roABP-IPS_LIN
/// refutation whose order lists the x-block first: cut every P0 coefficient
/// right after the last x-variable into sum_i a_i(x) r_i(rest); a z-normal
/// axiom p' + z_j p'' contributes the rows (z_j, a_i (p'+p'')) and
/// (1-z_j, a_i p'), a z-free axiom p' the rows (1, a_i p'). Target 1. Rows
/// with the zero vector are pruned, which never changes any evaluation; in
/// monotone normal form (p' = 0) this in particular drops every negative
/// label, so the program is monotone.
inline SpanProgram extract_span_program(const LinearIpsCertificate& cert, const SplitSpec& spec,
                                        const Config& cfg = Config{}) {
    const Field& f = cert.system.field;
    const VarTablePtr& t = cert.system.table;

    // x-block prefix length.
    std::size_t cut_pos = 0;
    bool in_x = true;
    for (VarId v : cert.order) {
        bool x = spec.x_side(v);
        if (x && !in_x)
            throw std::invalid_argument(
                "extract_span_program: x-variables must precede all other variables");
        if (x) ++cut_pos;
        in_x = x;
    }

    SpanProgram prog(f, t, SparsePoly::constant(f, t, 1));
    for (VarId v : cert.order)
        if (spec.z_side(v)) prog.z_vars.insert(v);

    std::size_t n = cert.order.size();
    for (std::size_t idx = 0; idx < cert.system.entries.size(); ++idx) {
        const PsEntry& e = cert.system.entries[idx];
        if (e.part != Part::P0) continue;
        for (VarId v : e.poly.vars())
            if (!spec.x_side(v) && !spec.z_side(v))
                throw std::invalid_argument("P0 axiom mentions a y-side variable");
        auto parts = detail::znormal_parts(e.poly, spec);
        if (spec.p0_mode == NormalMode::Monotone && parts.z && !parts.prime.is_zero())
            throw std::invalid_argument("P0 is not in monotone z-normal form");

        // a_i(x): source-to-node polynomials at the cut boundary.
        std::vector<SparsePoly> prefix;
        const Roabp& coeff = cert.coefficients[idx];
        if (coeff.is_structural_zero()) continue; // only zero vectors, pruned
        if (cut_pos == 0) {
            prefix.push_back(SparsePoly::constant(f, t, 1));
        } else if (cut_pos == n) {
            prefix.push_back(coeff.expand(cfg.expansion_budget));
        } else {
            prefix = coeff.cut(cut_pos, cfg.expansion_budget).prefix;
        }

        for (std::size_t i = 0; i < prefix.size(); ++i) {
            if (prefix[i].is_zero()) continue;
            if (!parts.z) {
                SparsePoly vec = prefix[i] * parts.prime;
                if (!vec.is_zero())
                    prog.add(SpanLabel::one(), std::move(vec), static_cast<int>(idx),
                             static_cast<int>(i));
                continue;
            }
            SparsePoly on = prefix[i] * (parts.prime + parts.second);
            if (!on.is_zero())
                prog.add(SpanLabel::pos(*parts.z), std::move(on), static_cast<int>(idx),
                         static_cast<int>(i));
            SparsePoly off = prefix[i] * parts.prime;
            if (!off.is_zero())
                prog.add(SpanLabel::neg(*parts.z), std::move(off), static_cast<int>(idx),
                         static_cast<int>(i));
        }
    }
    return prog;
}

struct ExtractionPipeline {
    LinearIpsCertificate certificate; // the certificate the extraction used
    SpanProgram program;
    bool normalized = false; // whether a normal-form rewrite ran first
};

/// Full extraction pipeline: when P0 is not already in the requested
/// z-normal form, transport the refutation through the normal-form rewrite
/// first, then extract. The rewritten pair defines the same interpolation
/// problem, so the resulting program is an interpolant for the original
/// split as well.
inline ExtractionPipeline extract_with_normal_form(const LinearIpsCertificate& cert,
                                                   NormalMode mode, const Config& cfg) {
    bool normal = is_znormal(cert.system.subsystem(Part::P0), mode == NormalMode::Monotone);
    if (normal) {
        SplitSpec spec = SplitSpec::from_system(cert.system, mode);
        return ExtractionPipeline{cert, extract_span_program(cert, spec, cfg), false};
    }
    LinearIpsCertificate moved = apply_normal_form(cert, mode, cfg);
    SplitSpec spec = SplitSpec::from_system(moved.system, mode);
    SpanProgram prog = extract_span_program(moved, spec, cfg);
    return ExtractionPipeline{std::move(moved), std::move(prog), true};
}

/// Exhaustive interpolant check: over every z-assignment, acceptance must
/// imply P0(x, alpha) unsatisfiable and rejection must imply P1(y, alpha)
/// unsatisfiable. The combined system must already be unsatisfiable, which is
/// verified up front (interpolation is undefined otherwise).
struct InterpolantCheck {
    bool ok = true;
    std::optional<std::map<VarId, bool>> counterexample;
    std::string failed_direction; // "accepts-but-P0-satisfiable" or the dual
};

inline InterpolantCheck check_interpolant(const SpanProgram& prog, const PolySystem& p0,
                                          const PolySystem& p1, const Config& cfg = Config{}) {
    std::vector<VarId> zs(prog.z_vars.begin(), prog.z_vars.end());
    if (static_cast<int>(zs.size()) > cfg.interpolant_z_budget)
        throw BudgetExceeded("check_interpolant: z-set exceeds the exhaustive budget");

    // Joint unsatisfiability precondition.
    PolySystem joint(p0.field, p0.table);
    joint.roles = p0.roles;
    for (const auto& [v, r] : p1.roles) joint.set_role(v, r);
    for (const auto& e : p0.entries) joint.entries.push_back(e);
    for (const auto& e : p1.entries) joint.entries.push_back(e);
    if (brute_force_sat(joint, {}, cfg).sat)
        throw std::invalid_argument(
            "check_interpolant: P0 and P1 have a common root; interpolation is undefined");

    InterpolantCheck res;
    std::size_t count = std::size_t{1} << zs.size();
    for (std::size_t bits = 0; bits < count; ++bits) {
        std::map<VarId, bool> alpha;
        for (std::size_t i = 0; i < zs.size(); ++i) alpha[zs[i]] = (bits >> i) & 1;
        bool accepted = span_eval(prog, alpha);
        if (accepted) {
            if (brute_force_sat(p0, alpha, cfg).sat) {
                res.ok = false;
                res.counterexample = alpha;
                res.failed_direction = "accepts but P0(x,alpha) is satisfiable";
                return res;
            }
        } else {
            if (brute_force_sat(p1, alpha, cfg).sat) {
                res.ok = false;
                res.counterexample = alpha;
                res.failed_direction = "rejects but P1(y,alpha) is satisfiable";
                return res;
            }
        }
    }
    return res;
}

} // namespace ipstk
