#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ipstk/certificate.hpp"
#include "ipstk/formulas.hpp"

namespace ipstk {

// ---------------------------------------------------------------------------
// GEN instances
// ---------------------------------------------------------------------------

/// Triple set T over [n]^3 (1-based points). GEN accepts iff point n is
/// generated from {1} by closing under "both premises generated implies the
/// conclusion generated".
struct GenInstance {
    int n = 1;
    std::set<std::array<int, 3>> triples;

    void check() const {
        if (n < 1) throw std::invalid_argument("GEN instance needs n >= 1");
        for (const auto& tr : triples)
            for (int p : tr)
                if (p < 1 || p > n) throw std::invalid_argument("GEN triple out of range");
    }
};

inline bool gen_eval(const GenInstance& g) {
    g.check();
    std::vector<bool> gen(g.n + 1, false);
    gen[1] = true;
    std::vector<int> work{1};
    while (!work.empty()) {
        work.pop_back();
        bool changed = false;
        for (const auto& [u, v, w] : g.triples)
            if (gen[u] && gen[v] && !gen[w]) {
                gen[w] = true;
                changed = true;
            }
        if (changed) work.push_back(1); // rescan until the closure is stable
    }
    return gen[g.n];
}

// ---------------------------------------------------------------------------
// Boolean circuits and the function-to-CNF construction
// ---------------------------------------------------------------------------

/// Fan-in-2 circuit over input variables; used to encode the yes/no sides of
/// a monotone function as CNFs.
struct BooleanCircuit {
    enum class Gate { Input, And, Or, Not };
    struct Node {
        Gate kind = Gate::Input;
        int a = -1, b = -1;
        int input_index = -1;
    };
    std::vector<Node> nodes;
    int output = -1;
    int num_inputs = 0;

    int input(int idx) {
        // One gate per input variable; reuse on repeated requests.
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
            if (nodes[i].kind == Gate::Input && nodes[i].input_index == idx) return i;
        nodes.push_back(Node{Gate::Input, -1, -1, idx});
        num_inputs = std::max(num_inputs, idx + 1);
        return static_cast<int>(nodes.size()) - 1;
    }
    int mk(Gate kind, int a, int b = -1) {
        if (a < 0 || a >= static_cast<int>(nodes.size()) ||
            (kind != Gate::Not && (b < 0 || b >= static_cast<int>(nodes.size()))))
            throw std::invalid_argument("circuit child out of range");
        nodes.push_back(Node{kind, a, b, -1});
        return static_cast<int>(nodes.size()) - 1;
    }

    bool eval(const std::vector<bool>& inputs) const {
        std::vector<bool> val(nodes.size(), false);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Node& nd = nodes[i];
            switch (nd.kind) {
                case Gate::Input: val[i] = inputs.at(nd.input_index); break;
                case Gate::And: val[i] = val[nd.a] && val[nd.b]; break;
                case Gate::Or: val[i] = val[nd.a] || val[nd.b]; break;
                case Gate::Not: val[i] = !val[nd.a]; break;
            }
        }
        return val[output];
    }
};

/// Deterministic closure circuit for GEN_n: n rounds of state updates over an
/// n-bit "generated" vector, fan-in 2 throughout; input index of triple
/// (u,v,w) is ((u-1) n + (v-1)) n + (w-1).
inline BooleanCircuit gen_circuit(int n) {
    if (n < 1) throw std::invalid_argument("gen_circuit needs n >= 1");
    BooleanCircuit c;
    auto tri = [n](int u, int v, int w) { return ((u - 1) * n + (v - 1)) * n + (w - 1); };
    int in0 = c.input(0);
    int truth = c.mk(BooleanCircuit::Gate::Or, in0, c.mk(BooleanCircuit::Gate::Not, in0));
    // Round 1 from the initial state {1}: only triples (1,1,w) can fire.
    std::vector<int> state(n + 1, -1);
    state[1] = truth;
    for (int w = 2; w <= n; ++w) state[w] = c.input(tri(1, 1, w));
    for (int round = 2; round <= n; ++round) {
        std::vector<int> next = state;
        for (int w = 2; w <= n; ++w) {
            int acc = state[w];
            for (int u = 1; u <= n; ++u)
                for (int v = 1; v <= n; ++v) {
                    int both = c.mk(BooleanCircuit::Gate::And, state[u], state[v]);
                    int fire = c.mk(BooleanCircuit::Gate::And, c.input(tri(u, v, w)), both);
                    acc = c.mk(BooleanCircuit::Gate::Or, acc, fire);
                }
            next[w] = acc;
        }
        state = std::move(next);
    }
    c.output = state[n];
    c.num_inputs = n * n * n;
    return c;
}

/// CNF encoding of "the circuit evaluates to 1" with a fresh gate variable
/// per node. Input gates are hooked to the shared z-variables monotonically:
/// the no side adds (~z v g), the yes side (z v ~g).
inline Cnf encode_circuit_side(const BooleanCircuit& c, bool yes_side,
                               const std::vector<VarId>& z_vars, const std::string& prefix,
                               const VarTablePtr& table, std::vector<VarId>* gate_vars_out) {
    Cnf cnf;
    cnf.table = table;
    std::vector<VarId> gv(c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i)
        gv[i] = table->intern(prefix + std::to_string(i));
    for (VarId z : z_vars) cnf.vars.push_back(z);
    for (VarId g : gv) cnf.vars.push_back(g);

    auto add = [&](std::vector<std::pair<VarId, bool>> lits) {
        auto cl = normalize_clause(std::move(lits));
        if (cl) cnf.clauses.push_back(std::move(*cl));
    };
    using G = BooleanCircuit::Gate;
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const auto& nd = c.nodes[i];
        switch (nd.kind) {
            case G::Input:
                if (yes_side) add({{z_vars.at(nd.input_index), true}, {gv[i], false}});
                else add({{z_vars.at(nd.input_index), false}, {gv[i], true}});
                break;
            case G::And:
                add({{gv[i], false}, {gv[nd.a], true}});
                add({{gv[i], false}, {gv[nd.b], true}});
                add({{gv[i], true}, {gv[nd.a], false}, {gv[nd.b], false}});
                break;
            case G::Or:
                add({{gv[i], true}, {gv[nd.a], false}});
                add({{gv[i], true}, {gv[nd.b], false}});
                add({{gv[i], false}, {gv[nd.a], true}, {gv[nd.b], true}});
                break;
            case G::Not:
                add({{gv[i], true}, {gv[nd.a], true}});
                add({{gv[i], false}, {gv[nd.a], false}});
                break;
        }
    }
    add({{gv[c.output], true}});
    if (gate_vars_out) *gate_vars_out = gv;
    return cnf;
}

/// The split formula for GEN_n: phi0(x,z) is satisfiable iff GEN(z) = 0 and
/// phi1(y,z) iff GEN(z) = 1; z appears only negatively in phi0 and only
/// positively in phi1.
struct GenSplit {
    Cnf phi0, phi1;
    std::vector<VarId> z_vars; // n^3 triple indicators, lexicographic (u,v,w)
    std::vector<VarId> x_vars;
    std::vector<VarId> y_vars;

    std::map<VarId, VarRole> roles() const {
        std::map<VarId, VarRole> r;
        for (VarId v : z_vars) r[v] = VarRole::Z;
        for (VarId v : x_vars) r[v] = VarRole::X;
        for (VarId v : y_vars) r[v] = VarRole::Y;
        return r;
    }
};

inline GenSplit gen_split_formula(int n, Session& sess) {
    if (n < 2) throw std::invalid_argument("gen_split_formula needs n >= 2");
    GenSplit gs;
    for (int u = 1; u <= n; ++u)
        for (int v = 1; v <= n; ++v)
            for (int w = 1; w <= n; ++w)
                gs.z_vars.push_back(sess.var("z_" + std::to_string(u) + "_" + std::to_string(v) +
                                             "_" + std::to_string(w)));
    BooleanCircuit yes = gen_circuit(n);
    BooleanCircuit no = yes;
    no.output = no.mk(BooleanCircuit::Gate::Not, no.output);
    gs.phi0 = encode_circuit_side(no, false, gs.z_vars, "xg", sess.table, &gs.x_vars);
    gs.phi1 = encode_circuit_side(yes, true, gs.z_vars, "yg", sess.table, &gs.y_vars);
    return gs;
}

/// Builds the tagged interpolation system for a split pair: P0 clauses and
/// x-Boolean axioms, P1 clauses with y- and z-Boolean axioms (the z axioms
/// are annihilated by any z-assignment, so they sit on the P1 side).
inline PolySystem make_split_system(const Cnf& phi0, const Cnf& phi1,
                                    const std::set<VarId>& z_set, const Field& f) {
    require_same_table(phi0.table, phi1.table);
    PolySystem sys(f, phi0.table);
    auto boolean_axiom = [&](VarId v) {
        SparsePoly x = SparsePoly::variable(f, phi0.table, v);
        return x.pow(2) - x;
    };
    for (std::size_t i = 0; i < phi0.clauses.size(); ++i)
        sys.add(translate_clause(phi0.clauses[i], f, phi0.table), AxKind::Axiom, Part::P0,
                "phi0 clause " + std::to_string(i + 1));
    for (VarId v : phi0.vars)
        if (!z_set.count(v)) {
            sys.add(boolean_axiom(v), AxKind::BooleanAxiom, Part::P0,
                    "bool " + phi0.table->name(v));
            sys.set_role(v, VarRole::X);
        }
    for (std::size_t i = 0; i < phi1.clauses.size(); ++i)
        sys.add(translate_clause(phi1.clauses[i], f, phi1.table), AxKind::Axiom, Part::P1,
                "phi1 clause " + std::to_string(i + 1));
    for (VarId v : phi1.vars)
        if (!z_set.count(v)) {
            sys.add(boolean_axiom(v), AxKind::BooleanAxiom, Part::P1,
                    "bool " + phi1.table->name(v));
            sys.set_role(v, VarRole::Y);
        }
    for (VarId v : z_set) {
        sys.add(boolean_axiom(v), AxKind::BooleanAxiom, Part::P1, "bool " + phi0.table->name(v));
        sys.set_role(v, VarRole::Z);
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Lifting
// ---------------------------------------------------------------------------

struct LiftOptions {
    /// Splits the wide exactly-one disjunctions of Phi2 into 3-clauses with
    /// fresh chaining variables. Off by default; the polynomial translation
    /// handles wide clauses directly.
    bool split_wide_clauses = false;
};

/// The lifted formula Psi = Phi1 ^ Phi2 over selector variables u and main
/// variables v, with enough indexing to restrict it back along any variable
/// order.
struct LiftedFormula {
    Cnf base; // padded 3-CNF, every clause on exactly 3 distinct variables
    std::size_t N = 0, M = 0;
    std::vector<VarId> v_vars;
    std::vector<VarId> u_vars;               // (clause, triple) row-major
    std::vector<std::array<int, 3>> triples; // ordered triples of distinct 0-based indices
    Cnf phi1, phi2, psi;
    bool wide = true;

    // Entry layout of system(): phi1 clauses (clause-major, triple-minor),
    // exactly-one per clause, same-clause selector pairs, cross-clause
    // incompatibility pairs, then Boolean axioms for u and v.
    std::vector<std::pair<std::size_t, std::size_t>> cross_pairs; // (u-index, u-index)
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cross_entry_of;

    std::size_t K() const { return triples.size(); }
    std::size_t u_index(std::size_t c, std::size_t t) const { return c * K() + t; }
    VarId u_var(std::size_t c, std::size_t t) const { return u_vars[u_index(c, t)]; }

    std::size_t phi1_entry(std::size_t c, std::size_t t) const { return c * K() + t; }
    std::size_t exactly_one_entry(std::size_t c) const { return M * K() + c; }
    std::size_t pair_entry(std::size_t c, std::size_t a, std::size_t b) const {
        // a < b within [0, K)
        std::size_t kc2 = K() * (K() - 1) / 2;
        std::size_t pidx = a * K() - a * (a + 1) / 2 + (b - a - 1);
        return M * K() + M + c * kc2 + pidx;
    }
    std::size_t cross_entry(std::size_t ua, std::size_t ub) const {
        auto it = cross_entry_of.find({std::min(ua, ub), std::max(ua, ub)});
        if (it == cross_entry_of.end())
            throw std::invalid_argument("selector pair is not an incompatibility axiom");
        return it->second;
    }
    std::size_t bool_u_entry(std::size_t i) const { return psi.clauses.size() + i; }
    std::size_t bool_v_entry(std::size_t j) const {
        return psi.clauses.size() + u_vars.size() + j;
    }

    /// The variables of the base clause c, in literal order.
    std::array<VarId, 3> clause_vars(std::size_t c) const {
        std::array<VarId, 3> vs{};
        for (int k = 0; k < 3; ++k) vs[k] = base.clauses[c].literals[k].first;
        return vs;
    }

    /// Partial map pi_{c,t}: v-index -> base variable, as index pairs.
    std::array<std::pair<int, VarId>, 3> pi(std::size_t c, std::size_t t) const {
        auto vs = clause_vars(c);
        const auto& tr = triples[t];
        return {std::make_pair(tr[0], vs[0]), std::make_pair(tr[1], vs[1]),
                std::make_pair(tr[2], vs[2])};
    }

    /// Canonical polynomial system for Psi (all variables Boolean, role X).
    PolySystem system(const Field& f) const { return translate_cnf(psi, f); }
};

namespace detail {

inline bool maps_compatible(const std::array<std::pair<int, VarId>, 3>& a,
                            const std::array<std::pair<int, VarId>, 3>& b) {
    for (const auto& [va, xa] : a)
        for (const auto& [vb, xb] : b) {
            if (va == vb && xa != xb) return false; // one v, two originals
            if (va != vb && xa == xb) return false; // two v's, one original
        }
    return true;
}

/// Pads every clause with fewer than 3 distinct variables up to exactly 3,
/// using shared fresh variables that are forced to 0 by a four-clause 3-CNF
/// gadget (over two extra free variables), so the padded base stays a 3-CNF
/// and is equisatisfiable with the input.
inline Cnf pad_to_three(const Cnf& phi, Session& sess) {
    std::size_t deficit = 0;
    for (const Clause& c : phi.clauses) {
        if (c.literals.size() > 3)
            throw std::invalid_argument("lift: clause has more than 3 distinct variables");
        deficit = std::max(deficit, 3 - c.literals.size());
    }
    if (deficit == 0) return phi;
    Cnf out = phi;
    std::vector<VarId> pads;
    for (std::size_t i = 0; i < deficit; ++i) {
        VarId d = sess.var("pad" + std::to_string(i + 1));
        pads.push_back(d);
        out.vars.push_back(d);
    }
    VarId ga = sess.var("padfree1"), gb = sess.var("padfree2");
    out.vars.push_back(ga);
    out.vars.push_back(gb);
    for (Clause& c : out.clauses) {
        std::size_t need = 3 - c.literals.size();
        for (std::size_t i = 0; i < need; ++i) c.literals.emplace_back(pads[i], true);
    }
    for (VarId d : pads)
        for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb)
                out.clauses.push_back(
                    Clause{{{d, false}, {ga, sa == 1}, {gb, sb == 1}}});
    return out;
}

} // namespace detail

/// Stage 1 and Stage 2 of the lifting: selectors u_{C,i,j,k} realize clause C
/// on (v_i, v_j, v_k); Phi1 enforces each selected local copy, Phi2 makes the
/// selection exactly-one per clause and globally one-to-one.
inline LiftedFormula lift(const Cnf& phi, Session& sess, const LiftOptions& opt = {}) {
    LiftedFormula L;
    L.base = detail::pad_to_three(phi, sess);
    for (const Clause& c : L.base.clauses)
        if (c.literals.size() != 3)
            throw std::invalid_argument("lift: padding failed to reach 3 literals");
    L.N = L.base.vars.size();
    L.M = L.base.clauses.size();
    L.wide = !opt.split_wide_clauses;
    if (L.N < 3) throw std::invalid_argument("lift: need at least 3 base variables");

    for (std::size_t i = 0; i < L.N; ++i)
        L.v_vars.push_back(sess.var("v" + std::to_string(i + 1)));
    for (int i = 0; i < static_cast<int>(L.N); ++i)
        for (int j = 0; j < static_cast<int>(L.N); ++j)
            for (int k = 0; k < static_cast<int>(L.N); ++k)
                if (i != j && j != k && i != k) L.triples.push_back({i, j, k});
    for (std::size_t c = 0; c < L.M; ++c)
        for (std::size_t t = 0; t < L.K(); ++t) {
            const auto& tr = L.triples[t];
            L.u_vars.push_back(sess.var("u" + std::to_string(c + 1) + "_" +
                                        std::to_string(tr[0] + 1) + "_" +
                                        std::to_string(tr[1] + 1) + "_" +
                                        std::to_string(tr[2] + 1)));
        }

    auto mk_cnf = [&](std::vector<Clause> clauses) {
        Cnf f;
        f.table = sess.table;
        f.vars = L.u_vars;
        f.vars.insert(f.vars.end(), L.v_vars.begin(), L.v_vars.end());
        f.clauses = std::move(clauses);
        return f;
    };

    // Phi1: ~u_{C,i,j,k} v v_i^sg1 v v_j^sg2 v v_k^sg3.
    std::vector<Clause> phi1;
    for (std::size_t c = 0; c < L.M; ++c) {
        const Clause& cl = L.base.clauses[c];
        for (std::size_t t = 0; t < L.K(); ++t) {
            const auto& tr = L.triples[t];
            Clause out;
            out.literals.emplace_back(L.u_var(c, t), false);
            for (int k = 0; k < 3; ++k)
                out.literals.emplace_back(L.v_vars[tr[k]], cl.literals[k].second);
            phi1.push_back(std::move(out));
        }
    }

    // Phi2: exactly-one per clause plus incompatibility exclusions.
    std::vector<Clause> phi2;
    int chain_counter = 0;
    for (std::size_t c = 0; c < L.M; ++c) {
        Clause big;
        for (std::size_t t = 0; t < L.K(); ++t) big.literals.emplace_back(L.u_var(c, t), true);
        if (L.wide) {
            phi2.push_back(big);
        } else {
            // Ladder split into 3-clauses with fresh chaining variables.
            std::vector<std::pair<VarId, bool>> rest = big.literals;
            while (rest.size() > 3) {
                VarId link = sess.var("chain" + std::to_string(++chain_counter));
                Clause head;
                head.literals = {rest[0], rest[1], {link, true}};
                phi2.push_back(head);
                std::vector<std::pair<VarId, bool>> tail{{link, false}};
                tail.insert(tail.end(), rest.begin() + 2, rest.end());
                rest = std::move(tail);
            }
            phi2.push_back(Clause{rest});
        }
    }
    for (std::size_t c = 0; c < L.M; ++c)
        for (std::size_t a = 0; a < L.K(); ++a)
            for (std::size_t b = a + 1; b < L.K(); ++b)
                phi2.push_back(Clause{{{L.u_var(c, a), false}, {L.u_var(c, b), false}}});
    for (std::size_t c = 0; c < L.M; ++c)
        for (std::size_t d = c + 1; d < L.M; ++d)
            for (std::size_t ta = 0; ta < L.K(); ++ta)
                for (std::size_t tb = 0; tb < L.K(); ++tb)
                    if (!detail::maps_compatible(L.pi(c, ta), L.pi(d, tb))) {
                        std::size_t ua = L.u_index(c, ta), ub = L.u_index(d, tb);
                        L.cross_pairs.emplace_back(ua, ub);
                        phi2.push_back(
                            Clause{{{L.u_vars[ua], false}, {L.u_vars[ub], false}}});
                    }

    L.phi1 = mk_cnf(phi1);
    L.phi2 = mk_cnf(phi2);
    std::vector<Clause> all = phi1;
    all.insert(all.end(), phi2.begin(), phi2.end());
    L.psi = mk_cnf(std::move(all));
    if (!opt.split_wide_clauses)
        for (std::size_t i = 0; i < L.cross_pairs.size(); ++i)
            L.cross_entry_of[L.cross_pairs[i]] =
                L.M * L.K() + L.M + L.M * (L.K() * (L.K() - 1) / 2) + i;
    return L;
}

/// The order-driven restriction of Theorem-style lifting: rank the
/// v-variables by the given order, relabel the r-th one as the r-th base
/// variable, select for every clause the unique matching triple, and zero
/// every other selector.
struct LiftRestriction {
    std::map<VarId, bool> u_assign;
    std::map<VarId, VarId> v_rename;
    std::vector<VarId> restricted_order; // the base variables, hard order
};

inline LiftRestriction restriction_for_order(const LiftedFormula& L,
                                             const std::vector<VarId>& order) {
    LiftRestriction r;
    std::vector<VarId> v_by_rank;
    std::set<VarId> vset(L.v_vars.begin(), L.v_vars.end());
    for (VarId v : order)
        if (vset.count(v)) v_by_rank.push_back(v);
    if (v_by_rank.size() != L.v_vars.size())
        throw std::invalid_argument("restriction_for_order: order must cover every v-variable");

    std::map<VarId, int> v_index; // v variable -> 0-based index among v_vars
    for (std::size_t i = 0; i < L.v_vars.size(); ++i) v_index[L.v_vars[i]] = static_cast<int>(i);
    std::map<VarId, int> base_rank; // base var -> 0-based rank (hard order position)
    for (std::size_t i = 0; i < L.base.vars.size(); ++i)
        base_rank[L.base.vars[i]] = static_cast<int>(i);

    // v at rank r realises the r-th base variable.
    std::vector<int> v_of_rank(L.N);
    for (std::size_t rnk = 0; rnk < v_by_rank.size(); ++rnk) {
        r.v_rename[v_by_rank[rnk]] = L.base.vars[rnk];
        v_of_rank[rnk] = v_index[v_by_rank[rnk]];
    }
    for (VarId u : L.u_vars) r.u_assign[u] = false;
    for (std::size_t c = 0; c < L.M; ++c) {
        auto vs = L.clause_vars(c);
        std::array<int, 3> want{};
        for (int k = 0; k < 3; ++k) want[k] = v_of_rank[base_rank.at(vs[k])];
        bool found = false;
        for (std::size_t t = 0; t < L.K(); ++t)
            if (L.triples[t] == want) {
                r.u_assign[L.u_var(c, t)] = true;
                found = true;
                break;
            }
        if (!found) throw std::logic_error("restriction_for_order: matching triple missing");
    }
    r.restricted_order = L.base.vars;
    return r;
}

/// Applies the restriction to a refutation of Psi: coefficients are
/// restricted (widths cannot increase), axioms whose restriction vanishes are
/// dropped, and the survivors are matched by value onto the translation of
/// the base formula.
inline LinearIpsCertificate apply_restriction_to_certificate(const LinearIpsCertificate& cert,
                                                             const LiftedFormula& L,
                                                             const LiftRestriction& rho,
                                                             const Config& cfg = Config{}) {
    const Field& f = cert.system.field;
    std::map<VarId, Fe> sigma;
    for (const auto& [u, b] : rho.u_assign) sigma[u] = f.from_int(b ? 1 : 0);

    PolySystem target = translate_cnf(L.base, f);
    std::vector<Roabp> coeffs;

    // Survivors of the restriction, by value.
    std::vector<std::pair<SparsePoly, std::size_t>> survivors;
    for (std::size_t i = 0; i < cert.system.entries.size(); ++i) {
        SparsePoly p =
            cert.system.entries[i].poly.substitute_values(sigma).rename(rho.v_rename);
        if (!p.is_zero()) survivors.emplace_back(std::move(p), i);
    }
    std::vector<bool> taken(survivors.size(), false);
    for (const auto& e : target.entries) {
        bool matched = false;
        for (std::size_t s = 0; s < survivors.size(); ++s) {
            if (taken[s] || survivors[s].first != e.poly) continue;
            taken[s] = true;
            coeffs.push_back(
                cert.coefficients[survivors[s].second].restricted(sigma, rho.v_rename));
            matched = true;
            break;
        }
        if (!matched)
            throw std::logic_error(
                "apply_restriction: restricted system does not cover the base translation");
    }
    for (std::size_t s = 0; s < survivors.size(); ++s)
        if (!taken[s])
            throw std::logic_error("apply_restriction: leftover non-vanishing restricted axiom");

    SparsePoly tgt = cert.target.substitute_values(sigma).rename(rho.v_rename);
    (void)cfg;
    return LinearIpsCertificate(std::move(target), rho.restricted_order, std::move(coeffs),
                                std::move(tgt));
}

/// Desk-scale refutation builder for lifted formulas (wide mode only): a
/// selector-by-selector case split. Expanding one clause block uses the exact
/// identity
///   1 = E_C + sum_j u_j - sum_{j<t} u_j u_t prod_{t'>t} (1-u_{t'}),
/// where E_C is the translated exactly-one disjunction. Branches whose
/// selector conflicts with an earlier choice close through an
/// incompatibility axiom; every fully consistent branch leaves a relabelled
/// copy of the base formula, which is refuted by the Nullstellensatz oracle
/// over the v-variables. All coefficients stay sparse, so the certificate
/// expands and verifies exactly.
inline LinearIpsCertificate refute_lifted(const LiftedFormula& L,
                                          const std::vector<VarId>& order, const Config& cfg,
                                          std::uint32_t leaf_degree = 6,
                                          std::size_t branch_budget = 256) {
    if (!L.wide)
        throw std::invalid_argument("refute_lifted supports only wide exactly-one clauses");
    if (L.K() > 16) throw BudgetExceeded("refute_lifted: selector blocks too large");
    PolySystem system = L.system(cfg.make_field());
    const Field& f = system.field;
    const VarTablePtr& t = system.table;
    const std::size_t K = L.K();

    std::vector<SparsePoly> acc(system.entries.size(), SparsePoly::zero(f, t));

    auto u_poly = [&](std::size_t c, std::size_t tt) {
        return SparsePoly::variable(f, t, L.u_var(c, tt));
    };
    auto blocker = [&](std::size_t c, std::size_t after) {
        SparsePoly b = SparsePoly::constant(f, t, 1);
        for (std::size_t tt = after + 1; tt < K; ++tt)
            b *= SparsePoly::constant(f, t, 1) - u_poly(c, tt);
        return b;
    };

    struct Branch {
        std::vector<std::size_t> choice; // triple index per processed clause
        Monomial prefix;                 // prod of chosen selector variables
    };
    std::vector<Branch> alive{Branch{{}, Monomial()}};

    std::vector<std::vector<bool>> compatible(L.M * K, std::vector<bool>(L.M * K, true));
    for (std::size_t c = 0; c < L.M; ++c)
        for (std::size_t d = 0; d < L.M; ++d)
            for (std::size_t a = 0; a < K; ++a)
                for (std::size_t b = 0; b < K; ++b)
                    if (c != d)
                        compatible[L.u_index(c, a)][L.u_index(d, b)] =
                            detail::maps_compatible(L.pi(c, a), L.pi(d, b));

    for (std::size_t c = 0; c < L.M; ++c) {
        std::vector<Branch> next;
        for (const Branch& br : alive) {
            SparsePoly prefix = SparsePoly::monomial(f, t, br.prefix, f.one());
            acc[L.exactly_one_entry(c)] += prefix;
            for (std::size_t a = 0; a < K; ++a)
                for (std::size_t b = a + 1; b < K; ++b)
                    acc[L.pair_entry(c, a, b)] -= prefix * blocker(c, b);
            for (std::size_t tt = 0; tt < K; ++tt) {
                std::optional<std::size_t> conflict;
                for (std::size_t e = 0; e < br.choice.size(); ++e)
                    if (!compatible[L.u_index(e, br.choice[e])][L.u_index(c, tt)]) {
                        conflict = e;
                        break;
                    }
                if (!conflict) {
                    Branch nb;
                    nb.choice = br.choice;
                    nb.choice.push_back(tt);
                    nb.prefix = br.prefix.times(Monomial::var(L.u_var(c, tt)));
                    next.push_back(std::move(nb));
                } else {
                    std::size_t e = *conflict;
                    Monomial m = br.prefix.divide_var(L.u_var(e, br.choice[e]), 1);
                    std::size_t entry =
                        L.cross_entry(L.u_index(e, br.choice[e]), L.u_index(c, tt));
                    acc[entry] += SparsePoly::monomial(f, t, m, f.one());
                }
            }
        }
        alive = std::move(next);
        if (alive.size() > branch_budget)
            throw BudgetExceeded("refute_lifted: consistent-branch budget exceeded");
    }

    // Leaves: refute the relabelled base copy over the v-variables.
    for (const Branch& br : alive) {
        PolySystem leaf(f, t);
        for (std::size_t c = 0; c < L.M; ++c) {
            const Clause& cl = L.base.clauses[c];
            const auto& tr = L.triples[br.choice[c]];
            Clause local;
            for (int k = 0; k < 3; ++k)
                local.literals.emplace_back(L.v_vars[tr[k]], cl.literals[k].second);
            leaf.add(translate_clause(local, f, t), AxKind::Axiom, Part::Untagged);
        }
        for (VarId v : L.v_vars) {
            SparsePoly x = SparsePoly::variable(f, t, v);
            leaf.add(x.pow(2) - x, AxKind::BooleanAxiom, Part::Untagged);
            leaf.set_role(v, VarRole::X);
        }
        auto ns = find_ns_refutation(leaf, leaf_degree, L.v_vars, cfg);
        if (!ns)
            throw BudgetExceeded(
                "refute_lifted: no leaf Nullstellensatz refutation at the given degree");
        SparsePoly prefix = SparsePoly::monomial(f, t, br.prefix, f.one());
        for (std::size_t c = 0; c < L.M; ++c) {
            SparsePoly q = ns->coefficients[c].expand(cfg.expansion_budget);
            if (q.is_zero()) continue;
            Monomial m = br.prefix.divide_var(L.u_var(c, br.choice[c]), 1);
            acc[L.phi1_entry(c, br.choice[c])] += SparsePoly::monomial(f, t, m, f.one()) * q;
        }
        for (std::size_t j = 0; j < L.v_vars.size(); ++j) {
            SparsePoly h = ns->coefficients[L.M + j].expand(cfg.expansion_budget);
            if (h.is_zero()) continue;
            acc[L.bool_v_entry(j)] += prefix * h;
        }
    }

    std::vector<Roabp> coeffs;
    coeffs.reserve(acc.size());
    for (const auto& p : acc) coeffs.push_back(Roabp::from_sparse(p, order));
    return LinearIpsCertificate(std::move(system), order, std::move(coeffs),
                                SparsePoly::constant(f, t, 1));
}

} // namespace ipstk
