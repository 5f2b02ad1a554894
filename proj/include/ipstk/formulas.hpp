#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ipstk/linalg.hpp"
#include "ipstk/poly.hpp"
#include "ipstk/session.hpp"

namespace ipstk {

/// Disjunction of literals; no variable occurs twice, never empty.
struct Clause {
    std::vector<std::pair<VarId, bool>> literals; // (variable, is positive)

    bool operator==(const Clause& o) const { return literals == o.literals; }
    bool operator<(const Clause& o) const { return literals < o.literals; }
};

/// Normalizes a literal list: collapses duplicates, detects tautologies.
/// Returns nullopt for a tautological clause. Warnings explain what changed.
inline std::optional<Clause> normalize_clause(std::vector<std::pair<VarId, bool>> lits,
                                              std::vector<std::string>* warnings = nullptr) {
    std::map<VarId, bool> seen;
    bool duplicate = false;
    for (const auto& [v, pos] : lits) {
        auto it = seen.find(v);
        if (it == seen.end()) {
            seen.emplace(v, pos);
        } else if (it->second == pos) {
            duplicate = true;
        } else {
            if (warnings) warnings->push_back("tautological clause dropped");
            return std::nullopt;
        }
    }
    if (duplicate && warnings) warnings->push_back("duplicate literal collapsed");
    Clause c;
    std::set<VarId> emitted;
    for (const auto& [v, pos] : lits)
        if (emitted.insert(v).second) c.literals.emplace_back(v, pos);
    if (c.literals.empty()) throw std::invalid_argument("empty clause");
    return c;
}

struct Cnf {
    VarTablePtr table;
    std::vector<VarId> vars; // the formula's variable universe, in order
    std::vector<Clause> clauses;

    std::size_t num_vars() const { return vars.size(); }
    std::size_t num_clauses() const { return clauses.size(); }
};

/// Parses standard DIMACS cnf. Variable i becomes table entry `x<i>`.
/// Duplicate literals collapse and tautologies drop, with warnings.
inline Cnf parse_dimacs(const std::string& text, const VarTablePtr& table,
                        std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    std::string tok;
    long nvars = -1, nclauses = -1;
    while (in >> tok) {
        if (tok == "c") {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (tok == "p") {
            std::string kind;
            if (!(in >> kind) || kind != "cnf" || !(in >> nvars >> nclauses) || nvars < 0 ||
                nclauses < 0)
                throw std::invalid_argument("malformed DIMACS header");
            break;
        }
        throw std::invalid_argument("malformed DIMACS header");
    }
    if (nvars < 0) throw std::invalid_argument("missing DIMACS header");

    Cnf cnf;
    cnf.table = table;
    for (long i = 1; i <= nvars; ++i) cnf.vars.push_back(table->intern("x" + std::to_string(i)));

    std::vector<std::pair<VarId, bool>> current;
    long lit;
    while (in >> tok) {
        if (tok == "c") {
            std::string line;
            std::getline(in, line);
            continue;
        }
        try {
            lit = std::stol(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad DIMACS literal: " + tok);
        }
        if (lit == 0) {
            if (current.empty()) throw std::invalid_argument("empty clause in DIMACS input");
            auto c = normalize_clause(current, warnings);
            if (c) cnf.clauses.push_back(std::move(*c));
            current.clear();
            continue;
        }
        long idx = lit > 0 ? lit : -lit;
        if (idx > nvars) throw std::invalid_argument("DIMACS literal out of range");
        current.emplace_back(cnf.vars[idx - 1], lit > 0);
    }
    if (!current.empty()) throw std::invalid_argument("unterminated clause in DIMACS input");
    if (static_cast<long>(cnf.clauses.size()) > nclauses)
        throw std::invalid_argument("more clauses than the DIMACS header declares");
    return cnf;
}

/// Emits DIMACS; clause order preserved. With `name_comments`, the variable
/// index-to-name mapping is recorded in comment lines.
inline std::string emit_dimacs(const Cnf& cnf, bool name_comments = false) {
    std::map<VarId, std::size_t> index;
    for (std::size_t i = 0; i < cnf.vars.size(); ++i) index[cnf.vars[i]] = i + 1;
    std::ostringstream os;
    if (name_comments)
        for (std::size_t i = 0; i < cnf.vars.size(); ++i)
            os << "c var " << (i + 1) << ' ' << cnf.table->name(cnf.vars[i]) << '\n';
    os << "p cnf " << cnf.vars.size() << ' ' << cnf.clauses.size() << '\n';
    for (const Clause& c : cnf.clauses) {
        for (const auto& [v, pos] : c.literals) {
            auto it = index.find(v);
            if (it == index.end()) throw std::invalid_argument("clause variable not in universe");
            os << (pos ? "" : "-") << it->second << ' ';
        }
        os << "0\n";
    }
    return os.str();
}

enum class VarRole { X, Y, Z, AuxW, AuxField };
enum class AxKind { Axiom, BooleanAxiom };
enum class Part { P0, P1, Untagged };

inline bool boolean_role(VarRole r) {
    return r == VarRole::X || r == VarRole::Y || r == VarRole::Z;
}

struct PsEntry {
    SparsePoly poly;
    AxKind kind = AxKind::Axiom;
    Part part = Part::Untagged;
    std::string label;
};

/// A set of polynomial equations p = 0 with axiom kinds, interpolation
/// partition tags, and declared variable roles.
struct PolySystem {
    Field field;
    VarTablePtr table;
    std::vector<PsEntry> entries;
    std::map<VarId, VarRole> roles;

    PolySystem(Field f, VarTablePtr t) : field(f), table(std::move(t)) {}

    void add(SparsePoly p, AxKind kind = AxKind::Axiom, Part part = Part::Untagged,
             std::string label = {}) {
        require_same_field(field, p.field());
        require_same_table(table, p.table());
        entries.push_back(PsEntry{std::move(p), kind, part, std::move(label)});
    }

    void set_role(VarId v, VarRole r) {
        auto [it, fresh] = roles.try_emplace(v, r);
        if (!fresh && it->second != r)
            throw std::invalid_argument("conflicting role for variable " + table->name(v));
    }

    VarRole role_of(VarId v) const {
        auto it = roles.find(v);
        if (it == roles.end())
            throw std::invalid_argument("variable has no declared role: " + table->name(v));
        return it->second;
    }

    std::set<VarId> occurring_vars() const {
        std::set<VarId> vs;
        for (const auto& e : entries)
            for (VarId v : e.poly.vars()) vs.insert(v);
        return vs;
    }

    PolySystem subsystem(Part part) const {
        PolySystem s(field, table);
        s.roles = roles;
        for (const auto& e : entries)
            if (e.part == part) s.entries.push_back(e);
        return s;
    }

    /// Full-system sanity check: Boolean axioms exist exactly for the
    /// occurring Boolean-role variables, and every occurring variable has a
    /// role.
    void validate() const {
        std::set<VarId> with_axiom;
        for (const auto& e : entries) {
            if (e.kind != AxKind::BooleanAxiom) continue;
            auto vs = e.poly.vars();
            if (vs.size() != 1)
                throw std::invalid_argument("Boolean axiom must mention exactly one variable");
            VarId v = *vs.begin();
            SparsePoly expect = SparsePoly::variable(field, table, v).pow(2) -
                                SparsePoly::variable(field, table, v);
            if (e.poly != expect)
                throw std::invalid_argument("Boolean axiom is not x^2 - x for " + table->name(v));
            with_axiom.insert(v);
        }
        for (VarId v : occurring_vars()) {
            VarRole r = role_of(v);
            if (boolean_role(r) && !with_axiom.count(v))
                throw std::invalid_argument("Boolean-role variable lacks its Boolean axiom: " +
                                            table->name(v));
            if (!boolean_role(r) && with_axiom.count(v))
                throw std::invalid_argument("non-Boolean variable has a Boolean axiom: " +
                                            table->name(v));
        }
    }
};

/// Standard translation: a clause maps to prod (1-x_i) * prod x_j over its
/// positive and negative literals, so an assignment satisfies the clause iff
/// the translation vanishes. Boolean axioms are added for every variable of
/// the formula.
inline SparsePoly translate_clause(const Clause& c, const Field& f, const VarTablePtr& t) {
    SparsePoly p = SparsePoly::constant(f, t, 1);
    for (const auto& [v, pos] : c.literals) {
        SparsePoly x = SparsePoly::variable(f, t, v);
        p = p * (pos ? SparsePoly::constant(f, t, 1) - x : x);
    }
    return p;
}

inline PolySystem translate_cnf(const Cnf& cnf, const Field& f, Part part = Part::Untagged,
                                const std::map<VarId, VarRole>& roles = {}) {
    PolySystem s(f, cnf.table);
    for (std::size_t i = 0; i < cnf.clauses.size(); ++i)
        s.add(translate_clause(cnf.clauses[i], f, cnf.table), AxKind::Axiom, part,
              "clause " + std::to_string(i + 1));
    for (VarId v : cnf.vars) {
        SparsePoly x = SparsePoly::variable(f, cnf.table, v);
        s.add(x.pow(2) - x, AxKind::BooleanAxiom, part, "bool " + cnf.table->name(v));
    }
    for (VarId v : cnf.vars) {
        auto it = roles.find(v);
        s.set_role(v, it == roles.end() ? VarRole::X : it->second);
    }
    return s;
}

/// Raised when the per-branch auxiliary system cannot be reduced to linear
/// equations.
class NonlinearAuxError : public std::domain_error {
public:
    NonlinearAuxError() : std::domain_error("nonlinear occurrence of an auxiliary-field variable") {}
};

struct SatResult {
    bool sat = false;
    std::map<VarId, Fe> witness; // meaningful when sat
};

namespace detail {

/// Per-branch auxiliary handling: the residual polynomials mention only
/// auxiliary field variables. Solve the linear ones, substitute every value
/// they force, repeat; succeed when nothing nonlinear is left.
inline bool solve_aux_branch(std::vector<SparsePoly> residual, const Field& f,
                             std::map<VarId, Fe>& witness) {
    std::map<VarId, Fe> pinned;
    while (true) {
        std::vector<SparsePoly> linear, nonlinear;
        for (auto& p : residual) {
            SparsePoly q = p.substitute_values(pinned);
            if (q.is_zero()) continue;
            if (q.is_constant()) return false;
            if (q.degree() <= 1) linear.push_back(std::move(q));
            else nonlinear.push_back(std::move(q));
        }
        std::map<VarId, std::size_t> col;
        for (const auto& p : linear)
            for (VarId v : p.vars()) col.try_emplace(v, col.size());
        std::vector<LinearEq> eqs;
        for (const auto& p : linear) {
            LinearEq eq;
            eq.rhs = f.zero();
            for (const auto& [m, c] : p.terms()) {
                if (m.is_unit()) {
                    eq.rhs = f.neg(c);
                } else {
                    VarId v = m.exponents().begin()->first;
                    eq.coeffs[col[v]] = c;
                }
            }
            eqs.push_back(std::move(eq));
        }
        auto sol = solve_linear_system(eqs, col.size(), f);
        if (!sol.consistent) return false;
        if (nonlinear.empty()) {
            for (const auto& [v, idx] : col) witness[v] = sol.solution[idx];
            for (const auto& [v, val] : pinned) witness[v] = val;
            return true;
        }
        bool progress = false;
        for (const auto& [v, idx] : col)
            if (sol.pinned[idx] && !pinned.count(v)) {
                pinned[v] = sol.solution[idx];
                progress = true;
            }
        if (!progress) throw NonlinearAuxError();
        residual = std::move(nonlinear);
        for (auto& p : linear) residual.push_back(std::move(p));
    }
}

} // namespace detail

/// Exhaustive satisfiability oracle: searches Boolean assignments for the
/// Boolean-role variables (branch and propagate, so equivalent to full
/// enumeration), then solves the induced linear system for auxiliary field
/// variables on each complete branch. `fixed` pre-assigns Boolean variables
/// (typically a z-assignment).
inline SatResult brute_force_sat(const PolySystem& system,
                                 const std::map<VarId, bool>& fixed = {},
                                 const Config& cfg = Config{}) {
    const Field& f = system.field;
    std::set<VarId> occurring = system.occurring_vars();
    std::vector<VarId> bool_vars, aux_vars;
    for (VarId v : occurring) {
        VarRole r = system.role_of(v);
        if (boolean_role(r)) {
            if (!fixed.count(v)) bool_vars.push_back(v);
        } else {
            aux_vars.push_back(v);
        }
    }
    if (static_cast<int>(bool_vars.size()) > cfg.enumeration_budget)
        throw BudgetExceeded("brute_force_sat: Boolean variable count exceeds enumeration budget");

    // Compiled view for cheap partial evaluation.
    struct CTerm {
        Fe coeff;
        std::vector<std::pair<VarId, std::uint32_t>> factors;
    };
    struct CPoly {
        std::vector<CTerm> terms;
        std::vector<VarId> bvars;
        bool has_aux = false;
    };
    std::vector<CPoly> polys;
    std::map<VarId, std::vector<std::size_t>> occurs;
    for (const auto& e : system.entries) {
        CPoly cp;
        std::set<VarId> bset;
        for (const auto& [m, c] : e.poly.terms()) {
            CTerm t;
            t.coeff = c;
            for (const auto& [v, ex] : m.exponents()) {
                t.factors.emplace_back(v, ex);
                if (boolean_role(system.role_of(v))) bset.insert(v);
                else cp.has_aux = true;
            }
            cp.terms.push_back(std::move(t));
        }
        cp.bvars.assign(bset.begin(), bset.end());
        std::size_t idx = polys.size();
        for (VarId v : cp.bvars) occurs[v].push_back(idx);
        polys.push_back(std::move(cp));
    }

    std::map<VarId, int> assign; // -1 absent; else 0/1
    for (const auto& [v, b] : fixed) assign[v] = b ? 1 : 0;

    // Evaluates a polynomial under the partial Boolean assignment, with one
    // optional extra assignment. Returns nullopt if another unassigned
    // Boolean variable blocks evaluation.
    constexpr VarId kNoExtra = UINT32_MAX;
    auto eval_poly = [&](const CPoly& cp, VarId extra_var, int extra_val) -> std::optional<Fe> {
        Fe acc = f.zero();
        for (const auto& t : cp.terms) {
            Fe val = t.coeff;
            bool dead = false;
            for (const auto& [v, ex] : t.factors) {
                int a;
                if (extra_var != kNoExtra && v == extra_var) {
                    a = extra_val;
                } else {
                    auto it = assign.find(v);
                    if (it == assign.end()) return std::nullopt;
                    a = it->second;
                }
                if (a == 0) {
                    dead = true;
                    break;
                }
                // a == 1 contributes nothing; exponents are irrelevant on 0/1.
                (void)ex;
            }
            if (!dead) acc = f.add(acc, val);
        }
        return acc;
    };

    std::size_t nodes = 0;
    std::map<VarId, Fe> leaf_witness;

    // Returns true when a satisfying branch is found; fills leaf_witness.
    std::function<bool(std::vector<std::size_t>)> search =
        [&](std::vector<std::size_t> dirty) -> bool {
        if (++nodes > cfg.sat_node_budget)
            throw BudgetExceeded("brute_force_sat: search node budget exceeded");
        std::vector<std::pair<VarId, int>> trail;
        auto undo = [&] {
            for (auto& [v, dummy] : trail) assign.erase(v);
        };
        // Propagation: conflicts from fully assigned aux-free polynomials and
        // forced values from polynomials with one unassigned variable.
        std::vector<std::size_t> queue = std::move(dirty);
        if (queue.empty())
            for (std::size_t i = 0; i < polys.size(); ++i) queue.push_back(i);
        while (!queue.empty()) {
            std::size_t pi = queue.back();
            queue.pop_back();
            const CPoly& cp = polys[pi];
            if (cp.has_aux) continue;
            VarId open = 0;
            int open_count = 0;
            for (VarId v : cp.bvars)
                if (!assign.count(v)) {
                    open = v;
                    if (++open_count > 1) break;
                }
            if (open_count > 1) continue;
            if (open_count == 0) {
                auto val = eval_poly(cp, kNoExtra, 0);
                if (!f.is_zero(*val)) {
                    undo();
                    return false;
                }
                continue;
            }
            auto v0 = eval_poly(cp, open, 0);
            auto v1 = eval_poly(cp, open, 1);
            bool ok0 = f.is_zero(*v0), ok1 = f.is_zero(*v1);
            if (!ok0 && !ok1) {
                undo();
                return false;
            }
            if (ok0 && ok1) continue;
            int forced = ok0 ? 0 : 1;
            assign[open] = forced;
            trail.emplace_back(open, forced);
            for (std::size_t q : occurs[open]) queue.push_back(q);
        }
        // Pick a branch variable: prefer a polynomial close to being decided.
        VarId pick = 0;
        bool found = false;
        std::size_t best = SIZE_MAX;
        for (const CPoly& cp : polys) {
            if (cp.has_aux) continue;
            std::size_t open = 0;
            VarId first = 0;
            for (VarId v : cp.bvars)
                if (!assign.count(v)) {
                    if (open == 0) first = v;
                    ++open;
                }
            if (open > 0 && open < best) {
                best = open;
                pick = first;
                found = true;
            }
        }
        if (!found)
            for (VarId v : bool_vars)
                if (!assign.count(v)) {
                    pick = v;
                    found = true;
                    break;
                }
        if (!found) {
            // Complete Boolean leaf: discharge auxiliary variables.
            std::map<VarId, Fe> point;
            for (const auto& [v, a] : assign) point[v] = f.from_int(a);
            std::vector<SparsePoly> residual;
            for (const auto& e : system.entries) {
                SparsePoly q = e.poly.substitute_values(point);
                if (!q.is_zero()) residual.push_back(std::move(q));
            }
            std::map<VarId, Fe> aux_witness;
            for (const auto& q : residual)
                if (q.is_constant() && !f.is_zero(q.constant_value())) {
                    undo();
                    return false;
                }
            if (!detail::solve_aux_branch(residual, f, aux_witness)) {
                undo();
                return false;
            }
            leaf_witness = point;
            for (const auto& [v, val] : aux_witness) leaf_witness[v] = val;
            for (VarId v : aux_vars) leaf_witness.try_emplace(v, f.zero());
            return true;
        }
        for (int val : {0, 1}) {
            assign[pick] = val;
            if (search(occurs[pick])) return true;
            assign.erase(pick);
        }
        undo();
        return false;
    };

    SatResult res;
    res.sat = search({});
    if (res.sat) {
        res.witness = std::move(leaf_witness);
        for (const auto& [v, b] : fixed) res.witness[v] = f.from_int(b ? 1 : 0);
    }
    return res;
}

/// Clause-level satisfiability (DPLL with unit propagation); the independent
/// check against the polynomial-level oracle. `fixed` pre-assigns variables.
inline bool cnf_sat(const Cnf& cnf, const std::map<VarId, bool>& fixed = {},
                    std::size_t node_budget = 4'000'000) {
    std::map<VarId, std::vector<std::size_t>> occurs;
    for (std::size_t i = 0; i < cnf.clauses.size(); ++i)
        for (const auto& [v, pos] : cnf.clauses[i].literals) occurs[v].push_back(i);

    std::map<VarId, int> assign;
    for (const auto& [v, b] : fixed) assign[v] = b ? 1 : 0;
    std::size_t nodes = 0;

    std::function<bool()> search = [&]() -> bool {
        if (++nodes > node_budget) throw BudgetExceeded("cnf_sat: node budget exceeded");
        // Unit propagation to fixpoint.
        std::vector<VarId> trail;
        auto undo = [&] {
            for (VarId v : trail) assign.erase(v);
        };
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Clause& c : cnf.clauses) {
                bool satisfied = false;
                int open = 0;
                std::pair<VarId, bool> unit{0, false};
                for (const auto& [v, pos] : c.literals) {
                    auto it = assign.find(v);
                    if (it == assign.end()) {
                        ++open;
                        unit = {v, pos};
                    } else if ((it->second == 1) == pos) {
                        satisfied = true;
                        break;
                    }
                }
                if (satisfied) continue;
                if (open == 0) {
                    undo();
                    return false;
                }
                if (open == 1) {
                    assign[unit.first] = unit.second ? 1 : 0;
                    trail.push_back(unit.first);
                    changed = true;
                }
            }
        }
        // Branch on the first unassigned variable of an unsatisfied clause.
        for (const Clause& c : cnf.clauses) {
            bool satisfied = false;
            VarId open_var = 0;
            bool has_open = false;
            for (const auto& [v, pos] : c.literals) {
                auto it = assign.find(v);
                if (it == assign.end()) {
                    if (!has_open) {
                        open_var = v;
                        has_open = true;
                    }
                } else if ((it->second == 1) == pos) {
                    satisfied = true;
                    break;
                }
            }
            if (satisfied || !has_open) continue;
            for (int val : {1, 0}) {
                assign[open_var] = val;
                if (search()) return true;
                assign.erase(open_var);
            }
            undo();
            return false;
        }
        return true; // every clause satisfied
    };
    return search();
}

} // namespace ipstk
