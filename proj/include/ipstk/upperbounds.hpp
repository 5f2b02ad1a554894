#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "ipstk/certificate.hpp"

namespace ipstk {

// ---------------------------------------------------------------------------
// Tseitin formulas
// ---------------------------------------------------------------------------

/// Undirected graph (multi-edges and self-loops allowed) with a 0/1 vertex
/// charge. Unsatisfiable when the total charge is odd.
struct TseitinInstance {
    int nverts = 0;
    std::vector<std::pair<int, int>> edges; // 1-based endpoints
    std::vector<int> charge;                // size nverts, entries 0/1

    void check() const {
        if (nverts < 1 || static_cast<int>(charge.size()) != nverts)
            throw std::invalid_argument("Tseitin instance: bad vertex/charge data");
        for (int c : charge)
            if (c != 0 && c != 1) throw std::invalid_argument("Tseitin charge must be 0/1");
        for (const auto& [a, b] : edges)
            if (a < 1 || a > nverts || b < 1 || b > nverts)
                throw std::invalid_argument("Tseitin edge endpoint out of range");
    }
    bool odd_charge() const {
        int s = 0;
        for (int c : charge) s += c;
        return s % 2 == 1;
    }
};

/// The {0,1}-basis polynomial encoding: per vertex u the parity constraint
/// prod_{e at u} (1 - 2 x_e) = (-1)^{charge(u)}, plus the Boolean axioms.
inline PolySystem tseitin_system(const TseitinInstance& inst, const std::vector<VarId>& edge_vars,
                                 const Field& f, const VarTablePtr& t) {
    PolySystem sys(f, t);
    for (int u = 1; u <= inst.nverts; ++u) {
        SparsePoly prod = SparsePoly::constant(f, t, 1);
        for (std::size_t e = 0; e < inst.edges.size(); ++e) {
            int hits = (inst.edges[e].first == u) + (inst.edges[e].second == u);
            for (int h = 0; h < hits; ++h)
                prod *= SparsePoly::constant(f, t, 1) -
                        SparsePoly::variable(f, t, edge_vars[e]).scale(f.from_int(2));
        }
        prod -= SparsePoly::constant(f, t, inst.charge[u - 1] ? -1 : 1);
        sys.add(prod, AxKind::Axiom, Part::Untagged, "vertex " + std::to_string(u));
    }
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
        SparsePoly x = SparsePoly::variable(f, t, edge_vars[e]);
        sys.add(x.pow(2) - x, AxKind::BooleanAxiom, Part::Untagged,
                "bool " + t->name(edge_vars[e]));
    }
    for (VarId v : edge_vars) sys.set_role(v, VarRole::X);
    return sys;
}

/// Grigoriev-style refutation, made explicit. Work in the +-1 basis with
/// variables y_e and axioms A_u = prod_{e at u} y_e - (-1)^{charge(u)} and
/// B_e = y_e^2 - 1. Telescoping the vertex products against the signs gives
///   prod_e y_e^2 + 1 = sum_u (prod_{u'<u} s_{u'}) (prod_{u''>u} m_{u''}) A_u
/// (the total sign is -1 for an odd charge), and a second telescoping reduces
/// prod_e y_e^2 - 1 to the B_e. Subtracting yields the constant 2; scaling by
/// 1/2 makes every coefficient a single monomial, hence a width-1 roABP in
/// any order. The change of basis y_e -> 1 - 2 x_e maps the certificate onto
/// the {0,1} system without touching any layer dimension.
inline LinearIpsCertificate refute_tseitin(const TseitinInstance& inst, Session& sess,
                                           std::vector<std::size_t> edge_order = {}) {
    inst.check();
    if (!inst.odd_charge())
        throw std::invalid_argument("refute_tseitin: even charge, the instance is satisfiable");
    const Field& f = sess.field;
    if (f.characteristic() == 2)
        throw std::invalid_argument("refute_tseitin: characteristic 2 field");
    const VarTablePtr& t = sess.table;
    std::size_t m = inst.edges.size();
    if (edge_order.empty())
        for (std::size_t e = 0; e < m; ++e) edge_order.push_back(e);
    if (edge_order.size() != m)
        throw std::invalid_argument("refute_tseitin: edge order must cover every edge");

    std::vector<VarId> xv(m), yv(m);
    for (std::size_t e = 0; e < m; ++e) {
        xv[e] = sess.var("xe" + std::to_string(e + 1));
        yv[e] = sess.var("ye" + std::to_string(e + 1));
    }
    std::vector<VarId> yorder, xorder;
    for (std::size_t pos = 0; pos < m; ++pos) {
        yorder.push_back(yv[edge_order[pos]]);
        xorder.push_back(xv[edge_order[pos]]);
    }

    PolySystem sys = tseitin_system(inst, xv, f, t);

    // Vertex monomials m_u and signs s_u in the +-1 world.
    auto vertex_monomial = [&](int u) {
        Monomial mono;
        for (std::size_t e = 0; e < m; ++e) {
            int hits = (inst.edges[e].first == u) + (inst.edges[e].second == u);
            if (hits > 0) mono = mono.times(Monomial::var(yv[e], hits));
        }
        return mono;
    };
    Fe half = f.inv(f.from_int(2));

    std::vector<SparsePoly> ycoeff_vertex, ycoeff_edge;
    Fe sign_prefix = f.one();
    for (int u = 1; u <= inst.nverts; ++u) {
        Monomial mono;
        for (int w = u + 1; w <= inst.nverts; ++w) mono = mono.times(vertex_monomial(w));
        Fe c = f.mul(sign_prefix, half);
        ycoeff_vertex.push_back(SparsePoly::monomial(f, t, mono, c));
        sign_prefix = f.mul(sign_prefix, f.from_int(inst.charge[u - 1] ? -1 : 1));
    }
    for (std::size_t e = 0; e < m; ++e) {
        Monomial mono;
        for (std::size_t e2 = e + 1; e2 < m; ++e2) mono = mono.times(Monomial::var(yv[e2], 2));
        ycoeff_edge.push_back(SparsePoly::monomial(f, t, mono, f.neg(half)));
    }

    // Basis change; B_e maps to 4 (x_e^2 - x_e), so its coefficient absorbs
    // the 4.
    std::map<VarId, Roabp::AffineImage> to_x;
    for (std::size_t e = 0; e < m; ++e)
        to_x[yv[e]] = Roabp::AffineImage{xv[e], f.one(), f.from_int(-2)};

    std::vector<Roabp> coeffs;
    for (int u = 1; u <= inst.nverts; ++u)
        coeffs.push_back(Roabp::from_sparse(ycoeff_vertex[u - 1], yorder).change_basis(to_x));
    for (std::size_t e = 0; e < m; ++e)
        coeffs.push_back(
            Roabp::from_sparse(ycoeff_edge[e].scale(f.from_int(4)), yorder).change_basis(to_x));
    return LinearIpsCertificate(std::move(sys), xorder, std::move(coeffs),
                                SparsePoly::constant(f, t, 1));
}

// ---------------------------------------------------------------------------
// Functional pigeonhole principle
// ---------------------------------------------------------------------------

/// FPHP^{n+1}_n clause set; variables x_{i,k} in the hole-major order.
struct FphpInstance {
    int n = 2;
    Cnf cnf;
    std::vector<std::vector<VarId>> var; // var[i][k], 1-based pigeons/holes inside
    std::vector<VarId> order;            // hole-major
};

inline FphpInstance make_fphp(int n, Session& sess) {
    if (n < 1) throw std::invalid_argument("FPHP needs n >= 1");
    FphpInstance inst;
    inst.n = n;
    inst.cnf.table = sess.table;
    inst.var.assign(n + 2, std::vector<VarId>(n + 1, 0));
    for (int i = 1; i <= n + 1; ++i)
        for (int k = 1; k <= n; ++k)
            inst.var[i][k] = sess.var("x_" + std::to_string(i) + "_" + std::to_string(k));
    for (int k = 1; k <= n; ++k)
        for (int i = 1; i <= n + 1; ++i) {
            inst.order.push_back(inst.var[i][k]);
            inst.cnf.vars.push_back(inst.var[i][k]);
        }
    // Pigeon, hole, functionality clauses, in this order.
    for (int i = 1; i <= n + 1; ++i) {
        Clause c;
        for (int k = 1; k <= n; ++k) c.literals.emplace_back(inst.var[i][k], true);
        inst.cnf.clauses.push_back(std::move(c));
    }
    for (int k = 1; k <= n; ++k)
        for (int i = 1; i <= n + 1; ++i)
            for (int j = i + 1; j <= n + 1; ++j)
                inst.cnf.clauses.push_back(
                    Clause{{{inst.var[i][k], false}, {inst.var[j][k], false}}});
    for (int i = 1; i <= n + 1; ++i)
        for (int k = 1; k <= n; ++k)
            for (int l = k + 1; l <= n; ++l)
                inst.cnf.clauses.push_back(
                    Clause{{{inst.var[i][k], false}, {inst.var[i][l], false}}});
    return inst;
}

namespace detail {

/// Width <= m count-tracking roABP for a symmetric multilinear polynomial
/// sum_S a_{|S|} prod_{k in S} y_k over the given variables, in their order.
inline Roabp symmetric_multilinear_roabp(const std::vector<Fe>& by_degree,
                                         const std::vector<VarId>& vars, const Field& f,
                                         const VarTablePtr& t) {
    std::size_t m = vars.size();
    if (by_degree.size() != m + 1)
        throw std::invalid_argument("symmetric roABP needs one coefficient per degree");
    if (m == 0) throw std::invalid_argument("symmetric roABP needs at least one variable");
    auto one = SparsePoly::constant(f, t, 1);
    auto zero = SparsePoly::zero(f, t);
    std::vector<PolyMatrix> layers;
    if (m == 1) {
        PolyMatrix only(1, 1, zero);
        only.at(0, 0) = SparsePoly::constant(f, t, by_degree[0]) +
                        SparsePoly::variable(f, t, vars[0]).scale(by_degree[1]);
        layers.push_back(std::move(only));
        return Roabp(f, t, vars, std::move(layers));
    }
    for (std::size_t k = 0; k + 1 < m; ++k) {
        // Counts 0..k flow to 0..k+1; staying is 1, taking the variable bumps
        // the count.
        PolyMatrix mat(k + 1, k + 2, zero);
        for (std::size_t c = 0; c <= k; ++c) {
            mat.at(c, c) = one;
            mat.at(c, c + 1) = SparsePoly::variable(f, t, vars[k]);
        }
        layers.push_back(std::move(mat));
    }
    PolyMatrix last(m, 1, zero);
    for (std::size_t c = 0; c < m; ++c)
        last.at(c, 0) = SparsePoly::constant(f, t, by_degree[c]) +
                        SparsePoly::variable(f, t, vars[m - 1]).scale(by_degree[c + 1]);
    layers.push_back(std::move(last));
    return Roabp(f, t, vars, std::move(layers));
}

/// Substitutes each program variable by the sum of a block of fresh
/// variables, layer by layer. Every layer entry must be affine in its
/// variable (A + B y); the block realizes A + B (x_1 + ... + x_m) as
///   [A + B x_1 | B] [[I,0],[x I, I]] ... [I ; x_m I],
/// so the width at most doubles.
inline Roabp substitute_sum_blocks(const Roabp& p,
                                   const std::map<VarId, std::vector<VarId>>& blocks) {
    const Field& f = p.field();
    const VarTablePtr& t = p.table();
    auto zero = SparsePoly::zero(f, t);
    std::vector<VarId> new_order;
    std::vector<PolyMatrix> out;
    for (std::size_t li = 0; li < p.layers().size(); ++li) {
        VarId y = p.order()[li];
        auto bit = blocks.find(y);
        if (bit == blocks.end()) {
            new_order.push_back(y);
            out.push_back(p.layers()[li]);
            continue;
        }
        const std::vector<VarId>& xs = bit->second;
        if (xs.empty()) throw std::invalid_argument("empty substitution block");
        const PolyMatrix& layer = p.layers()[li];
        std::size_t r = layer.rows, c = layer.cols;
        // Split each entry a + b y into constants.
        std::vector<Fe> A(r * c, f.zero()), B(r * c, f.zero());
        for (std::size_t idx = 0; idx < layer.entries.size(); ++idx) {
            const SparsePoly& e = layer.entries[idx];
            if (e.degree_in(y) > 1)
                throw std::invalid_argument(
                    "substitute_sum_blocks: layer entry is not affine in its variable");
            for (const auto& [mono, coeff] : e.terms()) {
                if (mono.is_unit()) A[idx] = coeff;
                else B[idx] = coeff;
            }
        }
        std::size_t mlen = xs.size();
        if (mlen == 1) {
            PolyMatrix mat(r, c, zero);
            for (std::size_t idx = 0; idx < layer.entries.size(); ++idx)
                mat.entries[idx] = SparsePoly::constant(f, t, A[idx]) +
                                   SparsePoly::variable(f, t, xs[0]).scale(B[idx]);
            new_order.push_back(xs[0]);
            out.push_back(std::move(mat));
            continue;
        }
        // First block layer: r x 2c, [A + B x_1 | B].
        PolyMatrix first(r, 2 * c, zero);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                first.at(i, j) = SparsePoly::constant(f, t, A[i * c + j]) +
                                 SparsePoly::variable(f, t, xs[0]).scale(B[i * c + j]);
                first.at(i, c + j) = SparsePoly::constant(f, t, B[i * c + j]);
            }
        new_order.push_back(xs[0]);
        out.push_back(std::move(first));
        for (std::size_t q = 1; q + 1 < mlen; ++q) {
            PolyMatrix mid(2 * c, 2 * c, zero);
            for (std::size_t j = 0; j < c; ++j) {
                mid.at(j, j) = SparsePoly::constant(f, t, 1);
                mid.at(c + j, j) = SparsePoly::variable(f, t, xs[q]);
                mid.at(c + j, c + j) = SparsePoly::constant(f, t, 1);
            }
            new_order.push_back(xs[q]);
            out.push_back(std::move(mid));
        }
        PolyMatrix lastm(2 * c, c, zero);
        for (std::size_t j = 0; j < c; ++j) {
            lastm.at(j, j) = SparsePoly::constant(f, t, 1);
            lastm.at(c + j, j) = SparsePoly::variable(f, t, xs[mlen - 1]);
        }
        new_order.push_back(xs[mlen - 1]);
        out.push_back(std::move(lastm));
    }
    return Roabp(f, t, std::move(new_order), std::move(out));
}

} // namespace detail

/// Refutes FPHP^{n+1}_n in the hole-major order. The pigeon axioms rewrite to
/// 1 - sum_k x_{ik} against the functionality axioms; summing over pigeons
/// leaves the subset-sum instance n+1 - sum_k y_k with y_k = sum_i x_{ik}.
/// Its multilinear inverse g takes value 1/(n+1-s) at Hamming weight s and is
/// symmetric, so it has a width n+1 count-tracking roABP; the Boolean-axiom
/// cofactors h_k are the y_k-cofactors of g, symmetric and multilinear as
/// well. Substituting y_k by its pigeon block doubles the widths at most, and
/// y_k^2 - y_k expands into hole and Boolean axioms.
inline LinearIpsCertificate refute_fphp(int n, Session& sess) {
    const Field& f = sess.field;
    const VarTablePtr& t = sess.table;
    if (f.characteristic() != 0 && f.characteristic() <= static_cast<std::uint64_t>(n) + 1)
        throw std::invalid_argument("refute_fphp: field characteristic must exceed n+1");
    FphpInstance inst = make_fphp(n, sess);
    PolySystem sys = translate_cnf(inst.cnf, f);

    // Scratch y-variables, one per hole, ordered like the hole blocks.
    std::vector<VarId> yvars;
    for (int k = 1; k <= n; ++k) yvars.push_back(sess.var("yh" + std::to_string(k)));

    // g: value 1/(n+1-s) at weight s; degree coefficients by binomial
    // transform a_s = sum_j (-1)^(s-j) C(s,j) / (n+1-j).
    std::vector<Fe> values(n + 1), a(n + 2, f.zero());
    for (int s = 0; s <= n; ++s) values[s] = f.inv(f.from_int(n + 1 - s));
    std::vector<std::vector<Fe>> choose(n + 1, std::vector<Fe>(n + 1, f.zero()));
    for (int s = 0; s <= n; ++s) {
        choose[s][0] = f.one();
        for (int j = 1; j <= s; ++j)
            choose[s][j] = f.add(j <= s - 1 ? choose[s - 1][j] : f.zero(),
                                 choose[s - 1][j - 1]);
    }
    for (int s = 0; s <= n; ++s) {
        Fe acc = f.zero();
        for (int j = 0; j <= s; ++j) {
            Fe term = f.mul(choose[s][j], values[j]);
            if ((s - j) % 2 == 1) term = f.neg(term);
            acc = f.add(acc, term);
        }
        a[s] = acc;
    }

    Roabp g = detail::symmetric_multilinear_roabp(std::vector<Fe>(a.begin(), a.begin() + n + 1),
                                                  yvars, f, t);
    // h_k = y_k-cofactor of g, symmetric over the other holes with degree
    // coefficients a_{s+1}. Since the y_k^2-part of g (n+1 - sum y) is
    // exactly -h_k y_k^2 and the h_k are multilinear, the subset-sum identity
    //   1 = g (n+1 - sum y) + sum_k h_k (y_k^2 - y_k)
    // is exact (both sides are multilinear and agree on the Boolean cube).
    std::vector<Roabp> h;
    for (int k = 1; k <= n; ++k) {
        std::vector<VarId> others;
        for (int k2 = 1; k2 <= n; ++k2)
            if (k2 != k) others.push_back(yvars[k2 - 1]);
        std::vector<Fe> shifted(a.begin() + 1, a.begin() + n + 1); // degrees 0..n-1
        if (others.empty()) {
            h.push_back(Roabp(f, t, shifted[0]).with_order(std::vector<VarId>{yvars[k - 1]}));
        } else {
            h.push_back(detail::symmetric_multilinear_roabp(shifted, others, f, t)
                            .with_order(yvars));
        }
    }
    Roabp gfull = g.with_order(yvars);

    // Blocks: y_k -> x_{1k} + ... + x_{(n+1)k}.
    std::map<VarId, std::vector<VarId>> blocks;
    for (int k = 1; k <= n; ++k) {
        std::vector<VarId> xs;
        for (int i = 1; i <= n + 1; ++i) xs.push_back(inst.var[i][k]);
        blocks[yvars[k - 1]] = xs;
    }
    Roabp gx = detail::substitute_sum_blocks(gfull, blocks);
    std::vector<Roabp> hx;
    for (const auto& hk : h) hx.push_back(detail::substitute_sum_blocks(hk, blocks));

    // Assemble: entry layout of translate_cnf(inst.cnf):
    //   pigeons [0, n+1), holes, functionality, Boolean axioms (hole-major).
    std::size_t pigeon0 = 0;
    std::size_t hole0 = pigeon0 + (n + 1);
    std::size_t func0 = hole0 + static_cast<std::size_t>(n) * (n + 1) * n / 2;
    std::size_t bool0 = func0 + static_cast<std::size_t>(n + 1) * n * (n - 1) / 2;

    std::vector<Roabp> coeffs(sys.entries.size(), Roabp::zero_program(f, t, inst.order));
    for (int i = 1; i <= n + 1; ++i) coeffs[pigeon0 + (i - 1)] = gx;
    // Functionality coefficients: -(g~ tensor prod_{l'>l} (1 - x_{il'})).
    std::size_t fidx = func0;
    for (int i = 1; i <= n + 1; ++i)
        for (int k = 1; k <= n; ++k)
            for (int l = k + 1; l <= n; ++l) {
                std::map<VarId, SparsePoly> factors;
                for (int lp = l + 1; lp <= n; ++lp)
                    factors.emplace(inst.var[i][lp],
                                    SparsePoly::constant(f, t, 1) -
                                        SparsePoly::variable(f, t, inst.var[i][lp]));
                std::vector<PolyMatrix> ls;
                for (VarId v : inst.order) {
                    auto itf = factors.find(v);
                    ls.emplace_back(1, 1,
                                    itf == factors.end() ? SparsePoly::constant(f, t, 1)
                                                         : itf->second);
                }
                Roabp weights(f, t, inst.order, std::move(ls));
                coeffs[fidx++] = roabp_mul(gx, weights).scaled(f.from_int(-1));
            }
    // y_k^2 - y_k substitutes into 2 sum_{i<j} x_ik x_jk + sum_i (x_ik^2 - x_ik),
    // so the hole coefficients are 2 h~_k and the Boolean coefficients h~_k.
    std::size_t hidx = hole0;
    for (int k = 1; k <= n; ++k)
        for (int i = 1; i <= n + 1; ++i)
            for (int j = i + 1; j <= n + 1; ++j)
                coeffs[hidx++] = hx[k - 1].scaled(f.from_int(2));
    std::size_t bidx = bool0;
    for (int k = 1; k <= n; ++k)
        for (int i = 1; i <= n + 1; ++i)
            coeffs[bidx++] = hx[k - 1];

    return LinearIpsCertificate(std::move(sys), inst.order, std::move(coeffs),
                                SparsePoly::constant(f, t, 1));
}

// ---------------------------------------------------------------------------
// Tree-like Polynomial Calculus simulation
// ---------------------------------------------------------------------------

struct PcAxiomRule {
    std::size_t axiom;
};
struct PcMulRule {
    std::size_t src;
    VarId var;
};
struct PcLinRule {
    std::size_t src1, src2;
    Fe a, b;
};
using PcRule = std::variant<PcAxiomRule, PcMulRule, PcLinRule>;

/// Polynomial Calculus proof: lines with their deriving rules. Tree-like
/// means no line is used as a premise more than once.
struct PcProof {
    struct Line {
        SparsePoly poly;
        PcRule rule;
    };
    std::vector<Line> lines;

    bool tree_like() const {
        std::vector<int> uses(lines.size(), 0);
        auto count = [&](std::size_t src) {
            if (src >= lines.size())
                throw std::invalid_argument("PC rule references a line outside the proof");
            ++uses[src];
        };
        for (const auto& ln : lines) {
            if (auto* m = std::get_if<PcMulRule>(&ln.rule)) count(m->src);
            if (auto* l = std::get_if<PcLinRule>(&ln.rule)) {
                count(l->src1);
                count(l->src2);
            }
        }
        for (int u : uses)
            if (u > 1) return false;
        return true;
    }

    std::vector<std::size_t> subtree_sizes() const {
        std::vector<std::size_t> s(lines.size(), 1);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (auto* m = std::get_if<PcMulRule>(&lines[i].rule)) s[i] = s[m->src] + 1;
            if (auto* l = std::get_if<PcLinRule>(&lines[i].rule))
                s[i] = s[l->src1] + s[l->src2] + 1;
        }
        return s;
    }
};

/// Converts a tree-like PC proof into a linear IPS certificate with target
/// the last line. Axiom lines start with the axiom's own roABP; multiplying
/// by a variable tensors every coefficient with a width-1 program, so widths
/// are preserved; linear combinations add coefficient programs, so widths
/// add. By induction the final width is at most (subtree size) * w.
inline LinearIpsCertificate simulate_treelike_pc(const PcProof& proof, const PolySystem& axioms,
                                                 const std::vector<VarId>& order,
                                                 const Config& cfg = Config{}) {
    if (proof.lines.empty()) throw std::invalid_argument("empty PC proof");
    if (!proof.tree_like())
        throw std::invalid_argument("simulate_treelike_pc: proof is not tree-like");
    const Field& f = axioms.field;
    const VarTablePtr& t = axioms.table;

    std::vector<std::vector<Roabp>> line_coeffs;
    for (std::size_t i = 0; i < proof.lines.size(); ++i) {
        const auto& ln = proof.lines[i];
        std::vector<Roabp> cs;
        if (auto* ax = std::get_if<PcAxiomRule>(&ln.rule)) {
            if (ax->axiom >= axioms.entries.size())
                throw std::invalid_argument("PC axiom index out of range");
            if (ln.poly != axioms.entries[ax->axiom].poly)
                throw std::invalid_argument("PC axiom line differs from the axiom");
            cs = zero_coefficients(axioms, order);
            cs[ax->axiom] = Roabp::constant_program(f, t, f.one(), order);
        } else if (auto* mul = std::get_if<PcMulRule>(&ln.rule)) {
            if (mul->src >= i) throw std::invalid_argument("PC rule references a later line");
            if (ln.poly != proof.lines[mul->src].poly * SparsePoly::variable(f, t, mul->var))
                throw std::invalid_argument("PC multiplication line does not match its premise");
            Roabp x = Roabp::from_sparse(SparsePoly::variable(f, t, mul->var), order);
            for (const auto& c : line_coeffs[mul->src])
                cs.push_back(c.is_structural_zero() ? c : roabp_mul(c, x));
        } else {
            auto* lin = std::get_if<PcLinRule>(&ln.rule);
            if (lin->src1 >= i || lin->src2 >= i)
                throw std::invalid_argument("PC rule references a later line");
            SparsePoly expect = proof.lines[lin->src1].poly.scale(lin->a) +
                                proof.lines[lin->src2].poly.scale(lin->b);
            if (ln.poly != expect)
                throw std::invalid_argument("PC linear-combination line does not match");
            for (std::size_t j = 0; j < axioms.entries.size(); ++j) {
                const Roabp& c1 = line_coeffs[lin->src1][j];
                const Roabp& c2 = line_coeffs[lin->src2][j];
                bool z1 = c1.is_structural_zero(), z2 = c2.is_structural_zero();
                if (z1 && z2) cs.push_back(c1);
                else if (z1) cs.push_back(c2.scaled(lin->b));
                else if (z2) cs.push_back(c1.scaled(lin->a));
                else cs.push_back(roabp_add(c1.scaled(lin->a), c2.scaled(lin->b)));
            }
        }
        line_coeffs.push_back(std::move(cs));
    }
    (void)cfg;
    return LinearIpsCertificate(axioms, order, line_coeffs.back(), proof.lines.back().poly);
}

} // namespace ipstk
