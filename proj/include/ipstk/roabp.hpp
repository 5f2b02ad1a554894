#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "ipstk/common.hpp"
#include "ipstk/poly.hpp"

namespace ipstk {

/// Row-major matrix of polynomials (the entries of one roABP layer).
struct PolyMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<SparsePoly> entries;

    PolyMatrix() = default;
    PolyMatrix(std::size_t r, std::size_t c, const SparsePoly& fill)
        : rows(r), cols(c), entries(r * c, fill) {}

    SparsePoly& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
    const SparsePoly& at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

/// Writing the program's polynomial as sum_i prefix[i] * suffix[i] across a
/// layer boundary; entries beyond the boundary dimension are zero-padded up to
/// the program width.
struct CutDecomposition {
    std::size_t cut_index = 0; // boundary after this many leading variables
    std::vector<SparsePoly> prefix;
    std::vector<SparsePoly> suffix;
};

/// Read-once oblivious algebraic branching program: one matrix per variable of
/// a fixed read order, entries univariate in that layer's variable, outer
/// dimensions 1 so the full product is scalar. Width is the maximal matrix
/// dimension. A program over the empty order is a bare constant.
class Roabp {
public:
    Roabp(Field field, VarTablePtr table, std::vector<VarId> order,
          std::vector<PolyMatrix> layers)
        : field_(field),
          table_(std::move(table)),
          order_(std::move(order)),
          layers_(std::move(layers)),
          constant_(field.zero()) {
        validate();
    }

    /// Constant program over the empty order.
    Roabp(Field field, VarTablePtr table, Fe constant)
        : field_(field), table_(std::move(table)), constant_(std::move(constant)) {}

    static Roabp constant_program(const Field& f, const VarTablePtr& t, const Fe& c,
                                  const std::vector<VarId>& order) {
        return from_sparse(SparsePoly::constant(f, t, c), order);
    }

    static Roabp zero_program(const Field& f, const VarTablePtr& t,
                              const std::vector<VarId>& order) {
        return from_sparse(SparsePoly::zero(f, t), order);
    }

    /// One path per monomial; width is at most the sparsity of the input.
    static Roabp from_sparse(const SparsePoly& p, const std::vector<VarId>& order) {
        const Field& f = p.field();
        const VarTablePtr& t = p.table();
        {
            std::set<VarId> allowed(order.begin(), order.end());
            if (allowed.size() != order.size())
                throw std::invalid_argument("roABP order contains a repeated variable");
            for (VarId v : p.vars())
                if (!allowed.count(v))
                    throw std::invalid_argument("polynomial variable outside roABP order: " +
                                                t->name(v));
        }
        std::size_t n = order.size();
        if (n == 0) return Roabp(f, t, p.constant_value());
        if (n == 1) {
            PolyMatrix m(1, 1, p);
            return Roabp(f, t, order, {m});
        }
        // Univariate (or constant) polynomials fit in a width-1 chain.
        if (p.vars().size() <= 1) {
            VarId pv = p.vars().empty() ? order[0] : *p.vars().begin();
            std::vector<PolyMatrix> chain;
            for (std::size_t i = 0; i < n; ++i) {
                bool carry = order[i] == pv;
                chain.emplace_back(1, 1, carry ? p : SparsePoly::constant(f, t, f.one()));
            }
            return Roabp(f, t, order, std::move(chain));
        }
        std::size_t s = std::max<std::size_t>(1, p.sparsity());
        std::vector<Monomial> monos;
        std::vector<Fe> coeffs;
        for (const auto& [m, c] : p.terms()) {
            monos.push_back(m);
            coeffs.push_back(c);
        }
        auto power = [&](std::size_t j, VarId v) {
            if (j >= monos.size()) return SparsePoly::zero(f, t);
            std::uint32_t e = monos[j].exponent(v);
            return SparsePoly::monomial(f, t, Monomial::var(v, e), f.one());
        };
        std::vector<PolyMatrix> layers;
        PolyMatrix first(1, s, SparsePoly::zero(f, t));
        for (std::size_t j = 0; j < s; ++j) {
            SparsePoly e = power(j, order[0]);
            first.at(0, j) = j < coeffs.size() ? e.scale(coeffs[j]) : e;
        }
        layers.push_back(std::move(first));
        for (std::size_t i = 1; i + 1 < n; ++i) {
            PolyMatrix mid(s, s, SparsePoly::zero(f, t));
            for (std::size_t j = 0; j < s; ++j) mid.at(j, j) = power(j, order[i]);
            layers.push_back(std::move(mid));
        }
        PolyMatrix last(s, 1, SparsePoly::zero(f, t));
        for (std::size_t j = 0; j < s; ++j) last.at(j, 0) = power(j, order[n - 1]);
        layers.push_back(std::move(last));
        return Roabp(f, t, order, std::move(layers));
    }

    const Field& field() const { return field_; }
    const VarTablePtr& table() const { return table_; }
    const std::vector<VarId>& order() const { return order_; }
    const std::vector<PolyMatrix>& layers() const { return layers_; }
    bool is_constant_program() const { return order_.empty(); }
    const Fe& constant_value() const { return constant_; }

    std::size_t width() const {
        if (order_.empty()) return 1;
        std::size_t w = 0;
        for (const auto& m : layers_) w = std::max({w, m.rows, m.cols});
        return w;
    }

    /// True only for programs that are syntactically zero (some all-zero
    /// layer); cheap, used to skip dead summands in compositions.
    bool is_structural_zero() const {
        if (order_.empty()) return field_.is_zero(constant_);
        for (const auto& m : layers_) {
            bool all_zero = true;
            for (const auto& e : m.entries)
                if (!e.is_zero()) {
                    all_zero = false;
                    break;
                }
            if (all_zero) return true;
        }
        return false;
    }

    /// Upper bound on the total degree of the computed polynomial.
    std::uint64_t degree_bound() const {
        std::uint64_t d = 0;
        for (const auto& m : layers_) {
            std::uint64_t layer = 0;
            for (const auto& e : m.entries) layer = std::max(layer, e.degree());
            d += layer;
        }
        return d;
    }

    /// Exact polynomial computed by the matrix product. Throws BudgetExceeded
    /// when the running term count passes `term_budget`.
    SparsePoly expand(std::size_t term_budget = 2'000'000) const {
        if (order_.empty()) return SparsePoly::constant(field_, table_, constant_);
        std::vector<SparsePoly> row(layers_[0].entries); // first layer is 1 x c
        for (std::size_t i = 1; i < layers_.size(); ++i) {
            const PolyMatrix& m = layers_[i];
            std::vector<SparsePoly> next(m.cols, SparsePoly::zero(field_, table_));
            for (std::size_t c = 0; c < m.cols; ++c)
                for (std::size_t r = 0; r < m.rows; ++r) {
                    if (row[r].is_zero() || m.at(r, c).is_zero()) continue;
                    next[c] += row[r] * m.at(r, c);
                }
            std::size_t total = 0;
            for (const auto& p : next) total += p.sparsity();
            if (total > term_budget)
                throw BudgetExceeded("expansion too large: roABP term budget exceeded");
            row = std::move(next);
        }
        return row[0];
    }

    /// Scalar evaluation via the matrix chain; every order variable must be
    /// assigned. Linear in the program size, no expansion.
    Fe eval(const std::map<VarId, Fe>& point) const {
        if (order_.empty()) return constant_;
        std::vector<Fe> row;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const PolyMatrix& m = layers_[i];
            std::vector<Fe> next(m.cols, field_.zero());
            for (std::size_t c = 0; c < m.cols; ++c)
                for (std::size_t r = 0; r < m.rows; ++r) {
                    Fe e = m.at(r, c).eval(point);
                    Fe factor = i == 0 ? e : field_.mul(row[r], e);
                    next[c] = field_.add(next[c], factor);
                }
            row = std::move(next);
        }
        return row[0];
    }

    /// Scales the computed polynomial by a constant (folded into the first
    /// layer); dimensions unchanged.
    Roabp scaled(const Fe& c) const {
        if (order_.empty()) return Roabp(field_, table_, field_.mul(constant_, c));
        Roabp r = *this;
        for (auto& e : r.layers_[0].entries) e = e.scale(c);
        return r;
    }

    void check_same_order(const Roabp& o) const {
        require_same_field(field_, o.field_);
        require_same_table(table_, o.table_);
        if (order_ != o.order_)
            throw std::invalid_argument("roABP variable order mismatch");
    }

    /// Restriction: substitute field constants for some variables and rename
    /// the survivors. Substituted layers are folded into a neighbour, so the
    /// width never increases; expansion commutes with the restriction.
    Roabp restricted(const std::map<VarId, Fe>& sigma,
                     const std::map<VarId, VarId>& rho = {}) const {
        if (order_.empty()) return *this;
        // Renaming must be injective on survivors and must leave the new
        // order read-once.
        std::vector<VarId> new_order;
        std::set<VarId> seen;
        for (VarId v : order_) {
            if (sigma.count(v)) continue;
            auto it = rho.find(v);
            VarId nv = it == rho.end() ? v : it->second;
            if (!seen.insert(nv).second)
                throw std::invalid_argument("restriction renaming is not read-once");
            new_order.push_back(nv);
        }
        // pending: constant matrix waiting to be folded into the next
        // surviving layer (or the previous one at the right edge).
        std::optional<PolyMatrix> pending;
        std::vector<PolyMatrix> out;
        auto fold_left = [&](const PolyMatrix& a, const PolyMatrix& b) {
            PolyMatrix r(a.rows, b.cols, SparsePoly::zero(field_, table_));
            for (std::size_t i = 0; i < a.rows; ++i)
                for (std::size_t j = 0; j < b.cols; ++j)
                    for (std::size_t k = 0; k < a.cols; ++k) {
                        if (a.at(i, k).is_zero() || b.at(k, j).is_zero()) continue;
                        r.at(i, j) += a.at(i, k) * b.at(k, j);
                    }
            return r;
        };
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            VarId v = order_[i];
            auto sit = sigma.find(v);
            if (sit != sigma.end()) {
                PolyMatrix cm(layers_[i].rows, layers_[i].cols, SparsePoly::zero(field_, table_));
                std::map<VarId, Fe> point{{v, sit->second}};
                for (std::size_t k = 0; k < cm.entries.size(); ++k)
                    cm.entries[k] = layers_[i].entries[k].substitute_values(point);
                pending = pending ? fold_left(*pending, cm) : std::move(cm);
                continue;
            }
            PolyMatrix layer = layers_[i];
            auto rit = rho.find(v);
            if (rit != rho.end()) {
                std::map<VarId, VarId> ren{{v, rit->second}};
                for (auto& e : layer.entries) e = e.rename(ren);
            }
            if (pending) {
                layer = fold_left(*pending, layer);
                pending.reset();
            }
            out.push_back(std::move(layer));
        }
        if (out.empty()) {
            // Total substitution: the pending 1 x 1 matrix is the value.
            return Roabp(field_, table_, pending->at(0, 0).constant_value());
        }
        if (pending) out.back() = fold_left(out.back(), *pending);
        return Roabp(field_, table_, std::move(new_order), std::move(out));
    }

    struct AffineImage {
        VarId new_var;
        Fe offset; // variable maps to offset + scale * new_var
        Fe scale;
    };

    /// Per-variable affine change of basis, e.g. y -> 1 - 2x. Every layer
    /// keeps its dimensions, so the width is exactly preserved.
    Roabp change_basis(const std::map<VarId, AffineImage>& images) const {
        if (order_.empty()) return *this;
        std::vector<VarId> new_order = order_;
        std::vector<PolyMatrix> out = layers_;
        std::set<VarId> seen;
        for (std::size_t i = 0; i < new_order.size(); ++i) {
            VarId v = new_order[i];
            auto it = images.find(v);
            if (it != images.end()) {
                const AffineImage& im = it->second;
                SparsePoly image = SparsePoly::constant(field_, table_, im.offset) +
                                   SparsePoly::variable(field_, table_, im.new_var).scale(im.scale);
                std::map<VarId, SparsePoly> sub{{v, image}};
                for (auto& e : out[i].entries) e = e.substitute(sub);
                new_order[i] = im.new_var;
            }
            if (!seen.insert(new_order[i]).second)
                throw std::invalid_argument("basis change breaks the read-once order");
        }
        return Roabp(field_, table_, std::move(new_order), std::move(out));
    }

    /// Re-bases the program onto a super-order: the old order must appear as a
    /// subsequence, inserted positions get identity layers. Width unchanged.
    Roabp with_order(const std::vector<VarId>& super) const {
        if (order_.empty()) {
            if (super.empty()) return *this;
            return constant_program(field_, table_, constant_, super);
        }
        std::vector<PolyMatrix> out;
        std::size_t next = 0; // index into the old order
        for (VarId v : super) {
            std::size_t dim = next < layers_.size() ? layers_[next].rows : 1;
            if (next < order_.size() && order_[next] == v) {
                out.push_back(layers_[next]);
                ++next;
            } else {
                PolyMatrix id(dim, dim, SparsePoly::zero(field_, table_));
                for (std::size_t k = 0; k < dim; ++k)
                    id.at(k, k) = SparsePoly::constant(field_, table_, field_.one());
                out.push_back(std::move(id));
            }
        }
        if (next != order_.size())
            throw std::invalid_argument("old order is not a subsequence of the new order");
        return Roabp(field_, table_, super, std::move(out));
    }

    /// Cut after position t (1-based, 1 <= t < n): w prefix polynomials over
    /// the first t variables and w suffix polynomials over the rest, padded
    /// with zeros to the program width.
    CutDecomposition cut(std::size_t t, std::size_t term_budget = 2'000'000) const {
        std::size_t n = order_.size();
        if (t < 1 || t >= n) throw std::out_of_range("cut position out of range");
        CutDecomposition d;
        d.cut_index = t;
        std::vector<SparsePoly> row(layers_[0].entries);
        auto advance = [&](std::vector<SparsePoly>& vec, const PolyMatrix& m) {
            std::vector<SparsePoly> next(m.cols, SparsePoly::zero(field_, table_));
            for (std::size_t c = 0; c < m.cols; ++c)
                for (std::size_t r = 0; r < m.rows; ++r) {
                    if (vec[r].is_zero() || m.at(r, c).is_zero()) continue;
                    next[c] += vec[r] * m.at(r, c);
                }
            std::size_t total = 0;
            for (const auto& p : next) total += p.sparsity();
            if (total > term_budget)
                throw BudgetExceeded("expansion too large: cut term budget exceeded");
            vec = std::move(next);
        };
        for (std::size_t i = 1; i < t; ++i) advance(row, layers_[i]);
        // Suffix: multiply the remaining layers from the right.
        std::vector<SparsePoly> col(layers_[n - 1].entries); // last layer is r x 1
        for (std::size_t i = n - 1; i > t; --i) {
            const PolyMatrix& m = layers_[i - 1];
            std::vector<SparsePoly> next(m.rows, SparsePoly::zero(field_, table_));
            for (std::size_t r = 0; r < m.rows; ++r)
                for (std::size_t c = 0; c < m.cols; ++c) {
                    if (m.at(r, c).is_zero() || col[c].is_zero()) continue;
                    next[r] += m.at(r, c) * col[c];
                }
            std::size_t total = 0;
            for (const auto& p : next) total += p.sparsity();
            if (total > term_budget)
                throw BudgetExceeded("expansion too large: cut term budget exceeded");
            col = std::move(next);
        }
        std::size_t w = width();
        d.prefix = std::move(row);
        d.suffix = std::move(col);
        d.prefix.resize(w, SparsePoly::zero(field_, table_));
        d.suffix.resize(w, SparsePoly::zero(field_, table_));
        return d;
    }

private:
    void validate() const {
        if (layers_.size() != order_.size())
            throw std::invalid_argument("roABP needs one layer per order position");
        if (order_.empty()) return;
        std::set<VarId> seen;
        for (VarId v : order_)
            if (!seen.insert(v).second)
                throw std::invalid_argument("roABP order contains a repeated variable");
        if (layers_.front().rows != 1) throw std::invalid_argument("first layer must have 1 row");
        if (layers_.back().cols != 1)
            throw std::invalid_argument("last layer must have 1 column");
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const PolyMatrix& m = layers_[i];
            if (m.entries.size() != m.rows * m.cols || m.rows == 0 || m.cols == 0)
                throw std::invalid_argument("malformed roABP layer");
            if (i + 1 < layers_.size() && m.cols != layers_[i + 1].rows)
                throw std::invalid_argument("roABP layer dimensions do not chain");
            for (const auto& e : m.entries) {
                require_same_field(field_, e.field());
                require_same_table(table_, e.table());
                for (VarId v : e.vars())
                    if (v != order_[i])
                        throw std::invalid_argument(
                            "layer entry mentions a variable other than its own: " +
                            table_->name(v));
            }
        }
    }

    Field field_;
    VarTablePtr table_;
    std::vector<VarId> order_;
    std::vector<PolyMatrix> layers_;
    Fe constant_;
};

/// Direct sum: expansion adds, width is at most the sum of widths.
inline Roabp roabp_add(const Roabp& a, const Roabp& b) {
    a.check_same_order(b);
    const Field& f = a.field();
    if (a.is_constant_program())
        return Roabp(f, a.table(), f.add(a.constant_value(), b.constant_value()));
    std::size_t n = a.order().size();
    if (n == 1) {
        PolyMatrix m(1, 1, a.layers()[0].at(0, 0) + b.layers()[0].at(0, 0));
        return Roabp(f, a.table(), a.order(), {m});
    }
    std::vector<PolyMatrix> layers;
    for (std::size_t i = 0; i < n; ++i) {
        const PolyMatrix& A = a.layers()[i];
        const PolyMatrix& B = b.layers()[i];
        std::size_t rows = i == 0 ? 1 : A.rows + B.rows;
        std::size_t cols = i + 1 == n ? 1 : A.cols + B.cols;
        PolyMatrix m(rows, cols, SparsePoly::zero(f, a.table()));
        for (std::size_t r = 0; r < A.rows; ++r)
            for (std::size_t c = 0; c < A.cols; ++c) m.at(r, c) = A.at(r, c);
        std::size_t ro = i == 0 ? 0 : A.rows;
        std::size_t co = i + 1 == n ? 0 : A.cols;
        for (std::size_t r = 0; r < B.rows; ++r)
            for (std::size_t c = 0; c < B.cols; ++c) {
                m.at(ro + r, co + c) += B.at(r, c);
            }
        layers.push_back(std::move(m));
    }
    return Roabp(f, a.table(), a.order(), std::move(layers));
}

/// Layerwise tensor product: expansion multiplies, width is at most the
/// product of widths.
inline Roabp roabp_mul(const Roabp& a, const Roabp& b) {
    a.check_same_order(b);
    const Field& f = a.field();
    if (a.is_constant_program())
        return Roabp(f, a.table(), f.mul(a.constant_value(), b.constant_value()));
    std::size_t n = a.order().size();
    std::vector<PolyMatrix> layers;
    for (std::size_t i = 0; i < n; ++i) {
        const PolyMatrix& A = a.layers()[i];
        const PolyMatrix& B = b.layers()[i];
        PolyMatrix m(A.rows * B.rows, A.cols * B.cols, SparsePoly::zero(f, a.table()));
        for (std::size_t ra = 0; ra < A.rows; ++ra)
            for (std::size_t ca = 0; ca < A.cols; ++ca) {
                if (A.at(ra, ca).is_zero()) continue;
                for (std::size_t rb = 0; rb < B.rows; ++rb)
                    for (std::size_t cb = 0; cb < B.cols; ++cb) {
                        if (B.at(rb, cb).is_zero()) continue;
                        m.at(ra * B.rows + rb, ca * B.cols + cb) = A.at(ra, ca) * B.at(rb, cb);
                    }
            }
        layers.push_back(std::move(m));
    }
    return Roabp(f, a.table(), a.order(), std::move(layers));
}

enum class IdentityTestMode { Expand, Randomized };

/// Equality of the computed polynomials. Expand mode is exact at desk scale.
/// Randomized mode evaluates both programs at uniform points; by the
/// DeMillo-Lipton-Schwartz-Zippel bound each trial accepts a wrong pair with
/// probability at most total-degree / |sample space|.
inline bool roabp_identity_test(const Roabp& a, const Roabp& b, IdentityTestMode mode,
                                std::mt19937_64& rng, int trials = 8,
                                std::size_t term_budget = 2'000'000) {
    a.check_same_order(b);
    if (mode == IdentityTestMode::Expand) return a.expand(term_budget) == b.expand(term_budget);
    const Field& f = a.field();
    for (int t = 0; t < trials; ++t) {
        std::map<VarId, Fe> point;
        for (VarId v : a.order()) point[v] = f.sample(rng);
        if (a.eval(point) != b.eval(point)) return false;
    }
    return true;
}

} // namespace ipstk
