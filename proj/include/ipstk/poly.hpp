#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ipstk/field.hpp"
#include "ipstk/monomial.hpp"
#include "ipstk/vartable.hpp"

namespace ipstk {

/// Exact sparse multivariate polynomial over a shared field and variable
/// table. Canonical: no zero coefficients are stored and terms sit in a fixed
/// graded-lex order, so equal polynomials have identical term maps.
class SparsePoly {
public:
    using TermMap = std::map<Monomial, Fe, TermOrder>;

    SparsePoly(Field field, VarTablePtr table)
        : field_(field), table_(std::move(table)) {}

    static SparsePoly zero(const Field& f, const VarTablePtr& t) { return SparsePoly(f, t); }

    static SparsePoly constant(const Field& f, const VarTablePtr& t, const Fe& c) {
        SparsePoly p(f, t);
        p.add_term(Monomial(), c);
        return p;
    }

    static SparsePoly constant(const Field& f, const VarTablePtr& t, long long c) {
        return constant(f, t, f.from_int(c));
    }

    static SparsePoly variable(const Field& f, const VarTablePtr& t, VarId v) {
        SparsePoly p(f, t);
        p.add_term(Monomial::var(v), f.one());
        return p;
    }

    static SparsePoly monomial(const Field& f, const VarTablePtr& t, const Monomial& m,
                               const Fe& c) {
        SparsePoly p(f, t);
        p.add_term(m, c);
        return p;
    }

    const Field& field() const { return field_; }
    const VarTablePtr& table() const { return table_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
    }

    Fe constant_value() const {
        if (terms_.empty()) return field_.zero();
        if (!is_constant()) throw std::domain_error("polynomial is not constant");
        return terms_.begin()->second;
    }

    std::size_t sparsity() const { return terms_.size(); }

    std::uint64_t degree() const {
        std::uint64_t d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
        return d;
    }

    std::uint32_t degree_in(VarId v) const {
        std::uint32_t d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(v));
        return d;
    }

    std::set<VarId> vars() const {
        std::set<VarId> vs;
        for (const auto& [m, c] : terms_)
            for (const auto& [v, e] : m.exponents()) vs.insert(v);
        return vs;
    }

    Fe coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? field_.zero() : it->second;
    }

    void add_term(const Monomial& m, const Fe& c) {
        if (field_.is_zero(c)) return;
        auto [it, fresh] = terms_.try_emplace(m, c);
        if (!fresh) {
            it->second = field_.add(it->second, c);
            if (field_.is_zero(it->second)) terms_.erase(it);
        }
    }

    SparsePoly operator+(const SparsePoly& o) const {
        check_compatible(o);
        SparsePoly r = *this;
        for (const auto& [m, c] : o.terms_) r.add_term(m, c);
        return r;
    }

    SparsePoly operator-(const SparsePoly& o) const {
        check_compatible(o);
        SparsePoly r = *this;
        for (const auto& [m, c] : o.terms_) r.add_term(m, field_.neg(c));
        return r;
    }

    SparsePoly operator-() const {
        SparsePoly r(field_, table_);
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, field_.neg(c));
        return r;
    }

    SparsePoly operator*(const SparsePoly& o) const {
        check_compatible(o);
        SparsePoly r(field_, table_);
        for (const auto& [ma, ca] : terms_)
            for (const auto& [mb, cb] : o.terms_)
                r.add_term(ma.times(mb), field_.mul(ca, cb));
        return r;
    }

    SparsePoly scale(const Fe& c) const {
        SparsePoly r(field_, table_);
        if (field_.is_zero(c)) return r;
        for (const auto& [m, k] : terms_) r.terms_.emplace(m, field_.mul(k, c));
        return r;
    }

    SparsePoly pow(std::uint32_t e) const {
        SparsePoly acc = constant(field_, table_, field_.one());
        SparsePoly base = *this;
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    bool operator==(const SparsePoly& o) const {
        return field_ == o.field_ && table_.get() == o.table_.get() && terms_ == o.terms_;
    }
    bool operator!=(const SparsePoly& o) const { return !(*this == o); }

    /// Simultaneous substitution of polynomials for variables; unassigned
    /// variables survive.
    SparsePoly substitute(const std::map<VarId, SparsePoly>& sigma) const {
        for (const auto& [v, q] : sigma) check_compatible(q);
        SparsePoly r(field_, table_);
        for (const auto& [m, c] : terms_) {
            SparsePoly term = constant(field_, table_, c);
            Monomial kept;
            for (const auto& [v, e] : m.exponents()) {
                auto it = sigma.find(v);
                if (it == sigma.end()) {
                    kept = kept.times(Monomial::var(v, e));
                } else {
                    term = term * it->second.pow(e);
                }
            }
            if (!kept.is_unit()) term = term * monomial(field_, table_, kept, field_.one());
            r += term;
        }
        return r;
    }

    SparsePoly substitute_values(const std::map<VarId, Fe>& sigma) const {
        SparsePoly r(field_, table_);
        for (const auto& [m, c] : terms_) {
            Fe coeff = c;
            Monomial kept;
            for (const auto& [v, e] : m.exponents()) {
                auto it = sigma.find(v);
                if (it == sigma.end()) kept = kept.times(Monomial::var(v, e));
                else coeff = field_.mul(coeff, field_.pow(it->second, e));
            }
            r.add_term(kept, coeff);
        }
        return r;
    }

    /// Total evaluation; every variable occurring in the polynomial must be
    /// assigned.
    Fe eval(const std::map<VarId, Fe>& point) const {
        Fe acc = field_.zero();
        for (const auto& [m, c] : terms_) {
            Fe t = c;
            for (const auto& [v, e] : m.exponents()) {
                auto it = point.find(v);
                if (it == point.end())
                    throw std::invalid_argument("eval: unassigned variable " + table_->name(v));
                t = field_.mul(t, field_.pow(it->second, e));
            }
            acc = field_.add(acc, t);
        }
        return acc;
    }

    /// Variable renaming (substitution by variables).
    SparsePoly rename(const std::map<VarId, VarId>& rho) const {
        SparsePoly r(field_, table_);
        for (const auto& [m, c] : terms_) {
            Monomial nm;
            for (const auto& [v, e] : m.exponents()) {
                auto it = rho.find(v);
                nm = nm.times(Monomial::var(it == rho.end() ? v : it->second, e));
            }
            r.add_term(nm, c);
        }
        return r;
    }

    SparsePoly& operator+=(const SparsePoly& o) { return *this = *this + o; }
    SparsePoly& operator-=(const SparsePoly& o) { return *this = *this - o; }
    SparsePoly& operator*=(const SparsePoly& o) { return *this = *this * o; }

    /// Text form `c1*m1 + c2*m2 + ...` with monomials like `x3^2*z1`; terms in
    /// descending graded-lex order. Negative rational coefficients print with
    /// a ` - ` separator. Printer and parser round-trip bit-exactly.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            std::string cs = c.str();
            bool neg = !cs.empty() && cs[0] == '-';
            if (neg) cs = cs.substr(1);
            if (first) os << (neg ? "-" : "");
            else os << (neg ? " - " : " + ");
            first = false;
            os << cs;
            for (const auto& [v, e] : m.exponents()) {
                os << '*' << table_->name(v);
                if (e != 1) os << '^' << e;
            }
        }
        return os.str();
    }

    /// Parses the printed grammar, plus the conveniences of an optional
    /// leading coefficient (`x1` means `1*x1`) and `-` as a term separator.
    /// Unknown variable names are registered in the table.
    static SparsePoly parse(const std::string& text, const Field& f, const VarTablePtr& t) {
        SparsePoly r(f, t);
        std::size_t i = 0;
        auto skip_ws = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
        skip_ws();
        if (i == text.size()) throw std::invalid_argument("empty polynomial text");
        bool any = false;
        while (true) {
            skip_ws();
            if (i == text.size()) break;
            bool negate = false;
            if (text[i] == '+' || text[i] == '-') {
                if (!any && text[i] == '+')
                    throw std::invalid_argument("polynomial text starts with '+'");
                negate = text[i] == '-';
                ++i;
                skip_ws();
            } else if (any) {
                throw std::invalid_argument("expected '+' or '-' between terms");
            }
            // One term: [coefficient] ('*' factor)* or factors only.
            Fe coeff = f.one();
            Monomial mono;
            bool saw_factor = false, saw_coeff = false;
            while (true) {
                skip_ws();
                if (i >= text.size()) break;
                char ch = text[i];
                if (std::isdigit(static_cast<unsigned char>(ch))) {
                    if (saw_coeff || saw_factor)
                        throw std::invalid_argument("unexpected numeric literal in term");
                    std::size_t j = i;
                    while (j < text.size() &&
                           (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '/'))
                        ++j;
                    coeff = f.parse(text.substr(i, j - i));
                    i = j;
                    saw_coeff = true;
                } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                    std::size_t j = i;
                    while (j < text.size() &&
                           (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                        ++j;
                    std::string name = text.substr(i, j - i);
                    i = j;
                    std::uint32_t e = 1;
                    if (i < text.size() && text[i] == '^') {
                        ++i;
                        std::size_t k = i;
                        while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
                        if (k == i) throw std::invalid_argument("missing exponent after '^'");
                        e = static_cast<std::uint32_t>(std::stoul(text.substr(i, k - i)));
                        i = k;
                    }
                    mono = mono.times(Monomial::var(t->intern(name), e));
                    saw_factor = true;
                } else {
                    throw std::invalid_argument(std::string("unexpected character '") + ch +
                                                "' in polynomial text");
                }
                skip_ws();
                if (i < text.size() && text[i] == '*') {
                    ++i;
                    continue;
                }
                break;
            }
            if (!saw_coeff && !saw_factor)
                throw std::invalid_argument("empty term in polynomial text");
            if (negate) coeff = f.neg(coeff);
            r.add_term(mono, coeff);
            any = true;
        }
        if (!any) throw std::invalid_argument("empty polynomial text");
        return r;
    }

private:
    void check_compatible(const SparsePoly& o) const {
        require_same_field(field_, o.field_);
        require_same_table(table_, o.table_);
    }

    Field field_;
    VarTablePtr table_;
    TermMap terms_;
};

} // namespace ipstk
