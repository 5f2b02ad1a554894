#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>

#include "ipstk/common.hpp"

namespace ipstk {

/// Power product of variables. Zero exponents are never stored, so equal
/// monomials have identical representations.
class Monomial {
public:
    Monomial() = default;

    static Monomial var(VarId v, std::uint32_t e = 1) {
        Monomial m;
        if (e > 0) m.exps_[v] = e;
        return m;
    }

    bool is_unit() const { return exps_.empty(); }

    std::uint64_t degree() const {
        std::uint64_t d = 0;
        for (const auto& [v, e] : exps_) d += e;
        return d;
    }

    std::uint32_t exponent(VarId v) const {
        auto it = exps_.find(v);
        return it == exps_.end() ? 0 : it->second;
    }

    Monomial times(const Monomial& o) const {
        Monomial r = *this;
        for (const auto& [v, e] : o.exps_) {
            auto [it, fresh] = r.exps_.try_emplace(v, e);
            if (!fresh) it->second += e;
        }
        return r;
    }

    /// Quotient by a single variable power; requires divisibility.
    Monomial divide_var(VarId v, std::uint32_t e) const {
        auto it = exps_.find(v);
        if (it == exps_.end() || it->second < e)
            throw std::invalid_argument("monomial not divisible");
        Monomial r = *this;
        if (it->second == e) r.exps_.erase(v);
        else r.exps_[v] = it->second - e;
        return r;
    }

    const std::map<VarId, std::uint32_t>& exponents() const { return exps_; }

    bool operator==(const Monomial& o) const { return exps_ == o.exps_; }
    bool operator!=(const Monomial& o) const { return !(*this == o); }

    /// Graded-lexicographic three-way comparison over the registered variable
    /// order (ascending ids); on the first differing variable the one with a
    /// positive exponent on the earlier id is larger. Returns <0, 0, >0.
    static int grlex_cmp(const Monomial& a, const Monomial& b) {
        std::uint64_t da = a.degree(), db = b.degree();
        if (da != db) return da < db ? -1 : 1;
        auto ia = a.exps_.begin(), ib = b.exps_.begin();
        while (ia != a.exps_.end() && ib != b.exps_.end()) {
            if (ia->first != ib->first) return ia->first < ib->first ? 1 : -1;
            if (ia->second != ib->second) return ia->second > ib->second ? 1 : -1;
            ++ia;
            ++ib;
        }
        return 0; // equal degree with identical prefix forces both exhausted
    }

private:
    std::map<VarId, std::uint32_t> exps_;
};

/// Term order for polynomial storage: descending graded-lex, so iteration
/// starts at the leading term.
struct TermOrder {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return Monomial::grlex_cmp(a, b) > 0;
    }
};

} // namespace ipstk
