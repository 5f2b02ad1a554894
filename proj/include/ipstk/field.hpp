#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>

#include <gmpxx.h>

namespace ipstk {

/// Exact field element. In prime mode this is a canonical residue in [0, p);
/// in rational mode an exact GMP rational (canonicalized, denominator > 0).
class Fe {
public:
    Fe() : v_(std::uint64_t{0}) {}
    explicit Fe(std::uint64_t residue) : v_(residue) {}
    explicit Fe(mpq_class q) : v_(std::move(q)) {}

    bool is_residue() const { return std::holds_alternative<std::uint64_t>(v_); }
    std::uint64_t residue() const { return std::get<std::uint64_t>(v_); }
    const mpq_class& rational() const { return std::get<mpq_class>(v_); }

    bool operator==(const Fe& o) const { return v_ == o.v_; }
    bool operator!=(const Fe& o) const { return !(*this == o); }

    std::string str() const {
        if (is_residue()) return std::to_string(residue());
        return rational().get_str();
    }

private:
    std::variant<std::uint64_t, mpq_class> v_;
};

/// Field descriptor plus arithmetic. Cheap to copy; two fields are compatible
/// iff they compare equal. The default is the Mersenne prime 2^31 - 1;
/// rational mode gives exact characteristic-0 arithmetic.
class Field {
public:
    static Field prime(std::uint64_t p) {
        if (p < 2) throw std::invalid_argument("field modulus must be >= 2");
        return Field(p);
    }
    static Field rationals() { return Field(0); }

    Field() : p_((std::uint64_t{1} << 31) - 1) {}

    bool is_rational() const { return p_ == 0; }
    std::uint64_t characteristic() const { return p_; }
    std::uint64_t modulus() const { return p_; }

    bool operator==(const Field& o) const { return p_ == o.p_; }
    bool operator!=(const Field& o) const { return p_ != o.p_; }

    Fe zero() const { return is_rational() ? Fe(mpq_class(0)) : Fe(std::uint64_t{0}); }
    Fe one() const { return is_rational() ? Fe(mpq_class(1)) : Fe(std::uint64_t{1} % p_); }

    Fe from_int(long long x) const {
        if (is_rational()) return Fe(mpq_class(static_cast<long>(x)));
        long long r = x % static_cast<long long>(p_);
        if (r < 0) r += static_cast<long long>(p_);
        return Fe(static_cast<std::uint64_t>(r));
    }

    bool is_zero(const Fe& a) const {
        return is_rational() ? a.rational() == 0 : a.residue() == 0;
    }

    Fe add(const Fe& a, const Fe& b) const {
        if (is_rational()) return Fe(mpq_class(a.rational() + b.rational()));
        std::uint64_t x = a.residue(), y = b.residue();
        std::uint64_t s = x + y; // p < 2^63, no overflow
        if (s >= p_) s -= p_;
        return Fe(s);
    }

    Fe sub(const Fe& a, const Fe& b) const {
        if (is_rational()) return Fe(mpq_class(a.rational() - b.rational()));
        std::uint64_t x = a.residue(), y = b.residue();
        return Fe(x >= y ? x - y : x + (p_ - y));
    }

    Fe neg(const Fe& a) const {
        if (is_rational()) return Fe(mpq_class(-a.rational()));
        return Fe(a.residue() == 0 ? 0 : p_ - a.residue());
    }

    Fe mul(const Fe& a, const Fe& b) const {
        if (is_rational()) return Fe(mpq_class(a.rational() * b.rational()));
        unsigned __int128 t = static_cast<unsigned __int128>(a.residue()) * b.residue();
        return Fe(static_cast<std::uint64_t>(t % p_));
    }

    Fe inv(const Fe& a) const {
        if (is_zero(a)) throw std::domain_error("inverse of zero field element");
        if (is_rational()) return Fe(mpq_class(1 / a.rational()));
        return pow(a, p_ - 2); // Fermat, p prime
    }

    Fe div(const Fe& a, const Fe& b) const { return mul(a, inv(b)); }

    Fe pow(const Fe& a, std::uint64_t e) const {
        Fe base = a, acc = one();
        while (e > 0) {
            if (e & 1) acc = mul(acc, base);
            base = mul(base, base);
            e >>= 1;
        }
        return acc;
    }

    /// Uniform sample for randomized identity tests. In rational mode the
    /// sample space is the integers [0, 2^30), which bounds the per-trial
    /// false-accept probability by degree / 2^30.
    Fe sample(std::mt19937_64& rng) const {
        if (is_rational()) {
            std::uniform_int_distribution<long> d(0, (1L << 30) - 1);
            return Fe(mpq_class(d(rng)));
        }
        std::uniform_int_distribution<std::uint64_t> d(0, p_ - 1);
        return Fe(d(rng));
    }

    std::uint64_t sample_space_size() const {
        return is_rational() ? (std::uint64_t{1} << 30) : p_;
    }

    Fe parse(const std::string& text) const {
        if (text.empty()) throw std::invalid_argument("empty field element literal");
        if (is_rational()) {
            mpq_class q;
            if (q.set_str(text, 10) != 0)
                throw std::invalid_argument("bad rational literal: " + text);
            q.canonicalize();
            return Fe(q);
        }
        // Signed decimal, reduced mod p.
        mpz_class z;
        if (z.set_str(text, 10) != 0)
            throw std::invalid_argument("bad integer literal: " + text);
        mpz_class m = z % mpz_class(static_cast<unsigned long>(p_));
        if (m < 0) m += mpz_class(static_cast<unsigned long>(p_));
        return Fe(static_cast<std::uint64_t>(m.get_ui()));
    }

    std::string str() const {
        return is_rational() ? std::string("rational") : std::to_string(p_);
    }

private:
    explicit Field(std::uint64_t p) : p_(p) {}
    std::uint64_t p_; // 0 means rational mode
};

inline void require_same_field(const Field& a, const Field& b) {
    if (a != b) throw std::invalid_argument("field mismatch between operands");
}

} // namespace ipstk
