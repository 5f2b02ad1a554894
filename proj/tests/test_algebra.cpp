#include <catch2/catch_amalgamated.hpp>

#include "ipstk/linalg.hpp"
#include "ipstk/session.hpp"

using namespace ipstk;

TEST_CASE("field arithmetic is exact in both modes") {
    Field fp = Field::prime((1ull << 31) - 1);
    Fe a = fp.from_int(-3);
    REQUIRE(a.residue() == fp.modulus() - 3);
    REQUIRE(fp.mul(a, fp.inv(a)) == fp.one());
    REQUIRE(fp.characteristic() == (1ull << 31) - 1);

    Field fq = Field::rationals();
    Fe h = fq.div(fq.one(), fq.from_int(2));
    REQUIRE(h.rational() == mpq_class(1, 2));
    REQUIRE(fq.add(h, h) == fq.one());
    REQUIRE(fq.characteristic() == 0);
    REQUIRE_THROWS_AS(fq.inv(fq.zero()), std::domain_error);
}

TEST_CASE("monomial order is graded lexicographic") {
    Monomial x1 = Monomial::var(0), x2 = Monomial::var(1);
    REQUIRE(Monomial::grlex_cmp(x1.times(x1), x1.times(x2)) > 0); // x1^2 > x1 x2
    REQUIRE(Monomial::grlex_cmp(x1, x2) > 0);                     // earlier variable is larger
    REQUIRE(Monomial::grlex_cmp(x1, x1.times(x2)) < 0);           // degree dominates
    REQUIRE(Monomial::grlex_cmp(x1, x1) == 0);
}

TEST_CASE("polynomial arithmetic examples") {
    Session s;
    SECTION("add(x1, 1 - x1) = 1") {
        REQUIRE(s.poly("x1") + s.poly("1 - x1") == s.one());
    }
    SECTION("mul(z1, x1) = z1 x1") {
        REQUIRE(s.poly("z1") * s.poly("x1") == s.poly("x1*z1"));
    }
    SECTION("mul(1 - x1, x1) expands to x1 - x1^2") {
        SparsePoly p = s.poly("1 - x1") * s.poly("x1");
        REQUIRE(p == s.poly("x1 - x1^2"));
        REQUIRE(p.sparsity() == 2);
        REQUIRE(p.degree() == 2);
    }
    SECTION("field and table mismatches are rejected") {
        Config other;
        other.field_modulus = 101;
        Session s2(other);
        REQUIRE_THROWS_AS(s.poly("x1") + SparsePoly::parse("x1", s2.field, s.table),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(s.poly("x1") + s2.poly("x1"), std::invalid_argument);
    }
}

TEST_CASE("multiplication is commutative and associative on random pairs") {
    Session s;
    std::mt19937_64 rng(12);
    std::vector<VarId> vars;
    for (int i = 0; i < 4; ++i) vars.push_back(s.var("x" + std::to_string(i + 1)));
    for (int iter = 0; iter < 40; ++iter) {
        auto random_poly = [&]() {
            SparsePoly p = SparsePoly::zero(s.field, s.table);
            for (int t = 0; t < 4; ++t) {
                Monomial m;
                for (VarId v : vars)
                    if (rng() % 3 == 0) m = m.times(Monomial::var(v, 1 + rng() % 2));
                p.add_term(m, s.field.from_int(static_cast<long long>(rng() % 7) - 3));
            }
            return p;
        };
        SparsePoly a = random_poly(), b = random_poly(), c = random_poly();
        REQUIRE(a * b == b * a);
        REQUIRE((a * b) * c == a * (b * c));
    }
}

TEST_CASE("substitution examples") {
    Session s;
    VarId z1 = s.var("z1");
    SECTION("(z1 x1)[z1 -> 1] = x1") {
        REQUIRE(s.poly("z1*x1").substitute_values({{z1, s.field.one()}}) == s.poly("x1"));
    }
    SECTION("Boolean axiom roots") {
        VarId x = s.var("x");
        SparsePoly ax = s.poly("x^2 - x");
        REQUIRE(ax.substitute_values({{x, s.field.zero()}}).is_zero());
        REQUIRE(ax.substitute_values({{x, s.field.one()}}).is_zero());
    }
    SECTION("variable mapped to a sum of variables") {
        VarId yk = s.var("yk");
        SparsePoly image = s.poly("x_1_k + x_2_k + x_3_k");
        REQUIRE(s.var_poly(yk).substitute({{yk, image}}) == image);
    }
    SECTION("unassigned variables survive; total assignment is constant") {
        SparsePoly p = s.poly("x1*z1 + z1");
        VarId x1 = s.var("x1");
        SparsePoly partial = p.substitute_values({{x1, s.field.one()}});
        REQUIRE(partial == s.poly("2*z1"));
        REQUIRE(partial.substitute_values({{z1, s.field.one()}}).is_constant());
    }
}

TEST_CASE("span membership examples and witness") {
    Session s;
    SECTION("{x1, 1-x1} spans 1 with combination (1,1)") {
        auto r = span_membership({s.poly("x1"), s.poly("1 - x1")}, s.one());
        REQUIRE(r.inside);
        REQUIRE((*r.combination)[0] == s.field.one());
        REQUIRE((*r.combination)[1] == s.field.one());
    }
    SECTION("{1-x1} does not span 1") {
        auto r = span_membership({s.poly("1 - x1")}, s.one());
        REQUIRE_FALSE(r.inside);
    }
    SECTION("empty set spans the zero vector") {
        auto r = span_membership({}, s.zero());
        REQUIRE(r.inside);
        REQUIRE(r.combination->empty());
    }
    SECTION("positive answers always re-substitute to the target") {
        std::mt19937_64 rng(5);
        std::vector<VarId> vars{s.var("a"), s.var("b")};
        for (int iter = 0; iter < 30; ++iter) {
            std::vector<SparsePoly> vecs;
            for (int k = 0; k < 3; ++k) {
                SparsePoly p = SparsePoly::zero(s.field, s.table);
                for (VarId v : vars)
                    p.add_term(Monomial::var(v, rng() % 2),
                               s.field.from_int(static_cast<long long>(rng() % 5) - 2));
                vecs.push_back(p);
            }
            // Target inside the span by construction.
            SparsePoly target = vecs[0].scale(s.field.from_int(3)) - vecs[2];
            auto r = span_membership(vecs, target);
            REQUIRE(r.inside);
            SparsePoly back = SparsePoly::zero(s.field, s.table);
            for (std::size_t i = 0; i < vecs.size(); ++i)
                back += vecs[i].scale((*r.combination)[i]);
            REQUIRE(back == target);
        }
    }
}

TEST_CASE("rational and prime mode agree on span membership of integer inputs") {
    Config cp;
    Session sp(cp);
    Config cq;
    cq.rational_field = true;
    Session sq(cq);
    auto build = [](Session& s) {
        std::vector<SparsePoly> vecs{s.poly("x1 + 2*x2"), s.poly("3*x1 - x2"), s.poly("x2")};
        SparsePoly target = s.poly("7*x1");
        return std::make_pair(vecs, target);
    };
    auto [vp, tp] = build(sp);
    auto [vq, tq] = build(sq);
    REQUIRE(span_membership(vp, tp).inside == span_membership(vq, tq).inside);
    auto [vp2, tp2] = build(sp);
    vp2.pop_back();
    auto [vq2, tq2] = build(sq);
    vq2.pop_back();
    REQUIRE(span_membership(vp2, tp2).inside == span_membership(vq2, tq2).inside);
}

TEST_CASE("polynomial text form round-trips bit-exactly") {
    Session s;
    std::mt19937_64 rng(9);
    std::vector<VarId> vars{s.var("x3"), s.var("z1"), s.var("w2")};
    for (int iter = 0; iter < 50; ++iter) {
        SparsePoly p = SparsePoly::zero(s.field, s.table);
        for (int t = 0; t < 5; ++t) {
            Monomial m;
            for (VarId v : vars)
                if (rng() % 2) m = m.times(Monomial::var(v, 1 + rng() % 3));
            p.add_term(m, s.field.from_int(static_cast<long long>(rng() % 9) - 4));
        }
        std::string text = p.str();
        SparsePoly q = SparsePoly::parse(text, s.field, s.table);
        REQUIRE(q == p);
        REQUIRE(q.str() == text);
    }
    REQUIRE(SparsePoly::parse("0", s.field, s.table).is_zero());
    REQUIRE(s.poly("x3^2*z1").str() == "1*x3^2*z1");
    REQUIRE_THROWS_AS(SparsePoly::parse("", s.field, s.table), std::invalid_argument);
    REQUIRE_THROWS_AS(SparsePoly::parse("x1 1", s.field, s.table), std::invalid_argument);
}

TEST_CASE("rational coefficients print and parse") {
    Config cfg;
    cfg.rational_field = true;
    Session s(cfg);
    SparsePoly p = s.poly("1/2*x1 - 3/4");
    REQUIRE(p.str() == "1/2*x1 - 3/4");
    REQUIRE(SparsePoly::parse(p.str(), s.field, s.table) == p);
}
