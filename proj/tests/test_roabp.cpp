#include <catch2/catch_amalgamated.hpp>

#include "ipstk/roabp.hpp"
#include "ipstk/session.hpp"

using namespace ipstk;

namespace {
SparsePoly random_sparse(Session& s, const std::vector<VarId>& vars, std::mt19937_64& rng,
                         int terms) {
    SparsePoly p = SparsePoly::zero(s.field, s.table);
    for (int t = 0; t < terms; ++t) {
        Monomial m;
        for (VarId v : vars)
            if (rng() % 3 == 0) m = m.times(Monomial::var(v, 1 + rng() % 2));
        p.add_term(m, s.field.from_int(static_cast<long long>(rng() % 9) - 4));
    }
    return p;
}
} // namespace

TEST_CASE("from_sparse examples") {
    Session s;
    VarId x1 = s.var("x1"), x2 = s.var("x2"), z1 = s.var("z1");
    SECTION("x1 x2 + 1 has width at most 2") {
        SparsePoly p = s.poly("x1*x2 + 1");
        Roabp r = Roabp::from_sparse(p, {x1, x2});
        REQUIRE(r.width() <= 2);
        REQUIRE(r.expand() == p);
    }
    SECTION("constants have width 1") {
        Roabp r = Roabp::from_sparse(s.constant(7), {x1, x2});
        REQUIRE(r.width() == 1);
        REQUIRE(r.expand() == s.constant(7));
    }
    SECTION("a single monomial is a single path") {
        Roabp r = Roabp::from_sparse(s.poly("z1*x1"), {x1, z1});
        REQUIRE(r.width() == 1);
        REQUIRE(r.expand() == s.poly("z1*x1"));
    }
    SECTION("width never exceeds sparsity") {
        std::mt19937_64 rng(3);
        for (int iter = 0; iter < 30; ++iter) {
            SparsePoly p = random_sparse(s, {x1, x2, z1}, rng, 5);
            Roabp r = Roabp::from_sparse(p, {x1, x2, z1});
            REQUIRE(r.width() <= std::max<std::size_t>(1, p.sparsity()));
            REQUIRE(r.expand() == p);
        }
    }
    SECTION("variables outside the order are rejected") {
        REQUIRE_THROWS_AS(Roabp::from_sparse(s.poly("z1*x1"), {x1, x2}),
                          std::invalid_argument);
    }
}

TEST_CASE("expand examples") {
    Session s;
    VarId x1 = s.var("x1"), x2 = s.var("x2");
    SECTION("width-1 chain with labels x1 then x2") {
        PolyMatrix m1(1, 1, s.poly("x1")), m2(1, 1, s.poly("x2"));
        Roabp r(s.field, s.table, {x1, x2}, {m1, m2});
        REQUIRE(r.expand() == s.poly("x1*x2"));
    }
    SECTION("identity layers compute 1") {
        PolyMatrix id(1, 1, s.one());
        Roabp r(s.field, s.table, {x1, x2}, {id, id});
        REQUIRE(r.expand() == s.one());
    }
    SECTION("round-trip through from_sparse on 100 random polynomials") {
        std::mt19937_64 rng(17);
        std::vector<VarId> vars{x1, x2, s.var("x3"), s.var("x4")};
        for (int iter = 0; iter < 100; ++iter) {
            SparsePoly p = random_sparse(s, vars, rng, 6);
            REQUIRE(Roabp::from_sparse(p, vars).expand() == p);
        }
    }
    SECTION("term budget raises an explicit signal") {
        std::vector<VarId> vars{x1, x2};
        SparsePoly p = s.poly("x1*x2 + x1 + x2 + 1");
        REQUIRE_THROWS_AS(Roabp::from_sparse(p, vars).expand(1), BudgetExceeded);
    }
}

TEST_CASE("add and mul respect width bounds and expansion laws") {
    Session s;
    std::mt19937_64 rng(23);
    VarId a = s.var("a"), b = s.var("b"), c = s.var("c");
    std::vector<VarId> order{a, b, c};
    SECTION("widths 2 and 3 multiply to at most 6") {
        Roabp p2 = Roabp::from_sparse(s.poly("a*b + 1"), order);        // width 2
        Roabp p3 = Roabp::from_sparse(s.poly("a*c + b + 1"), order);    // width 3
        REQUIRE(p2.width() == 2);
        REQUIRE(p3.width() == 3);
        REQUIRE(roabp_mul(p2, p3).width() <= 6);
    }
    SECTION("adding the zero program changes nothing under expansion") {
        Roabp p = Roabp::from_sparse(s.poly("a*b + c"), order);
        Roabp z = Roabp::zero_program(s.field, s.table, order);
        REQUIRE(roabp_add(p, z).expand() == p.expand());
        REQUIRE(z.is_structural_zero());
    }
    SECTION("expansion laws on random programs") {
        for (int iter = 0; iter < 25; ++iter) {
            SparsePoly pa = random_sparse(s, order, rng, 4);
            SparsePoly pb = random_sparse(s, order, rng, 4);
            Roabp ra = Roabp::from_sparse(pa, order), rb = Roabp::from_sparse(pb, order);
            REQUIRE(roabp_mul(ra, rb).expand() == pa * pb);
            REQUIRE(roabp_add(ra, rb).expand() == pa + pb);
        }
    }
    SECTION("order mismatch is an error") {
        Roabp p = Roabp::from_sparse(s.poly("a"), order);
        Roabp q = Roabp::from_sparse(s.poly("a"), {a, c, b});
        REQUIRE_THROWS_AS(roabp_add(p, q), std::invalid_argument);
    }
}

TEST_CASE("restriction examples") {
    Session s;
    VarId u = s.var("u"), v = s.var("v"), x1 = s.var("x1");
    std::vector<VarId> order{u, v};
    SECTION("substituting u = 1 in u v leaves v at the same width") {
        Roabp p = Roabp::from_sparse(s.poly("u*v"), order);
        Roabp r = p.restricted({{u, s.field.one()}});
        REQUIRE(r.width() <= p.width());
        REQUIRE(r.expand() == s.poly("v"));
    }
    SECTION("a total assignment yields a constant program") {
        Roabp p = Roabp::from_sparse(s.poly("u*v + u + 1"), order);
        Roabp r = p.restricted({{u, s.field.one()}, {v, s.field.one()}});
        REQUIRE(r.is_constant_program());
        REQUIRE(r.constant_value() == s.field.from_int(3));
    }
    SECTION("renaming v2 -> x1 matches the renamed polynomial") {
        VarId v2 = s.var("v2");
        Roabp p = Roabp::from_sparse(s.poly("u*v2 + v2"), {u, v2});
        Roabp r = p.restricted({}, {{v2, x1}});
        REQUIRE(r.expand() == s.poly("u*x1 + x1"));
    }
    SECTION("non-injective renaming is rejected") {
        Roabp p = Roabp::from_sparse(s.poly("u*v"), order);
        REQUIRE_THROWS_AS(p.restricted({}, {{u, x1}, {v, x1}}), std::invalid_argument);
    }
}

TEST_CASE("cut decomposition examples") {
    Session s;
    VarId x1 = s.var("x1"), z1 = s.var("z1"), a = s.var("a"), b = s.var("b"), c = s.var("c");
    SECTION("width-1 program for x1 z1 cut after x1") {
        Roabp p = Roabp::from_sparse(s.poly("x1*z1"), {x1, z1});
        auto d = p.cut(1);
        REQUIRE(d.prefix.size() == 1);
        REQUIRE(d.prefix[0] == s.poly("x1"));
        REQUIRE(d.suffix[0] == s.poly("z1"));
    }
    SECTION("constant program cuts into (1)(1) padded to the width") {
        Roabp p = Roabp::from_sparse(s.one(), {x1, z1});
        auto d = p.cut(1);
        REQUIRE(d.prefix.size() == p.width());
        REQUIRE(d.suffix.size() == p.width());
        SparsePoly acc = SparsePoly::zero(s.field, s.table);
        for (std::size_t i = 0; i < d.prefix.size(); ++i) acc += d.prefix[i] * d.suffix[i];
        REQUIRE(acc == s.one());
    }
    SECTION("cut identity on random width-3 programs") {
        std::mt19937_64 rng(31);
        std::vector<VarId> order{a, b, c};
        for (int iter = 0; iter < 25; ++iter) {
            SparsePoly p = random_sparse(s, order, rng, 3);
            Roabp r = Roabp::from_sparse(p, order);
            for (std::size_t t = 1; t < order.size(); ++t) {
                auto d = r.cut(t);
                REQUIRE(d.prefix.size() == r.width());
                SparsePoly acc = SparsePoly::zero(s.field, s.table);
                for (std::size_t i = 0; i < d.prefix.size(); ++i)
                    acc += d.prefix[i] * d.suffix[i];
                REQUIRE(acc == p);
            }
        }
    }
    SECTION("cut position is range-checked") {
        Roabp p = Roabp::from_sparse(s.poly("x1*z1"), {x1, z1});
        REQUIRE_THROWS_AS(p.cut(0), std::out_of_range);
        REQUIRE_THROWS_AS(p.cut(2), std::out_of_range);
    }
}

TEST_CASE("identity testing") {
    Session s;
    VarId x1 = s.var("x1"), x2 = s.var("x2");
    std::vector<VarId> order{x1, x2};
    std::mt19937_64 rng(37);
    SECTION("structurally equal programs") {
        Roabp p = Roabp::from_sparse(s.poly("x1 + x2"), order);
        REQUIRE(roabp_identity_test(p, p, IdentityTestMode::Expand, rng));
    }
    SECTION("commuted sums agree") {
        Roabp p = Roabp::from_sparse(s.poly("x1 + x2"), order);
        Roabp q = Roabp::from_sparse(s.poly("x2 + x1"), order);
        REQUIRE(roabp_identity_test(p, q, IdentityTestMode::Expand, rng));
        REQUIRE(roabp_identity_test(p, q, IdentityTestMode::Randomized, rng, 10));
    }
    SECTION("perturbing one edge label is detected") {
        Roabp p = Roabp::from_sparse(s.poly("x1*x2 + x1"), order);
        auto layers = p.layers();
        layers[0].at(0, 0) += s.one();
        Roabp q(s.field, s.table, order, layers);
        REQUIRE_FALSE(roabp_identity_test(p, q, IdentityTestMode::Expand, rng));
        REQUIRE_FALSE(roabp_identity_test(p, q, IdentityTestMode::Randomized, rng, 10));
    }
}

TEST_CASE("restriction commutes with substitution") {
    Session s;
    std::mt19937_64 rng(41);
    std::vector<VarId> order{s.var("p"), s.var("q"), s.var("r")};
    for (int iter = 0; iter < 30; ++iter) {
        SparsePoly p = random_sparse(s, order, rng, 5);
        Roabp r = Roabp::from_sparse(p, order);
        std::map<VarId, Fe> sigma;
        for (VarId v : order)
            if (rng() % 2) sigma[v] = s.field.from_int(static_cast<long long>(rng() % 4));
        REQUIRE(r.restricted(sigma).expand() == p.substitute_values(sigma));
    }
}

TEST_CASE("basis change keeps the width and commutes with expansion") {
    Session s;
    std::mt19937_64 rng(43);
    std::vector<VarId> yorder{s.var("y1"), s.var("y2"), s.var("y3")};
    std::vector<VarId> xvars{s.var("b1"), s.var("b2"), s.var("b3")};
    Fe half = s.field.inv(s.field.from_int(2));
    std::map<VarId, Roabp::AffineImage> images;
    std::map<VarId, SparsePoly> subs;
    for (std::size_t i = 0; i < 3; ++i) {
        // y -> (1 - x) / 2
        images[yorder[i]] = Roabp::AffineImage{xvars[i], half, s.field.neg(half)};
        subs.emplace(yorder[i], SparsePoly::constant(s.field, s.table, half) -
                                    SparsePoly::variable(s.field, s.table, xvars[i]).scale(half));
    }
    for (int iter = 0; iter < 20; ++iter) {
        SparsePoly p = random_sparse(s, yorder, rng, 4);
        Roabp r = Roabp::from_sparse(p, yorder);
        Roabp rc = r.change_basis(images);
        REQUIRE(rc.width() == r.width());
        REQUIRE(rc.expand() == p.substitute(subs));
    }
}

TEST_CASE("re-basing onto a super-order inserts identity layers") {
    Session s;
    VarId a = s.var("a"), b = s.var("b"), w = s.var("w");
    Roabp p = Roabp::from_sparse(s.poly("a*b + a + 1"), {a, b});
    Roabp q = p.with_order({a, w, b});
    REQUIRE(q.width() == p.width());
    REQUIRE(q.expand() == p.expand());
    REQUIRE_THROWS_AS(p.with_order({b, w}), std::invalid_argument);
}
