#include <catch2/catch_amalgamated.hpp>

#include "ipstk/certificate.hpp"
#include "ipstk/selftest.hpp"

using namespace ipstk;

TEST_CASE("worked split refutation verifies at width 1") {
    selftest::WorkedExample ex;
    auto v = verify_certificate(ex.cert, VerifyMode::Expand, ex.sess.config, ex.sess.rng);
    REQUIRE(v.valid);
    REQUIRE(v.width == 1);
    REQUIRE(v.report == "valid, width 1");
    auto vr = verify_certificate(ex.cert, VerifyMode::Randomized, ex.sess.config, ex.sess.rng);
    REQUIRE(vr.valid);
}

TEST_CASE("zeroing a coefficient invalidates the certificate") {
    selftest::WorkedExample ex;
    LinearIpsCertificate broken = ex.cert;
    broken.coefficients[0] =
        Roabp::zero_program(ex.sess.field, ex.sess.table, broken.order);
    auto v = verify_certificate(broken, VerifyMode::Expand, ex.sess.config, ex.sess.rng);
    REQUIRE_FALSE(v.valid);
    auto vr = verify_certificate(broken, VerifyMode::Randomized, ex.sess.config, ex.sess.rng);
    REQUIRE_FALSE(vr.valid);
}

TEST_CASE("certificate structural checks") {
    selftest::WorkedExample ex;
    SECTION("coefficient count must match the system") {
        auto coeffs = ex.cert.coefficients;
        coeffs.pop_back();
        REQUIRE_THROWS_AS(
            LinearIpsCertificate(ex.cert.system, ex.cert.order, coeffs, ex.cert.target),
            std::invalid_argument);
    }
    SECTION("coefficient order must equal the shared order") {
        auto coeffs = ex.cert.coefficients;
        std::vector<VarId> other{ex.z1, ex.y1, ex.x1};
        coeffs[0] = Roabp::from_sparse(ex.sess.one(), other);
        REQUIRE_THROWS_AS(
            LinearIpsCertificate(ex.cert.system, ex.cert.order, coeffs, ex.cert.target),
            std::invalid_argument);
    }
}

TEST_CASE("composition with identity derivations reproduces the outer certificate") {
    selftest::WorkedExample ex;
    Session& s = ex.sess;
    std::vector<LinearIpsCertificate> inner;
    for (std::size_t i = 0; i < ex.system.entries.size(); ++i) {
        auto coeffs = zero_coefficients(ex.system, ex.cert.order);
        coeffs[i] = Roabp::constant_program(s.field, s.table, s.field.one(), ex.cert.order);
        inner.emplace_back(ex.system, ex.cert.order, coeffs, ex.system.entries[i].poly);
    }
    LinearIpsCertificate composed = compose_derivation(ex.cert, inner);
    auto v = verify_certificate(composed, VerifyMode::Expand, s.config, s.rng);
    REQUIRE(v.valid);
    for (std::size_t i = 0; i < composed.coefficients.size(); ++i)
        REQUIRE(composed.coefficients[i].expand() == ex.cert.coefficients[i].expand());
}

TEST_CASE("composition preserves validity and obeys the width bound") {
    // outer: derives 1 from A = {a1 = x + y, a2 = 1 - x - y}
    // inner: derives each a_i from B = {x, y, 1 - x - y} style axioms.
    Session s;
    VarId x = s.var("x"), y = s.var("y");
    std::vector<VarId> order{x, y};
    PolySystem a(s.field, s.table);
    a.add(s.poly("x + y"));
    a.add(s.poly("1 - x - y"));
    a.set_role(x, VarRole::X);
    a.set_role(y, VarRole::X);
    std::vector<Roabp> outer_coeffs{
        Roabp::constant_program(s.field, s.table, s.field.one(), order),
        Roabp::constant_program(s.field, s.table, s.field.one(), order)};
    LinearIpsCertificate outer(a, order, outer_coeffs, s.one());
    REQUIRE(verify_certificate(outer, VerifyMode::Expand, s.config, s.rng).valid);

    PolySystem b(s.field, s.table);
    b.add(s.poly("x"));
    b.add(s.poly("y"));
    b.add(s.poly("1 - x - y"));
    b.roles = a.roles;
    std::vector<LinearIpsCertificate> inner;
    {
        auto c0 = zero_coefficients(b, order);
        c0[0] = Roabp::constant_program(s.field, s.table, s.field.one(), order);
        c0[1] = Roabp::constant_program(s.field, s.table, s.field.one(), order);
        inner.emplace_back(b, order, c0, s.poly("x + y"));
        auto c1 = zero_coefficients(b, order);
        c1[2] = Roabp::constant_program(s.field, s.table, s.field.one(), order);
        inner.emplace_back(b, order, c1, s.poly("1 - x - y"));
    }
    for (const auto& d : inner)
        REQUIRE(verify_certificate(d, VerifyMode::Expand, s.config, s.rng).valid);
    LinearIpsCertificate composed = compose_derivation(outer, inner);
    REQUIRE(verify_certificate(composed, VerifyMode::Expand, s.config, s.rng).valid);
    std::size_t bound = 0;
    for (std::size_t i = 0; i < inner.size(); ++i)
        bound += outer.coefficients[i].width() * inner[i].width();
    REQUIRE(composed.width() <= bound);
}

TEST_CASE("Nullstellensatz oracle") {
    Session s;
    SECTION("refutes {(x1), (~x1)} at degree 1") {
        Cnf cnf;
        cnf.table = s.table;
        VarId x1 = s.var("x1");
        cnf.vars = {x1};
        cnf.clauses.push_back(Clause{{{x1, true}}});
        cnf.clauses.push_back(Clause{{{x1, false}}});
        PolySystem sys = translate_cnf(cnf, s.field);
        auto cert = find_ns_refutation(sys, 1, {x1}, s.config);
        REQUIRE(cert.has_value());
        REQUIRE(verify_certificate(*cert, VerifyMode::Expand, s.config, s.rng).valid);
    }
    SECTION("satisfiable systems have no refutation at any small degree") {
        Cnf cnf;
        cnf.table = s.table;
        VarId x1 = s.var("x1"), x2 = s.var("x2");
        cnf.vars = {x1, x2};
        cnf.clauses.push_back(Clause{{{x1, true}, {x2, true}}});
        cnf.clauses.push_back(Clause{{{x1, false}, {x2, true}}});
        PolySystem sys = translate_cnf(cnf, s.field);
        for (std::uint32_t d = 1; d <= 4; ++d)
            REQUIRE_FALSE(find_ns_refutation(sys, d, {x1, x2}, s.config).has_value());
    }
    SECTION("degree is monotone: higher degrees still find the refutation") {
        selftest::WorkedExample ex;
        std::vector<VarId> order{ex.x1, ex.y1, ex.z1};
        for (std::uint32_t d = 2; d <= 3; ++d) {
            auto cert = find_ns_refutation(ex.system, d, order, ex.sess.config);
            REQUIRE(cert.has_value());
            REQUIRE(verify_certificate(*cert, VerifyMode::Expand, ex.sess.config, ex.sess.rng)
                        .valid);
        }
    }
    SECTION("column budget raises an explicit signal") {
        selftest::WorkedExample ex;
        Config tight = ex.sess.config;
        tight.ns_column_budget = 2;
        std::vector<VarId> order{ex.x1, ex.y1, ex.z1};
        REQUIRE_THROWS_AS(find_ns_refutation(ex.system, 3, order, tight), BudgetExceeded);
    }
}

TEST_CASE("randomized and expand verification agree on a corpus") {
    std::mt19937_64 rng(71);
    for (int iter = 0; iter < 10; ++iter) {
        auto inst = selftest::make_split_instance(3000 + iter, Config{});
        auto cert = find_ns_refutation(inst->system, 2, inst->order, inst->sess.config);
        if (!cert) cert = find_ns_refutation(inst->system, 3, inst->order, inst->sess.config);
        REQUIRE(cert.has_value());
        auto ve = verify_certificate(*cert, VerifyMode::Expand, inst->sess.config, rng);
        auto vr = verify_certificate(*cert, VerifyMode::Randomized, inst->sess.config, rng);
        REQUIRE(ve.valid == vr.valid);
        REQUIRE(ve.valid);
    }
}
