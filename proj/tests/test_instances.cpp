#include <catch2/catch_amalgamated.hpp>

#include "ipstk/instances.hpp"
#include "ipstk/selftest.hpp"

using namespace ipstk;

TEST_CASE("gen_eval examples") {
    SECTION("chain through two triples") {
        GenInstance g{3, {{1, 1, 2}, {2, 2, 3}}};
        REQUIRE(gen_eval(g));
    }
    SECTION("closure stalls without a base triple") {
        GenInstance g{3, {{2, 2, 3}}};
        REQUIRE_FALSE(gen_eval(g));
    }
    SECTION("n = 1 is always generated") {
        GenInstance g{1, {}};
        REQUIRE(gen_eval(g));
    }
    SECTION("out-of-range triples are rejected") {
        GenInstance g{2, {{1, 1, 3}}};
        REQUIRE_THROWS_AS(gen_eval(g), std::invalid_argument);
    }
}

TEST_CASE("gen circuit agrees with gen_eval") {
    std::mt19937_64 rng(13);
    for (int iter = 0; iter < 50; ++iter) {
        GenInstance g = selftest::random_gen_instance(rng, 4);
        BooleanCircuit c = gen_circuit(g.n);
        std::vector<bool> inputs(g.n * g.n * g.n, false);
        for (const auto& [u, v, w] : g.triples)
            inputs[((u - 1) * g.n + (v - 1)) * g.n + (w - 1)] = true;
        REQUIRE(c.eval(inputs) == gen_eval(g));
    }
}

TEST_CASE("gen split formula at n = 3 on the worked triple set") {
    Session s;
    GenSplit gs = gen_split_formula(3, s);
    std::map<VarId, bool> alpha;
    for (VarId z : gs.z_vars) alpha[z] = false;
    auto set_triple = [&](int u, int v, int w) {
        alpha[gs.z_vars[((u - 1) * 3 + (v - 1)) * 3 + (w - 1)]] = true;
    };
    set_triple(1, 1, 2);
    set_triple(2, 2, 3);
    REQUIRE(cnf_sat(gs.phi1, alpha));        // GEN = 1: the yes side is satisfiable
    REQUIRE_FALSE(cnf_sat(gs.phi0, alpha));  // and the no side is not
}

TEST_CASE("lifting a single clause") {
    Session s;
    Cnf phi;
    phi.table = s.table;
    VarId a = s.var("a"), b = s.var("b"), c = s.var("c");
    phi.vars = {a, b, c};
    phi.clauses.push_back(Clause{{{a, true}, {b, false}, {c, true}}});
    LiftedFormula L = lift(phi, s);
    SECTION("selector and clause counts") {
        REQUIRE(L.N == 3);
        REQUIRE(L.M == 1);
        REQUIRE(L.K() == 6);
        REQUIRE(L.u_vars.size() == 6);
        REQUIRE(L.phi1.num_clauses() == 6);
        // Exactly-one: one wide disjunction plus C(6,2) = 15 exclusions.
        REQUIRE(L.phi2.num_clauses() == 1 + 15);
        REQUIRE(L.cross_pairs.empty());
    }
    SECTION("Phi1 clauses have the selector-guard shape") {
        for (const Clause& cl : L.phi1.clauses) {
            REQUIRE(cl.literals.size() == 4);
            REQUIRE_FALSE(cl.literals[0].second); // leading ~u
        }
    }
    SECTION("identity order restores the clause under the identity renaming") {
        std::vector<VarId> order = L.psi.vars;
        LiftRestriction rho = restriction_for_order(L, order);
        REQUIRE(rho.v_rename.at(L.v_vars[0]) == a);
        REQUIRE(rho.v_rename.at(L.v_vars[1]) == b);
        REQUIRE(rho.v_rename.at(L.v_vars[2]) == c);
        // The canonical selector realizes (0,1,2).
        REQUIRE(rho.u_assign.at(L.u_var(0, 0)));
    }
    SECTION("the order v2 < v3 < v1 renames to x1, x2, x3 accordingly") {
        std::vector<VarId> order{L.v_vars[1], L.v_vars[2], L.v_vars[0]};
        for (VarId u : L.u_vars) order.push_back(u);
        LiftRestriction rho = restriction_for_order(L, order);
        REQUIRE(rho.v_rename.at(L.v_vars[1]) == a);
        REQUIRE(rho.v_rename.at(L.v_vars[2]) == b);
        REQUIRE(rho.v_rename.at(L.v_vars[0]) == c);
        // Recovered clause equals the original.
        std::size_t hot = 0;
        bool found = false;
        for (std::size_t t = 0; t < L.K(); ++t)
            if (rho.u_assign.at(L.u_var(0, t))) {
                hot = t;
                found = true;
            }
        REQUIRE(found);
        std::vector<std::pair<VarId, bool>> rec;
        for (int k = 0; k < 3; ++k)
            rec.emplace_back(rho.v_rename.at(L.v_vars[L.triples[hot][k]]),
                             phi.clauses[0].literals[k].second);
        REQUIRE(rec == phi.clauses[0].literals);
    }
}

TEST_CASE("round-trip on twenty random orders of a 4-variable formula") {
    Session s;
    Cnf phi;
    phi.table = s.table;
    std::vector<VarId> vars;
    for (int i = 0; i < 4; ++i) vars.push_back(s.var("q" + std::to_string(i + 1)));
    phi.vars = vars;
    phi.clauses.push_back(Clause{{{vars[0], true}, {vars[1], true}, {vars[2], false}}});
    phi.clauses.push_back(Clause{{{vars[1], false}, {vars[2], true}, {vars[3], true}}});
    phi.clauses.push_back(Clause{{{vars[0], false}, {vars[2], true}, {vars[3], false}}});
    LiftedFormula L = lift(phi, s);
    auto key = [](const Clause& cl) {
        auto l = cl.literals;
        std::sort(l.begin(), l.end());
        return l;
    };
    std::vector<std::vector<std::pair<VarId, bool>>> want;
    for (const auto& cl : L.base.clauses) want.push_back(key(cl));
    std::sort(want.begin(), want.end());
    std::mt19937_64 rng(29);
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<VarId> order = L.psi.vars;
        std::shuffle(order.begin(), order.end(), rng);
        LiftRestriction rho = restriction_for_order(L, order);
        std::vector<std::vector<std::pair<VarId, bool>>> got;
        for (std::size_t c = 0; c < L.M; ++c)
            for (std::size_t t = 0; t < L.K(); ++t) {
                if (!rho.u_assign.at(L.u_var(c, t))) continue;
                Clause out;
                for (int k = 0; k < 3; ++k)
                    out.literals.emplace_back(rho.v_rename.at(L.v_vars[L.triples[t][k]]),
                                              L.base.clauses[c].literals[k].second);
                got.push_back(key(out));
            }
        std::sort(got.begin(), got.end());
        REQUIRE(got == want);
    }
}

TEST_CASE("padding short clauses keeps a pure 3-CNF and equisatisfiability") {
    Session s;
    Cnf phi;
    phi.table = s.table;
    VarId p = s.var("p"), q = s.var("q");
    phi.vars = {p, q};
    phi.clauses.push_back(Clause{{{p, true}}});
    phi.clauses.push_back(Clause{{{p, false}, {q, true}}});
    LiftedFormula L = lift(phi, s);
    for (const Clause& c : L.base.clauses) {
        REQUIRE(c.literals.size() == 3);
        std::set<VarId> distinct;
        for (const auto& [v, pos] : c.literals) distinct.insert(v);
        REQUIRE(distinct.size() == 3);
    }
    REQUIRE(cnf_sat(L.base) == cnf_sat(phi));
    SECTION("an unsatisfiable padded base stays unsatisfiable") {
        Cnf contra = phi;
        contra.clauses.push_back(Clause{{{p, false}}});
        REQUIRE_FALSE(cnf_sat(contra));
        LiftedFormula L2 = lift(contra, s);
        REQUIRE_FALSE(cnf_sat(L2.base));
    }
    SECTION("clauses with more than three variables are rejected") {
        Cnf wide = phi;
        VarId r = s.var("r"), t = s.var("t");
        wide.vars.push_back(r);
        wide.vars.push_back(t);
        wide.clauses.push_back(
            Clause{{{p, true}, {q, true}, {r, true}, {t, true}}});
        REQUIRE_THROWS_AS(lift(wide, s), std::invalid_argument);
    }
}

TEST_CASE("wide exactly-one blocks can be chain-split on demand") {
    Session s;
    Cnf phi;
    phi.table = s.table;
    VarId a = s.var("a"), b = s.var("b"), c = s.var("c");
    phi.vars = {a, b, c};
    phi.clauses.push_back(Clause{{{a, true}, {b, true}, {c, true}}});
    LiftOptions opt;
    opt.split_wide_clauses = true;
    LiftedFormula L = lift(phi, s, opt);
    for (const Clause& cl : L.phi2.clauses) REQUIRE(cl.literals.size() <= 3);
    // The split encoding is equisatisfiable with the wide one.
    LiftedFormula wide = lift(phi, s);
    REQUIRE(cnf_sat(L.phi2) == cnf_sat(wide.phi2));
}

TEST_CASE("restriction of a certificate drops satisfied axioms") {
    Session s;
    Cnf phi;
    phi.table = s.table;
    VarId a = s.var("a"), b = s.var("b"), c = s.var("c");
    phi.vars = {a, b, c};
    for (int bits = 0; bits < 8; ++bits)
        phi.clauses.push_back(Clause{
            {{a, (bits & 1) != 0}, {b, (bits & 2) != 0}, {c, (bits & 4) != 0}}});
    LiftedFormula L = lift(phi, s);
    std::vector<VarId> order = L.psi.vars;
    LinearIpsCertificate cert = refute_lifted(L, order, s.config);
    REQUIRE(verify_certificate(cert, VerifyMode::Expand, s.config, s.rng).valid);

    LiftRestriction rho = restriction_for_order(L, order);
    LinearIpsCertificate rcert = apply_restriction_to_certificate(cert, L, rho, s.config);
    // Exactly the base translation survives: M clause axioms + N Booleans.
    REQUIRE(rcert.system.entries.size() == L.M + L.N);
    REQUIRE(rcert.order == L.base.vars);
    REQUIRE(verify_certificate(rcert, VerifyMode::Expand, s.config, s.rng).valid);
    REQUIRE(rcert.width() <= cert.width());
}
