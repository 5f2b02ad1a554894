#include <catch2/catch_amalgamated.hpp>

#include "ipstk/formulas.hpp"

using namespace ipstk;

TEST_CASE("DIMACS parsing") {
    Session s;
    SECTION("simple clause") {
        Cnf cnf = parse_dimacs("p cnf 2 1\n1 -2 0\n", s.table);
        REQUIRE(cnf.num_vars() == 2);
        REQUIRE(cnf.num_clauses() == 1);
        REQUIRE(cnf.clauses[0].literals ==
                std::vector<std::pair<VarId, bool>>{{cnf.vars[0], true}, {cnf.vars[1], false}});
    }
    SECTION("duplicate literal collapses with a warning") {
        std::vector<std::string> warnings;
        Cnf cnf = parse_dimacs("p cnf 1 1\n1 1 0\n", s.table, &warnings);
        REQUIRE(cnf.clauses[0].literals.size() == 1);
        REQUIRE(warnings.size() == 1);
        REQUIRE(warnings[0].find("duplicate") != std::string::npos);
    }
    SECTION("tautologies drop with a warning") {
        std::vector<std::string> warnings;
        Cnf cnf = parse_dimacs("p cnf 1 1\n1 -1 0\n", s.table, &warnings);
        REQUIRE(cnf.clauses.empty());
        REQUIRE_FALSE(warnings.empty());
    }
    SECTION("malformed inputs are rejected") {
        REQUIRE_THROWS_AS(parse_dimacs("p dnf 1 1\n1 0\n", s.table), std::invalid_argument);
        REQUIRE_THROWS_AS(parse_dimacs("1 0\n", s.table), std::invalid_argument);
        REQUIRE_THROWS_AS(parse_dimacs("p cnf 1 1\n2 0\n", s.table), std::invalid_argument);
        REQUIRE_THROWS_AS(parse_dimacs("p cnf 1 1\n1\n", s.table), std::invalid_argument);
        REQUIRE_THROWS_AS(parse_dimacs("p cnf 2 1\n1 0 2 0\n", s.table), std::invalid_argument);
    }
}

TEST_CASE("clause translation") {
    Session s;
    VarId x1 = s.var("x1"), x2 = s.var("x2");
    SECTION("(x1 v ~x2) -> (1 - x1) x2") {
        Clause c{{{x1, true}, {x2, false}}};
        REQUIRE(translate_clause(c, s.field, s.table) == s.poly("x2 - x1*x2"));
    }
    SECTION("(x1) -> 1 - x1") {
        Clause c{{{x1, true}}};
        REQUIRE(translate_clause(c, s.field, s.table) == s.poly("1 - x1"));
    }
    SECTION("tr(C) vanishes exactly on satisfying assignments, width <= 4") {
        std::vector<VarId> vars{x1, x2, s.var("x3"), s.var("x4")};
        for (int mask = 1; mask < 16; ++mask) {
            for (int signs = 0; signs < 16; ++signs) {
                std::vector<std::pair<VarId, bool>> lits;
                for (int i = 0; i < 4; ++i)
                    if (mask & (1 << i)) lits.emplace_back(vars[i], (signs >> i) & 1);
                Clause c{lits};
                SparsePoly tr = translate_clause(c, s.field, s.table);
                for (int assign = 0; assign < 16; ++assign) {
                    std::map<VarId, Fe> point;
                    bool satisfied = false;
                    for (int i = 0; i < 4; ++i) {
                        bool val = (assign >> i) & 1;
                        point[vars[i]] = s.field.from_int(val);
                    }
                    for (const auto& [v, pos] : c.literals) {
                        bool val = point[v] == s.field.one();
                        if (val == pos) satisfied = true;
                    }
                    REQUIRE(s.field.is_zero(tr.eval(point)) == satisfied);
                }
            }
        }
    }
}

TEST_CASE("translated CNFs have the same satisfiability as the clauses") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 15; ++iter) {
        Session s;
        Cnf cnf;
        cnf.table = s.table;
        int nvars = 3 + static_cast<int>(rng() % 4); // <= 6
        for (int i = 0; i < nvars; ++i) cnf.vars.push_back(s.var("x" + std::to_string(i + 1)));
        int nclauses = 2 + static_cast<int>(rng() % 8);
        for (int c = 0; c < nclauses; ++c) {
            std::set<int> used;
            std::vector<std::pair<VarId, bool>> lits;
            while (lits.size() < 3) {
                int v = static_cast<int>(rng() % nvars);
                if (!used.insert(v).second) continue;
                lits.emplace_back(cnf.vars[v], rng() % 2 == 0);
            }
            auto cl = normalize_clause(lits);
            if (cl) cnf.clauses.push_back(*cl);
        }
        // Direct CNF evaluation by full enumeration.
        bool direct = false;
        for (int assign = 0; assign < (1 << nvars) && !direct; ++assign) {
            bool all = true;
            for (const Clause& c : cnf.clauses) {
                bool sat = false;
                for (const auto& [v, pos] : c.literals) {
                    std::size_t idx = std::find(cnf.vars.begin(), cnf.vars.end(), v) -
                                      cnf.vars.begin();
                    if ((((assign >> idx) & 1) != 0) == pos) sat = true;
                }
                if (!sat) {
                    all = false;
                    break;
                }
            }
            direct = all;
        }
        PolySystem sys = translate_cnf(cnf, s.field);
        REQUIRE(brute_force_sat(sys, {}, s.config).sat == direct);
        REQUIRE(cnf_sat(cnf) == direct);
    }
}

TEST_CASE("brute-force satisfiability oracle") {
    Session s;
    VarId x1 = s.var("x1"), z1 = s.var("z1");
    SECTION("{x1, 1 - x1} is unsatisfiable") {
        PolySystem sys(s.field, s.table);
        sys.add(s.poly("x1"));
        sys.add(s.poly("1 - x1"));
        sys.set_role(x1, VarRole::X);
        REQUIRE_FALSE(brute_force_sat(sys, {}, s.config).sat);
    }
    SECTION("{z1 x1, 1 - x1} depends on the z-assignment") {
        PolySystem sys(s.field, s.table);
        sys.add(s.poly("z1*x1"));
        sys.add(s.poly("1 - x1"));
        sys.set_role(x1, VarRole::X);
        sys.set_role(z1, VarRole::Z);
        auto sat0 = brute_force_sat(sys, {{z1, false}}, s.config);
        REQUIRE(sat0.sat);
        REQUIRE(sat0.witness.at(x1) == s.field.one());
        REQUIRE_FALSE(brute_force_sat(sys, {{z1, true}}, s.config).sat);
    }
    SECTION("monotone gadget matches the original at every z-assignment") {
        // p'(x) = 1 - x1; gadget: {p' + w1 + w2, z1 w1, z2 w2} vs z1 z2 p'.
        VarId z2 = s.var("z2"), w1 = s.var("w1"), w2 = s.var("w2");
        PolySystem orig(s.field, s.table);
        orig.add(s.poly("z1*z2") * s.poly("1 - x1"));
        orig.set_role(x1, VarRole::X);
        orig.set_role(z1, VarRole::Z);
        orig.set_role(z2, VarRole::Z);
        PolySystem gadget(s.field, s.table);
        gadget.add(s.poly("1 - x1 + w1 + w2"));
        gadget.add(s.poly("z1*w1"));
        gadget.add(s.poly("z2*w2"));
        gadget.roles = orig.roles;
        gadget.set_role(w1, VarRole::AuxW);
        gadget.set_role(w2, VarRole::AuxW);
        // Force x1 = 0 on both sides so satisfiability is non-trivial.
        orig.add(s.poly("x1"));
        gadget.add(s.poly("x1"));
        for (int bits = 0; bits < 4; ++bits) {
            std::map<VarId, bool> alpha{{z1, (bits & 1) != 0}, {z2, (bits & 2) != 0}};
            REQUIRE(brute_force_sat(orig, alpha, s.config).sat ==
                    brute_force_sat(gadget, alpha, s.config).sat);
        }
    }
    SECTION("nonlinear auxiliary occurrences raise the documented error") {
        VarId w = s.var("wq");
        PolySystem sys(s.field, s.table);
        sys.add(s.var_poly(w) * s.var_poly(w) - s.one());
        sys.set_role(w, VarRole::AuxField);
        REQUIRE_THROWS_AS(brute_force_sat(sys, {}, s.config), NonlinearAuxError);
    }
    SECTION("enumeration budget is enforced") {
        Config tight;
        tight.enumeration_budget = 1;
        PolySystem sys(s.field, s.table);
        sys.add(s.poly("x1*z1"));
        sys.set_role(x1, VarRole::X);
        sys.set_role(z1, VarRole::Z);
        REQUIRE_THROWS_AS(brute_force_sat(sys, {}, tight), BudgetExceeded);
    }
    SECTION("underdetermined linear auxiliaries are satisfiable") {
        VarId w1 = s.var("wa"), w2 = s.var("wb");
        PolySystem sys(s.field, s.table);
        sys.add(s.poly("1 + wa + wb")); // one equation, two unknowns
        sys.set_role(w1, VarRole::AuxField);
        sys.set_role(w2, VarRole::AuxField);
        REQUIRE(brute_force_sat(sys, {}, s.config).sat);
    }
}

TEST_CASE("full-system validation") {
    Session s;
    VarId x1 = s.var("x1");
    PolySystem sys(s.field, s.table);
    sys.add(s.poly("x1"));
    sys.set_role(x1, VarRole::X);
    // Boolean-role variable without its Boolean axiom.
    REQUIRE_THROWS_AS(sys.validate(), std::invalid_argument);
    sys.add(s.poly("x1^2 - x1"), AxKind::BooleanAxiom);
    REQUIRE_NOTHROW(sys.validate());
}
