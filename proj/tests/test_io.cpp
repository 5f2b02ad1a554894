#include <catch2/catch_amalgamated.hpp>

#include "ipstk/io.hpp"
#include "ipstk/selftest.hpp"

using namespace ipstk;

TEST_CASE("DIMACS emit/parse round-trips a random corpus") {
    std::mt19937_64 rng(2);
    for (int iter = 0; iter < 100; ++iter) {
        Session s;
        Cnf cnf = selftest::random_tiny_cnf(s, rng, 3 + static_cast<int>(rng() % 4),
                                            2 + static_cast<int>(rng() % 8));
        std::string text = emit_dimacs(cnf);
        Session s2;
        Cnf back = parse_dimacs(text, s2.table);
        REQUIRE(back.num_vars() == cnf.num_vars());
        REQUIRE(back.num_clauses() == cnf.num_clauses());
        // Clause order and literal content are preserved.
        for (std::size_t c = 0; c < cnf.clauses.size(); ++c) {
            REQUIRE(back.clauses[c].literals.size() == cnf.clauses[c].literals.size());
            for (std::size_t l = 0; l < cnf.clauses[c].literals.size(); ++l) {
                // Compare positions in the respective universes.
                auto pos = [&](const Cnf& f, VarId v) {
                    return std::find(f.vars.begin(), f.vars.end(), v) - f.vars.begin();
                };
                REQUIRE(pos(back, back.clauses[c].literals[l].first) ==
                        pos(cnf, cnf.clauses[c].literals[l].first));
                REQUIRE(back.clauses[c].literals[l].second == cnf.clauses[c].literals[l].second);
            }
        }
        // Emitting again is byte-identical.
        REQUIRE(emit_dimacs(back) == text);
    }
}

TEST_CASE("certificate files round-trip bit-exactly") {
    selftest::WorkedExample ex;
    Json j = certificate_to_json(ex.cert);
    std::string text = j.dump(1);
    // Fresh session: variables are resolved by name.
    Session s2;
    LinearIpsCertificate back = certificate_from_json(Json::parse(text), s2.table);
    REQUIRE(certificate_to_json(back).dump(1) == text);
    auto v = verify_certificate(back, VerifyMode::Expand, s2.config, s2.rng);
    REQUIRE(v.valid);
    REQUIRE(v.width == 1);
}

TEST_CASE("system files round-trip") {
    selftest::WorkedExample ex;
    Json j = system_to_json(ex.system);
    Session s2;
    PolySystem back = system_from_json(j, s2.table);
    REQUIRE(back.entries.size() == ex.system.entries.size());
    REQUIRE(system_to_json(back).dump() == j.dump());
    back.validate();
}

TEST_CASE("span program files round-trip, labels included") {
    Session s;
    VarId z1 = s.var("z1"), z2 = s.var("z2");
    SpanProgram prog(s.field, s.table, s.one());
    prog.z_vars = {z1, z2};
    prog.add(SpanLabel::pos(z1), s.poly("x1"));
    prog.add(SpanLabel::neg(z2), s.poly("1 - x1"));
    prog.add(SpanLabel::one(), s.poly("x1^2"));
    Json j = span_to_json(prog);
    Session s2;
    SpanProgram back = span_from_json(j, s2.table);
    REQUIRE(span_to_json(back).dump() == j.dump());
    REQUIRE(back.entries.size() == 3);
    REQUIRE(back.entries[0].label.kind == SpanLabel::Kind::Pos);
    REQUIRE(back.entries[1].label.kind == SpanLabel::Kind::Neg);
    REQUIRE(back.entries[2].label.kind == SpanLabel::Kind::Const1);
}

TEST_CASE("roABP serialization keeps layers and constants") {
    Session s;
    VarId a = s.var("a"), b = s.var("b");
    Roabp r = Roabp::from_sparse(s.poly("a*b + 2*a + 1"), {a, b});
    Json j = roabp_to_json(r);
    Roabp back = roabp_from_json(j, s.field, s.table);
    REQUIRE(back.expand() == r.expand());
    REQUIRE(back.width() == r.width());
    Roabp cst(s.field, s.table, s.field.from_int(5));
    Json jc = roabp_to_json(cst);
    REQUIRE(roabp_from_json(jc, s.field, s.table).constant_value() == s.field.from_int(5));
}

TEST_CASE("PC proof files round-trip") {
    Session s;
    VarId x = s.var("x1");
    PcProof proof;
    proof.lines.push_back({s.poly("x1"), PcAxiomRule{0}});
    proof.lines.push_back({s.poly("x1^2"), PcMulRule{0, x}});
    proof.lines.push_back(
        {s.poly("x1^2 + x1"), PcLinRule{1, 0, s.field.one(), s.field.one()}});
    Json j = pcproof_to_json(proof, s.field, s.table);
    Session s2;
    PcProof back = pcproof_from_json(j, s2.table);
    REQUIRE(back.lines.size() == 3);
    REQUIRE(pcproof_to_json(back, s2.field, s2.table).dump() == j.dump());
}

TEST_CASE("lift sidecar lists selectors with their partial maps") {
    Session s;
    Cnf phi;
    phi.table = s.table;
    VarId a = s.var("a"), b = s.var("b"), c = s.var("c");
    phi.vars = {a, b, c};
    phi.clauses.push_back(Clause{{{a, true}, {b, true}, {c, true}}});
    LiftedFormula L = lift(phi, s);
    Json j = lift_index_to_json(L);
    REQUIRE(j.at("selectors").size() == 6);
    REQUIRE(j.at("N").get<std::size_t>() == 3);
    for (const auto& sel : j.at("selectors")) REQUIRE(sel.at("pi").size() == 3);
}

TEST_CASE("rational certificates survive serialization") {
    Config cfg;
    cfg.rational_field = true;
    selftest::WorkedExample ex(cfg);
    Json j = certificate_to_json(ex.cert);
    Session s2(cfg);
    LinearIpsCertificate back = certificate_from_json(j, s2.table);
    REQUIRE(verify_certificate(back, VerifyMode::Expand, s2.config, s2.rng).valid);
    REQUIRE(certificate_to_json(back).dump(1) == j.dump(1));
}
