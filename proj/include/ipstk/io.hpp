#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ipstk/certificate.hpp"
#include "ipstk/instances.hpp"
#include "ipstk/spanprog.hpp"
#include "ipstk/upperbounds.hpp"

namespace ipstk {

/// Insertion-ordered JSON keeps emitted files canonical, so emit-parse-emit
/// is byte-stable.
using Json = nlohmann::ordered_json;

inline Json field_to_json(const Field& f) {
    return f.is_rational() ? Json("rational") : Json(std::to_string(f.modulus()));
}

inline Field field_from_json(const Json& j) {
    std::string s = j.get<std::string>();
    if (s == "rational") return Field::rationals();
    return Field::prime(std::stoull(s));
}

inline std::string role_to_string(VarRole r) {
    switch (r) {
        case VarRole::X: return "x";
        case VarRole::Y: return "y";
        case VarRole::Z: return "z";
        case VarRole::AuxW: return "aux_w";
        case VarRole::AuxField: return "aux_field";
    }
    return "x";
}

inline VarRole role_from_string(const std::string& s) {
    if (s == "x") return VarRole::X;
    if (s == "y") return VarRole::Y;
    if (s == "z") return VarRole::Z;
    if (s == "aux_w") return VarRole::AuxW;
    if (s == "aux_field") return VarRole::AuxField;
    throw std::invalid_argument("unknown variable role: " + s);
}

inline Json variables_to_json(const std::map<VarId, VarRole>& roles, const VarTablePtr& t) {
    Json arr = Json::array();
    for (const auto& [v, r] : roles)
        arr.push_back(Json{{"name", t->name(v)}, {"role", role_to_string(r)}});
    return arr;
}

inline Json system_to_json(const PolySystem& s) {
    Json j;
    j["kind"] = "polynomial-system";
    j["field"] = field_to_json(s.field);
    j["variables"] = variables_to_json(s.roles, s.table);
    Json entries = Json::array();
    for (const auto& e : s.entries) {
        Json je;
        je["poly"] = e.poly.str();
        je["axiom_kind"] = e.kind == AxKind::BooleanAxiom ? "boolean" : "axiom";
        je["part"] = e.part == Part::P0 ? "p0" : (e.part == Part::P1 ? "p1" : "");
        je["label"] = e.label;
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    return j;
}

inline PolySystem system_from_json(const Json& j, const VarTablePtr& t) {
    Field f = field_from_json(j.at("field"));
    PolySystem s(f, t);
    for (const auto& jv : j.at("variables"))
        s.set_role(t->intern(jv.at("name").get<std::string>()),
                   role_from_string(jv.at("role").get<std::string>()));
    for (const auto& je : j.at("entries")) {
        SparsePoly p = SparsePoly::parse(je.at("poly").get<std::string>(), f, t);
        AxKind k = je.at("axiom_kind").get<std::string>() == "boolean" ? AxKind::BooleanAxiom
                                                                       : AxKind::Axiom;
        std::string part = je.at("part").get<std::string>();
        Part pt = part == "p0" ? Part::P0 : (part == "p1" ? Part::P1 : Part::Untagged);
        s.add(std::move(p), k, pt, je.value("label", std::string{}));
    }
    return s;
}

inline Json roabp_to_json(const Roabp& r) {
    Json j;
    if (r.is_constant_program()) {
        j["constant"] = r.constant_value().str();
        return j;
    }
    Json order = Json::array();
    for (VarId v : r.order()) order.push_back(r.table()->name(v));
    j["order"] = std::move(order);
    Json layers = Json::array();
    for (const auto& m : r.layers()) {
        Json jm;
        jm["rows"] = m.rows;
        jm["cols"] = m.cols;
        Json rows = Json::array();
        for (std::size_t i = 0; i < m.rows; ++i) {
            Json row = Json::array();
            for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m.at(i, c).str());
            rows.push_back(std::move(row));
        }
        jm["entries"] = std::move(rows);
        layers.push_back(std::move(jm));
    }
    j["layers"] = std::move(layers);
    return j;
}

inline Roabp roabp_from_json(const Json& j, const Field& f, const VarTablePtr& t) {
    if (j.contains("constant")) return Roabp(f, t, f.parse(j.at("constant").get<std::string>()));
    std::vector<VarId> order;
    for (const auto& jv : j.at("order")) order.push_back(t->intern(jv.get<std::string>()));
    std::vector<PolyMatrix> layers;
    for (const auto& jm : j.at("layers")) {
        PolyMatrix m(jm.at("rows").get<std::size_t>(), jm.at("cols").get<std::size_t>(),
                     SparsePoly::zero(f, t));
        const auto& rows = jm.at("entries");
        for (std::size_t i = 0; i < m.rows; ++i)
            for (std::size_t c = 0; c < m.cols; ++c)
                m.at(i, c) = SparsePoly::parse(rows.at(i).at(c).get<std::string>(), f, t);
        layers.push_back(std::move(m));
    }
    return Roabp(f, t, std::move(order), std::move(layers));
}

inline Json certificate_to_json(const LinearIpsCertificate& c) {
    Json j;
    j["kind"] = "linear-ips-certificate";
    j["field"] = field_to_json(c.system.field);
    j["variables"] = variables_to_json(c.system.roles, c.system.table);
    Json order = Json::array();
    for (VarId v : c.order) order.push_back(c.system.table->name(v));
    j["order"] = std::move(order);
    j["axioms"] = system_to_json(c.system)["entries"];
    Json coeffs = Json::array();
    for (const auto& r : c.coefficients) coeffs.push_back(roabp_to_json(r));
    j["coefficients"] = std::move(coeffs);
    j["target"] = c.target.str();
    j["width"] = c.width(); // informational; always recomputed on load
    return j;
}

inline LinearIpsCertificate certificate_from_json(const Json& j, const VarTablePtr& t) {
    Field f = field_from_json(j.at("field"));
    Json sysj;
    sysj["field"] = j.at("field");
    sysj["variables"] = j.at("variables");
    sysj["entries"] = j.at("axioms");
    PolySystem sys = system_from_json(sysj, t);
    std::vector<VarId> order;
    for (const auto& jv : j.at("order")) order.push_back(t->intern(jv.get<std::string>()));
    std::vector<Roabp> coeffs;
    for (const auto& jc : j.at("coefficients")) coeffs.push_back(roabp_from_json(jc, f, t));
    SparsePoly target = SparsePoly::parse(j.at("target").get<std::string>(), f, t);
    return LinearIpsCertificate(std::move(sys), std::move(order), std::move(coeffs),
                                std::move(target));
}

inline Json span_to_json(const SpanProgram& s) {
    Json j;
    j["kind"] = "span-program";
    j["field"] = field_to_json(s.field);
    Json zs = Json::array();
    for (VarId v : s.z_vars) zs.push_back(s.table->name(v));
    j["z"] = std::move(zs);
    Json entries = Json::array();
    for (const auto& e : s.entries) {
        std::string label = "1";
        if (e.label.kind == SpanLabel::Kind::Pos) label = s.table->name(e.label.var);
        if (e.label.kind == SpanLabel::Kind::Neg) label = "~" + s.table->name(e.label.var);
        entries.push_back(Json{{"label", label}, {"vector", e.vector.str()}});
    }
    j["entries"] = std::move(entries);
    j["target"] = s.target.str();
    return j;
}

inline SpanProgram span_from_json(const Json& j, const VarTablePtr& t) {
    Field f = field_from_json(j.at("field"));
    SpanProgram s(f, t, SparsePoly::parse(j.at("target").get<std::string>(), f, t));
    for (const auto& jz : j.at("z")) s.z_vars.insert(t->intern(jz.get<std::string>()));
    for (const auto& je : j.at("entries")) {
        std::string label = je.at("label").get<std::string>();
        SparsePoly vec = SparsePoly::parse(je.at("vector").get<std::string>(), f, t);
        if (label == "1") s.add(SpanLabel::one(), std::move(vec));
        else if (!label.empty() && label[0] == '~')
            s.add(SpanLabel::neg(t->intern(label.substr(1))), std::move(vec));
        else s.add(SpanLabel::pos(t->intern(label)), std::move(vec));
    }
    return s;
}

inline Json pcproof_to_json(const PcProof& p, const Field& f, const VarTablePtr& t) {
    Json j;
    j["kind"] = "pc-proof";
    j["field"] = field_to_json(f);
    Json lines = Json::array();
    for (const auto& ln : p.lines) {
        Json jl;
        jl["poly"] = ln.poly.str();
        if (auto* ax = std::get_if<PcAxiomRule>(&ln.rule)) {
            jl["rule"] = Json{{"kind", "axiom"}, {"axiom", ax->axiom}};
        } else if (auto* mul = std::get_if<PcMulRule>(&ln.rule)) {
            jl["rule"] = Json{{"kind", "mul"}, {"src", mul->src}, {"var", t->name(mul->var)}};
        } else {
            auto* lin = std::get_if<PcLinRule>(&ln.rule);
            jl["rule"] = Json{{"kind", "lin"},
                              {"src1", lin->src1},
                              {"a", lin->a.str()},
                              {"src2", lin->src2},
                              {"b", lin->b.str()}};
        }
        lines.push_back(std::move(jl));
    }
    j["lines"] = std::move(lines);
    return j;
}

inline PcProof pcproof_from_json(const Json& j, const VarTablePtr& t) {
    Field f = field_from_json(j.at("field"));
    PcProof p;
    for (const auto& jl : j.at("lines")) {
        SparsePoly poly = SparsePoly::parse(jl.at("poly").get<std::string>(), f, t);
        const Json& jr = jl.at("rule");
        std::string kind = jr.at("kind").get<std::string>();
        PcRule rule = PcAxiomRule{0};
        if (kind == "axiom") rule = PcAxiomRule{jr.at("axiom").get<std::size_t>()};
        else if (kind == "mul")
            rule = PcMulRule{jr.at("src").get<std::size_t>(),
                             t->intern(jr.at("var").get<std::string>())};
        else if (kind == "lin")
            rule = PcLinRule{jr.at("src1").get<std::size_t>(), jr.at("src2").get<std::size_t>(),
                             f.parse(jr.at("a").get<std::string>()),
                             f.parse(jr.at("b").get<std::string>())};
        else throw std::invalid_argument("unknown PC rule kind: " + kind);
        p.lines.push_back(PcProof::Line{std::move(poly), rule});
    }
    return p;
}

/// Sidecar for a lifted formula: selector names with their (clause, triple)
/// indices and partial maps, plus the v-variable and base-variable orders.
inline Json lift_index_to_json(const LiftedFormula& L) {
    Json j;
    j["kind"] = "lift-index";
    j["N"] = L.N;
    j["M"] = L.M;
    Json base = Json::array();
    for (VarId v : L.base.vars) base.push_back(L.base.table->name(v));
    j["base_vars"] = std::move(base);
    Json vv = Json::array();
    for (VarId v : L.v_vars) vv.push_back(L.base.table->name(v));
    j["v_vars"] = std::move(vv);
    Json sel = Json::array();
    for (std::size_t c = 0; c < L.M; ++c)
        for (std::size_t t = 0; t < L.K(); ++t) {
            Json js;
            js["name"] = L.base.table->name(L.u_var(c, t));
            js["clause"] = c;
            js["triple"] = Json::array({L.triples[t][0], L.triples[t][1], L.triples[t][2]});
            Json pi = Json::array();
            for (const auto& [vi, x] : L.pi(c, t))
                pi.push_back(Json{{"v", L.base.table->name(L.v_vars[vi])},
                                  {"maps_to", L.base.table->name(x)}});
            js["pi"] = std::move(pi);
            sel.push_back(std::move(js));
        }
    j["selectors"] = std::move(sel);
    return j;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

inline Json load_json(const std::string& path) { return Json::parse(read_file(path)); }

inline void save_json(const std::string& path, const Json& j) {
    write_file(path, j.dump(1) + "\n");
}

} // namespace ipstk
