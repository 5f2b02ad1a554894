// Command-line surface for the roABP linear-IPS toolkit: instance
// generators, certificate builders and verifiers, interpolant extraction,
// and the lifting/restriction pipeline.
//
// Exit codes: 0 success/valid, 1 invalid but well-formed (failed
// verification, no refutation found, budget exceeded), 2 usage or parse
// errors.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ipstk/io.hpp"
#include "ipstk/selftest.hpp"

using namespace ipstk;

namespace {

Config make_config(const std::string& field_spec, std::size_t budget, int trials,
                   std::uint64_t seed) {
    Config cfg;
    if (field_spec == "rational") {
        cfg.rational_field = true;
    } else {
        cfg.rational_field = false;
        cfg.field_modulus = std::stoull(field_spec);
    }
    cfg.expansion_budget = budget;
    cfg.randomized_trials = trials;
    cfg.seed = seed;
    return cfg;
}

std::vector<VarId> parse_order(const std::string& spec, Session& sess) {
    std::vector<VarId> order;
    std::stringstream ss(spec);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (!name.empty()) order.push_back(sess.var(name));
    }
    return order;
}

/// Deterministic default order: x-block (x, aux) first, then y, then z,
/// each sorted by name.
std::vector<VarId> default_order(const PolySystem& sys) {
    std::vector<std::pair<std::pair<int, std::string>, VarId>> keyed;
    for (const auto& [v, r] : sys.roles) {
        int rank = 0;
        if (r == VarRole::Y) rank = 1;
        if (r == VarRole::Z) rank = 2;
        keyed.push_back({{rank, sys.table->name(v)}, v});
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<VarId> order;
    for (const auto& [k, v] : keyed) order.push_back(v);
    return order;
}

std::map<VarId, bool> parse_assignment(const std::string& spec, Session& sess) {
    std::map<VarId, bool> alpha;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected name=0/1 in assignment: " + item);
        std::string name = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        if (val != "0" && val != "1")
            throw std::invalid_argument("assignment values must be 0 or 1");
        alpha[sess.var(name)] = val == "1";
    }
    return alpha;
}

TseitinInstance parse_graph_file(const std::string& path) {
    TseitinInstance inst;
    std::istringstream in(read_file(path));
    std::string line;
    int max_vertex = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first[0] == '#') continue;
        if (first == "charge") {
            int b;
            while (ls >> b) inst.charge.push_back(b);
            continue;
        }
        int u = std::stoi(first), v;
        if (!(ls >> v)) throw std::invalid_argument("graph edge line needs two endpoints");
        inst.edges.emplace_back(u, v);
        max_vertex = std::max({max_vertex, u, v});
    }
    if (inst.charge.empty()) throw std::invalid_argument("graph file is missing a charge line");
    inst.nverts = std::max<int>(max_vertex, static_cast<int>(inst.charge.size()));
    inst.charge.resize(inst.nverts, 0);
    inst.check();
    return inst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"roABP linear-IPS refutation toolkit"};
    app.require_subcommand(1);

    const char* env_field = std::getenv("IPSTK_FIELD");
    std::string field_spec = env_field ? env_field : "2147483647";
    std::size_t budget = 2'000'000;
    int trials = 8;
    std::uint64_t seed = 1;
    app.add_option("--field", field_spec, "prime field modulus or 'rational'")
        ->capture_default_str();
    app.add_option("--budget", budget, "expansion term budget")->capture_default_str();
    app.add_option("--trials", trials, "randomized verification trials")->capture_default_str();
    app.add_option("--seed", seed, "random seed")->capture_default_str();

    // translate
    auto* c_translate = app.add_subcommand("translate", "translate a DIMACS CNF to a polynomial system");
    std::string tr_cnf, tr_out;
    c_translate->add_option("--cnf", tr_cnf, "input DIMACS file")->required();
    c_translate->add_option("--out", tr_out, "output system JSON")->required();

    // gen-split
    auto* c_gensplit = app.add_subcommand("gen-split", "emit the GEN_n split formulas");
    int gs_n = 2;
    std::string gs_phi0, gs_phi1, gs_system;
    c_gensplit->add_option("--n", gs_n, "GEN parameter")->required();
    c_gensplit->add_option("--out-phi0", gs_phi0, "output DIMACS for phi0")->required();
    c_gensplit->add_option("--out-phi1", gs_phi1, "output DIMACS for phi1")->required();
    c_gensplit->add_option("--out-system", gs_system, "optional combined split system JSON");

    // lift
    auto* c_lift = app.add_subcommand("lift", "lift a 3-CNF into Psi = Phi1 ^ Phi2");
    std::string lf_cnf, lf_out, lf_index;
    bool lf_split_wide = false;
    c_lift->add_option("--cnf", lf_cnf, "input DIMACS file")->required();
    c_lift->add_option("--out", lf_out, "output DIMACS for Psi")->required();
    c_lift->add_option("--index", lf_index, "output selector sidecar JSON")->required();
    c_lift->add_flag("--split-wide", lf_split_wide, "split wide exactly-one clauses into 3-CNF");

    // restrict
    auto* c_restrict = app.add_subcommand("restrict", "order-restriction of a lifted formula");
    std::string rs_cnf, rs_order, rs_cert, rs_out_cert, rs_out;
    std::uint64_t rs_order_seed = 0;
    bool rs_have_seed = false;
    c_restrict->add_option("--cnf", rs_cnf, "base DIMACS file (lift is re-derived)")->required();
    c_restrict->add_option("--order", rs_order, "comma-separated variable order on u,v");
    c_restrict->add_option("--order-seed", rs_order_seed, "shuffle the order from this seed")
        ->each([&](const std::string&) { rs_have_seed = true; });
    c_restrict->add_option("--cert", rs_cert, "optional Psi certificate JSON to restrict");
    c_restrict->add_option("--out-cert", rs_out_cert, "output restricted certificate JSON");
    c_restrict->add_option("--out", rs_out, "output restriction JSON")->required();

    // verify
    auto* c_verify = app.add_subcommand("verify", "verify a certificate file");
    std::string vf_cert, vf_mode = "expand";
    c_verify->add_option("--cert", vf_cert, "certificate JSON")->required();
    c_verify->add_option("--mode", vf_mode, "expand | randomized")->capture_default_str();

    // ns-solve
    auto* c_ns = app.add_subcommand("ns-solve", "search a Nullstellensatz refutation by degree");
    std::string ns_system, ns_order = "auto", ns_out;
    std::uint32_t ns_degree = 2;
    c_ns->add_option("--system", ns_system, "system JSON")->required();
    c_ns->add_option("--degree", ns_degree, "degree bound on q_i * p_i")->required();
    c_ns->add_option("--order", ns_order, "variable order (names) or 'auto'")
        ->capture_default_str();
    c_ns->add_option("--out", ns_out, "output certificate JSON")->required();

    // normal-form
    auto* c_nf = app.add_subcommand("normal-form", "rewrite a P0 system into z-normal form");
    std::string nf_system, nf_mode = "nonmonotone", nf_out, nf_derivations;
    c_nf->add_option("--system", nf_system, "P0 system JSON")->required();
    c_nf->add_option("--mode", nf_mode, "nonmonotone | monotone")->capture_default_str();
    c_nf->add_option("--out", nf_out, "output normalized system JSON")->required();
    c_nf->add_option("--derivations", nf_derivations, "output derivations JSON (array)");

    // extract-interpolant
    auto* c_extract = app.add_subcommand("extract-interpolant",
                                         "extract the span-program interpolant");
    std::string ex_cert, ex_mode = "nonmonotone", ex_out;
    c_extract->add_option("--cert", ex_cert, "refutation certificate JSON")->required();
    c_extract->add_option("--mode", ex_mode, "normal-form mode of P0: nonmonotone | monotone")
        ->capture_default_str();
    c_extract->add_option("--out", ex_out, "output span program JSON")->required();

    // check-interpolant
    auto* c_check = app.add_subcommand("check-interpolant",
                                       "exhaustively check a span program against a split system");
    std::string ck_span, ck_system;
    c_check->add_option("--span", ck_span, "span program JSON")->required();
    c_check->add_option("--system", ck_system, "split system JSON with P0/P1 tags")->required();

    // eval-span
    auto* c_eval = app.add_subcommand("eval-span", "evaluate a span program on a z-assignment");
    std::string ev_span, ev_assign;
    c_eval->add_option("--span", ev_span, "span program JSON")->required();
    c_eval->add_option("--assign", ev_assign, "assignment, e.g. z1=1,z2=0")->required();

    // build-tseitin
    auto* c_tseitin = app.add_subcommand("build-tseitin", "refute a Tseitin instance");
    std::string ts_graph, ts_out;
    std::uint64_t ts_order_seed = 0;
    bool ts_have_seed = false;
    c_tseitin->add_option("--graph", ts_graph, "edge-list file with a charge line")->required();
    c_tseitin->add_option("--order-seed", ts_order_seed, "shuffle the edge order from this seed")
        ->each([&](const std::string&) { ts_have_seed = true; });
    c_tseitin->add_option("--out", ts_out, "output certificate JSON")->required();

    // build-fphp
    auto* c_fphp = app.add_subcommand("build-fphp", "refute the functional pigeonhole principle");
    int fp_n = 2;
    std::string fp_out;
    c_fphp->add_option("--n", fp_n, "holes (pigeons = n+1)")->required();
    c_fphp->add_option("--out", fp_out, "output certificate JSON")->required();

    // simulate-pc
    auto* c_pc = app.add_subcommand("simulate-pc", "convert a tree-like PC proof");
    std::string pc_proof, pc_system, pc_order = "auto", pc_out;
    c_pc->add_option("--proof", pc_proof, "PC proof JSON")->required();
    c_pc->add_option("--system", pc_system, "axiom system JSON")->required();
    c_pc->add_option("--order", pc_order, "variable order or 'auto'")->capture_default_str();
    c_pc->add_option("--out", pc_out, "output certificate JSON")->required();

    // selftest
    auto* c_selftest = app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Config cfg = make_config(field_spec, budget, trials, seed);

        if (*c_translate) {
            Session sess(cfg);
            std::vector<std::string> warnings;
            Cnf cnf = parse_dimacs(read_file(tr_cnf), sess.table, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            PolySystem sys = translate_cnf(cnf, sess.field);
            save_json(tr_out, system_to_json(sys));
            std::cout << "translated " << cnf.num_clauses() << " clauses over "
                      << cnf.num_vars() << " variables\n";
            return 0;
        }
        if (*c_gensplit) {
            Session sess(cfg);
            GenSplit gs = gen_split_formula(gs_n, sess);
            write_file(gs_phi0, emit_dimacs(gs.phi0, true));
            write_file(gs_phi1, emit_dimacs(gs.phi1, true));
            if (!gs_system.empty()) {
                std::set<VarId> zset(gs.z_vars.begin(), gs.z_vars.end());
                save_json(gs_system,
                          system_to_json(make_split_system(gs.phi0, gs.phi1, zset, sess.field)));
            }
            std::cout << "gen-split n=" << gs_n << ": |z|=" << gs.z_vars.size()
                      << " |x|=" << gs.x_vars.size() << " |y|=" << gs.y_vars.size() << "\n";
            return 0;
        }
        if (*c_lift) {
            Session sess(cfg);
            Cnf cnf = parse_dimacs(read_file(lf_cnf), sess.table);
            LiftOptions opt;
            opt.split_wide_clauses = lf_split_wide;
            LiftedFormula L = lift(cnf, sess, opt);
            write_file(lf_out, emit_dimacs(L.psi, true));
            save_json(lf_index, lift_index_to_json(L));
            std::cout << "lifted: N=" << L.N << " M=" << L.M << " selectors=" << L.u_vars.size()
                      << " clauses=" << L.psi.num_clauses() << "\n";
            return 0;
        }
        if (*c_restrict) {
            Session sess(cfg);
            Cnf cnf = parse_dimacs(read_file(rs_cnf), sess.table);
            LiftedFormula L = lift(cnf, sess);
            std::vector<VarId> order;
            if (!rs_order.empty()) {
                order = parse_order(rs_order, sess);
            } else {
                order = L.psi.vars;
                std::mt19937_64 rng(rs_have_seed ? rs_order_seed : seed);
                std::shuffle(order.begin(), order.end(), rng);
            }
            LiftRestriction rho = restriction_for_order(L, order);
            Json j;
            j["kind"] = "lift-restriction";
            Json ju = Json::object();
            for (const auto& [u, b] : rho.u_assign) ju[sess.table->name(u)] = b ? 1 : 0;
            j["u_assign"] = std::move(ju);
            Json jr = Json::object();
            for (const auto& [v, x] : rho.v_rename) jr[sess.table->name(v)] = sess.table->name(x);
            j["v_rename"] = std::move(jr);
            Json jo = Json::array();
            for (VarId v : rho.restricted_order) jo.push_back(sess.table->name(v));
            j["restricted_order"] = std::move(jo);
            save_json(rs_out, j);
            if (!rs_cert.empty()) {
                if (rs_out_cert.empty())
                    throw std::invalid_argument("--cert requires --out-cert");
                LinearIpsCertificate cert =
                    certificate_from_json(load_json(rs_cert), sess.table);
                LinearIpsCertificate rcert =
                    apply_restriction_to_certificate(cert, L, rho, cfg);
                save_json(rs_out_cert, certificate_to_json(rcert));
                std::cout << "restricted certificate width " << rcert.width() << " (from "
                          << cert.width() << ")\n";
            }
            return 0;
        }
        if (*c_verify) {
            Session sess(cfg);
            LinearIpsCertificate cert = certificate_from_json(load_json(vf_cert), sess.table);
            VerifyMode mode =
                vf_mode == "randomized" ? VerifyMode::Randomized : VerifyMode::Expand;
            auto res = verify_certificate(cert, mode, cfg, sess.rng);
            std::cout << res.report << "\n";
            return res.valid ? 0 : 1;
        }
        if (*c_ns) {
            Session sess(cfg);
            PolySystem sys = system_from_json(load_json(ns_system), sess.table);
            std::vector<VarId> order =
                ns_order == "auto" ? default_order(sys) : parse_order(ns_order, sess);
            auto cert = find_ns_refutation(sys, ns_degree, order, cfg);
            if (!cert) {
                std::cout << "no refutation at degree " << ns_degree << "\n";
                return 1;
            }
            save_json(ns_out, certificate_to_json(*cert));
            std::cout << "refutation found, width " << cert->width() << "\n";
            return 0;
        }
        if (*c_nf) {
            Session sess(cfg);
            PolySystem sys = system_from_json(load_json(nf_system), sess.table);
            NormalMode mode =
                nf_mode == "monotone" ? NormalMode::Monotone : NormalMode::Nonmonotone;
            NormalFormResult nf = to_znormal(sys, mode, cfg);
            save_json(nf_out, system_to_json(nf.normalized));
            if (!nf_derivations.empty()) {
                Json arr = Json::array();
                for (const auto& d : nf.derivations) arr.push_back(certificate_to_json(d));
                save_json(nf_derivations, arr);
            }
            std::cout << "normalized " << sys.entries.size() << " polynomials with "
                      << nf.aux_vars.size() << " auxiliary variables\n";
            return 0;
        }
        if (*c_extract) {
            Session sess(cfg);
            LinearIpsCertificate cert = certificate_from_json(load_json(ex_cert), sess.table);
            NormalMode mode =
                ex_mode == "monotone" ? NormalMode::Monotone : NormalMode::Nonmonotone;
            // Runs the normal-form rewrite first when P0 needs it.
            ExtractionPipeline pipe = extract_with_normal_form(cert, mode, cfg);
            save_json(ex_out, span_to_json(pipe.program));
            std::cout << "span program with " << pipe.program.size() << " entries, "
                      << (is_monotone(pipe.program) ? "monotone" : "non-monotone")
                      << (pipe.normalized ? " (normal-form rewrite applied)" : "") << "\n";
            return 0;
        }
        if (*c_check) {
            Session sess(cfg);
            SpanProgram prog = span_from_json(load_json(ck_span), sess.table);
            PolySystem sys = system_from_json(load_json(ck_system), sess.table);
            auto res = check_interpolant(prog, sys.subsystem(Part::P0), sys.subsystem(Part::P1),
                                         cfg);
            if (res.ok) {
                std::cout << "interpolant check passed on all "
                          << (std::size_t{1} << prog.z_vars.size()) << " assignments\n";
                return 0;
            }
            std::cout << "counterexample (" << res.failed_direction << "):";
            for (const auto& [v, b] : *res.counterexample)
                std::cout << ' ' << sess.table->name(v) << '=' << (b ? 1 : 0);
            std::cout << "\n";
            return 1;
        }
        if (*c_eval) {
            Session sess(cfg);
            SpanProgram prog = span_from_json(load_json(ev_span), sess.table);
            auto alpha = parse_assignment(ev_assign, sess);
            std::cout << (span_eval(prog, alpha) ? 1 : 0) << "\n";
            return 0;
        }
        if (*c_tseitin) {
            Session sess(cfg);
            TseitinInstance inst = parse_graph_file(ts_graph);
            std::vector<std::size_t> order(inst.edges.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            if (ts_have_seed) {
                std::mt19937_64 rng(ts_order_seed);
                std::shuffle(order.begin(), order.end(), rng);
            }
            auto cert = refute_tseitin(inst, sess, order);
            save_json(ts_out, certificate_to_json(cert));
            std::cout << "Tseitin refutation over " << inst.edges.size() << " edges, width "
                      << cert.width() << "\n";
            return 0;
        }
        if (*c_fphp) {
            Session sess(cfg);
            auto cert = refute_fphp(fp_n, sess);
            save_json(fp_out, certificate_to_json(cert));
            std::cout << "FPHP refutation for n=" << fp_n << ", width " << cert.width() << "\n";
            return 0;
        }
        if (*c_pc) {
            Session sess(cfg);
            PolySystem sys = system_from_json(load_json(pc_system), sess.table);
            PcProof proof = pcproof_from_json(load_json(pc_proof), sess.table);
            std::vector<VarId> order =
                pc_order == "auto" ? default_order(sys) : parse_order(pc_order, sess);
            auto cert = simulate_treelike_pc(proof, sys, order, cfg);
            save_json(pc_out, certificate_to_json(cert));
            std::cout << "simulated " << proof.lines.size() << " PC lines, width "
                      << cert.width() << "\n";
            return 0;
        }
        if (*c_selftest) {
            auto results = run_acceptance(std::cout);
            for (const auto& r : results)
                if (!r.passed) return 1;
            return 0;
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 1;
    } catch (const Json::exception& e) {
        std::cerr << "file format error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
