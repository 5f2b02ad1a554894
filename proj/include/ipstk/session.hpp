#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>

#include "ipstk/field.hpp"
#include "ipstk/poly.hpp"
#include "ipstk/vartable.hpp"

namespace ipstk {

/// Desk-scale budgets and reproducibility knobs shared across the toolkit.
struct Config {
    std::uint64_t field_modulus = (std::uint64_t{1} << 31) - 1;
    bool rational_field = false;

    std::size_t expansion_budget = 2'000'000; // max terms while expanding an roABP
    int enumeration_budget = 24;              // max Boolean variables for brute force
    std::size_t sat_node_budget = 4'000'000;  // search nodes in the sat oracle
    int randomized_trials = 8;
    std::uint64_t seed = 1;
    std::size_t ns_column_budget = 20'000; // unknowns in the Nullstellensatz solver
    std::size_t ns_row_budget = 200'000;
    std::uint32_t max_normal_degree = 64; // degree bound for nonmonotone normal form
    int interpolant_z_budget = 16;        // exhaustive z-assignments in the checker

    Field make_field() const {
        return rational_field ? Field::rationals() : Field::prime(field_modulus);
    }
};

/// One session owns the variable table, the field, the configuration, and the
/// seeded RNG. All values created through it are mutually compatible.
class Session {
public:
    explicit Session(Config cfg = Config{})
        : config(cfg),
          field(cfg.make_field()),
          table(std::make_shared<VarTable>()),
          rng(cfg.seed) {}

    VarId var(const std::string& name) { return table->intern(name); }

    SparsePoly poly(const std::string& text) {
        return SparsePoly::parse(text, field, table);
    }
    SparsePoly zero() const { return SparsePoly::zero(field, table); }
    SparsePoly one() const { return SparsePoly::constant(field, table, 1); }
    SparsePoly constant(long long c) const { return SparsePoly::constant(field, table, c); }
    SparsePoly var_poly(VarId v) const { return SparsePoly::variable(field, table, v); }

    Config config;
    Field field;
    VarTablePtr table;
    std::mt19937_64 rng;
};

} // namespace ipstk
