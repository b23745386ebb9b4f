#pragma once

#include <cstdint>

#include "sepiter/tensor_core.hpp"

namespace sepiter {

struct OracleConfig {
    int population = 64;
    int generations = 500;
    double mutation_scale = 0.3;
    int restarts = 8;
    std::uint64_t seed = 0;
    int refine_iters = 200;
    int threads = 1;

    void validate() const;
};

/// Best product state found by a stochastic search. `g` is a lower bound on
/// the maximal separability eigenvalue.
struct OracleResult {
    double g = 0.0;
    ProductState state;
    std::size_t best_restart = 0;
    long evaluations = 0;
};

/// Genetic search over hyperspherical product-state coordinates with fitness
/// -<a|L|a>, followed by cyclic_refine on the best individual of each restart.
OracleResult oracle_gmax(const MultipartiteOperator& op, const OracleConfig& cfg);

/// Sweeps j = 1..N replacing a_j by the dominant eigenvector of the reduced
/// operator; stops after `iters` sweeps or when a sweep gains < 1e-15.
ProductState cyclic_refine(const MultipartiteOperator& op, const ProductState& state, int iters);

/// Product state from 2 d_j - 2 real coordinates per factor: d_j - 1
/// hyperspherical angles, then d_j - 1 relative phases.
ProductState product_from_angles(const SubsystemDims& dims, const std::vector<double>& params);
std::size_t angle_parameter_count(const SubsystemDims& dims);

}  // namespace sepiter
