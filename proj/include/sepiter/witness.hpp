#pragma once

#include <map>
#include <vector>

#include "sepiter/partition.hpp"
#include "sepiter/see_solver.hpp"
#include "sepiter/states.hpp"

namespace sepiter {

/// Values of g_max - tr(L rho) in (-kDetectionMargin, 0) are inconclusive.
inline constexpr double kDetectionMargin = 1e-9;

struct StartSummary {
    std::size_t start_index = 0;
    double g = 0.0;
    double residual = 0.0;
    int cycles = 0;
    bool converged = false;
};

/// W = g_max 1 - L; tr(L rho) > g_max certifies entanglement across `partition`.
struct Witness {
    MultipartiteOperator L;           ///< on the elementary subsystems
    MultipartiteOperator grouped;     ///< L after coarse-graining by the partition
    std::vector<int> permutation;     ///< slot order applied before grouping
    double g_max = 0.0;
    ProductState argmax;              ///< in the grouped dims
    Partition partition;
    StartStrategy strategy = StartStrategy::OperatorBasis;
    SpiConfig config;
    double shift = 0.0;
    std::vector<StartSummary> per_start;
    /// Separability eigenvectors of every start, in the grouped dims.
    std::vector<ProductState> eigenvectors;
};

struct StateTest {
    double value = 0.0;  ///< g_max - tr(L rho)
    double trace = 0.0;  ///< tr(L rho)
    bool entangled = false;
    bool inconclusive = false;
};

Witness build_witness(const MultipartiteOperator& L, const Partition& partition, const SpiConfig& cfg);

StateTest test_state(const Witness& w, const DensityOperator& rho);

struct PartitionRow {
    Partition partition;
    double g_max = 0.0;
    double trace = 0.0;
    bool entangled = false;
    bool inconclusive = false;
};

struct PartitionScan {
    std::vector<PartitionRow> rows;
    /// Number of parties K -> max g_max over the scanned partitions of length K.
    std::map<std::size_t, double> k_bounds;
};

PartitionScan partition_scan(const MultipartiteOperator& L, const DensityOperator& rho,
                             const std::vector<Partition>& partitions, const SpiConfig& cfg);

struct ObservableWitness {
    MultipartiteOperator L;
    double nu = 0.0;
};

/// L = nu 1 + sum_k mu_k M_k with nu from ensure_positive.
ObservableWitness from_observables(const std::vector<MultipartiteOperator>& observables,
                                   const std::vector<double>& coefficients);

struct HorodeckiCell {
    double alpha = 0.0;
    double beta = 0.0;
    double g_beta = 0.0;
    double trace = 0.0;
    bool detected = false;
};

struct HorodeckiGrid {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<HorodeckiCell> cells;  ///< alpha-major
    std::vector<double> g_beta;
    std::vector<bool> detected;        ///< per alpha: some beta detects it
};

/// alpha, beta in [0, 5]; test operators L_beta = rho_beta.
HorodeckiGrid horodecki_grid(const std::vector<double>& alphas, const std::vector<double>& betas,
                             const SpiConfig& cfg);

/// {0, step, 2 step, ...} up to 5 inclusive, computed as k * step.
std::vector<double> uniform_grid(double step, double upper = 5.0);

}  // namespace sepiter
