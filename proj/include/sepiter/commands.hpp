#pragma once

// Command implementations behind the `sepiter` executable. Each returns the
// documents it would write so that tests can inspect them without files.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sepiter/io.hpp"
#include "sepiter/oracle.hpp"
#include "sepiter/partition.hpp"
#include "sepiter/see_solver.hpp"
#include "sepiter/witness.hpp"

namespace sepiter {

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitNoConvergence = 2 };

json spi_config_to_json(const SpiConfig& cfg);
json oracle_config_to_json(const OracleConfig& cfg);

/// Reproduction record written next to every output file.
struct RunManifest {
    std::string command_line;
    json config = json::object();
    json seeds = json::object();
    std::map<std::string, double> timings;

    [[nodiscard]] json to_json() const;
};

struct SolveOutput {
    json result;
    int exit_code = kExitOk;
    double solver_seconds = 0.0;
};

/// Coarse-grains by `partition` (finest if absent) and maximizes.
SolveOutput run_solve(const MultipartiteOperator& op, const std::optional<Partition>& partition,
                      const SpiConfig& cfg);

struct WitnessTestOutput {
    json result;
    double solver_seconds = 0.0;
};

WitnessTestOutput run_witness_test(const MultipartiteOperator& L, const DensityOperator& rho,
                                   const std::optional<Partition>& partition, const SpiConfig& cfg);

struct CsvOutput {
    std::string filename;
    CsvWriter csv;
    double solver_seconds = 0.0;
};

/// The four symmetry-reduced partitions of the Smolin state.
std::vector<Partition> smolin_partitions();

/// partition_scan.csv: partition,g_max,trace,entangled
CsvOutput reproduce_smolin(const SpiConfig& cfg);

/// horodecki_grid.csv: alpha,beta,g_beta,trace,detected
CsvOutput reproduce_horodecki(const SpiConfig& cfg, double alpha_step = 0.1, double beta_step = 0.1);

/// Pair with |<a_1|a_2>|^2 = gamma2: a_1 = |0>, a_2 = sqrt(gamma2)|0> + sqrt(1-gamma2)|1>.
ProductState swap_start_state(double gamma2);

/// swap_recurrence.csv: s,gamma2,recurrence,bound,g for s = 0..cycles.
CsvOutput reproduce_swap_recurrence(const SpiConfig& cfg, double gamma2 = 0.5, int cycles = 10);

enum class BenchMode { Dims, Parties };

struct BenchRow {
    int size = 0;
    int sample = 0;
    std::string method;
    double g = 0.0;
    double seconds = 0.0;
    bool converged = true;
};

struct BenchSummary {
    int size = 0;
    double spi_mean_seconds = 0.0;
    double oracle_mean_seconds = 0.0;
    double max_abs_delta_g = 0.0;
};

struct BenchOutput {
    std::vector<BenchRow> rows;
    std::vector<BenchSummary> summary;
    [[nodiscard]] CsvWriter rows_csv(BenchMode mode) const;
    [[nodiscard]] CsvWriter summary_csv() const;
};

/// Dims mode: N = 2 with d_1 = d_2 = size. Parties mode: `size` qubits.
SubsystemDims bench_dims(BenchMode mode, int size);

/// Both methods run on the identical random operator per (size, sample).
BenchOutput run_bench(BenchMode mode, const std::vector<int>& sizes, int samples, std::uint64_t seed,
                      const SpiConfig& spi, const OracleConfig& oracle);

/// smolin | horodecki:<alpha> | swap:<d> | random:<d1>x<d2>...:<seed> (',' also separates dims)
json export_named_operator(const std::string& name);

}  // namespace sepiter
