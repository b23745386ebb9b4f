#include "sepiter/commands.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "sepiter/random.hpp"
#include "sepiter/states.hpp"

namespace sepiter {

namespace {

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

json per_start_table(const std::vector<StartSummary>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"start_index", r.start_index},
                       {"g", r.g},
                       {"residual", r.residual},
                       {"cycles", r.cycles},
                       {"converged", r.converged}});
    return out;
}

}  // namespace

json spi_config_to_json(const SpiConfig& cfg) {
    return {{"epsilon", cfg.epsilon},         {"max_cycles", cfg.max_cycles},
            {"pi_epsilon", cfg.pi_epsilon},   {"pi_max_iters", cfg.pi_max_iters},
            {"start", to_string(cfg.start_strategy)}, {"seed", cfg.seed},
            {"inner_shift", cfg.inner_shift}};
}

json oracle_config_to_json(const OracleConfig& cfg) {
    return {{"population", cfg.population},   {"generations", cfg.generations},
            {"mutation_scale", cfg.mutation_scale}, {"restarts", cfg.restarts},
            {"seed", cfg.seed},               {"refine_iters", cfg.refine_iters}};
}

json RunManifest::to_json() const {
    json t = json::object();
    for (const auto& [k, v] : timings) t[k] = v;
    return {{"command_line", command_line},
            {"version", SEPITER_VERSION},
            {"rng", "mt19937_64+box-muller v" + std::to_string(Rng::kVersion)},
            {"config", config},
            {"seeds", seeds},
            {"timings_seconds", t}};
}

SolveOutput run_solve(const MultipartiteOperator& op, const std::optional<Partition>& partition,
                      const SpiConfig& cfg) {
    const Partition p = partition.value_or(Partition::finest(op.dims().parties()));
    SolveOutput out;
    Stopwatch clock;
    try {
        const Witness w = build_witness(op, p, cfg);
        out.solver_seconds = clock.seconds();
        const auto& best = w.per_start;
        double residual = 0.0;
        for (const auto& r : best)
            if (r.converged && r.g == w.g_max) {
                residual = r.residual;
                break;
            }
        out.result = {{"partition", p.to_string()},
                      {"g_max", w.g_max},
                      {"shift", w.shift},
                      {"residual", residual},
                      {"argmax", product_state_to_json(w.argmax)},
                      {"converged", true},
                      {"per_start", per_start_table(w.per_start)}};
    } catch (const NoConvergenceError& e) {
        out.solver_seconds = clock.seconds();
        out.exit_code = kExitNoConvergence;
        out.result = {{"partition", p.to_string()},
                      {"converged", false},
                      {"error", e.what()},
                      {"best", spi_result_to_json(e.best())}};
    }
    return out;
}

WitnessTestOutput run_witness_test(const MultipartiteOperator& L, const DensityOperator& rho,
                                   const std::optional<Partition>& partition, const SpiConfig& cfg) {
    const Partition p = partition.value_or(Partition::finest(L.dims().parties()));
    Stopwatch clock;
    const Witness w = build_witness(L, p, cfg);
    const StateTest t = test_state(w, rho);
    WitnessTestOutput out;
    out.solver_seconds = clock.seconds();
    out.result = {{"partition", p.to_string()}, {"g_max", w.g_max},           {"trace", t.trace},
                  {"value", t.value},           {"entangled", t.entangled}, {"inconclusive", t.inconclusive}};
    return out;
}

std::vector<Partition> smolin_partitions() {
    return {Partition::parse("1,2|3,4"), Partition::parse("1|2,3,4"), Partition::parse("1|2|3,4"),
            Partition::parse("1|2|3|4")};
}

CsvOutput reproduce_smolin(const SpiConfig& cfg) {
    const DensityOperator s = smolin_state();
    Stopwatch clock;
    const PartitionScan scan = partition_scan(s.as_operator(), s, smolin_partitions(), cfg);
    CsvOutput out{"partition_scan.csv", CsvWriter({"partition", "g_max", "trace", "entangled"}), clock.seconds()};
    for (const auto& r : scan.rows)
        out.csv.row({r.partition.to_string(), format_double(r.g_max), format_double(r.trace), yes_no(r.entangled)});
    return out;
}

CsvOutput reproduce_horodecki(const SpiConfig& cfg, double alpha_step, double beta_step) {
    Stopwatch clock;
    const HorodeckiGrid grid = horodecki_grid(uniform_grid(alpha_step), uniform_grid(beta_step), cfg);
    CsvOutput out{"horodecki_grid.csv", CsvWriter({"alpha", "beta", "g_beta", "trace", "detected"}),
                  clock.seconds()};
    for (const auto& c : grid.cells)
        out.csv.row({format_double(c.alpha), format_double(c.beta), format_double(c.g_beta), format_double(c.trace),
                     yes_no(c.detected)});
    return out;
}

ProductState swap_start_state(double gamma2) {
    if (!(gamma2 >= 0.0 && gamma2 <= 1.0)) throw DomainError("swap_start_state: gamma2 must lie in [0, 1]");
    Vector a1(2), a2(2);
    a1 << 1.0, 0.0;
    a2 << std::sqrt(gamma2), std::sqrt(1.0 - gamma2);
    return ProductState::normalized({a1, a2}, SubsystemDims({2, 2}));
}

CsvOutput reproduce_swap_recurrence(const SpiConfig& cfg, double gamma2, int cycles) {
    const MultipartiteOperator L = swap_operator(2);
    ProductState state = swap_start_state(gamma2);
    Stopwatch clock;
    CsvOutput out{"swap_recurrence.csv", CsvWriter({"s", "gamma2", "recurrence", "bound", "g"}), 0.0};
    double recurrence = gamma2;
    for (int s = 0; s <= cycles; ++s) {
        if (s > 0) {
            state = spi_cycle(L, state, cfg);
            recurrence = recurrence / (9.0 - 8.0 * recurrence);
        }
        const double overlap = std::norm(state.factor(0).dot(state.factor(1)));
        const double bound = gamma2 / std::pow(9.0 - 8.0 * gamma2, s);
        out.csv.row({std::to_string(s), format_double(overlap), format_double(recurrence), format_double(bound),
                     format_double(expectation(L, state))});
    }
    out.solver_seconds = clock.seconds();
    return out;
}

SubsystemDims bench_dims(BenchMode mode, int size) {
    if (size < 1) throw DomainError("bench: sizes must be positive");
    if (mode == BenchMode::Dims) return SubsystemDims({size, size});
    return SubsystemDims(std::vector<int>(static_cast<std::size_t>(size), 2));
}

BenchOutput run_bench(BenchMode mode, const std::vector<int>& sizes, int samples, std::uint64_t seed,
                      const SpiConfig& spi, const OracleConfig& oracle) {
    if (samples < 1) throw DomainError("bench: samples must be >= 1");
    BenchOutput out;
    for (int size : sizes) {
        BenchSummary sum;
        sum.size = size;
        for (int k = 0; k < samples; ++k) {
            const std::uint64_t op_seed = derive_seed(seed, (static_cast<std::uint64_t>(size) << 20) + k);
            const MultipartiteOperator L = random_operator({bench_dims(mode, size), op_seed});

            BenchRow spi_row{size, k, "spi"};
            Stopwatch spi_clock;
            try {
                spi_row.g = max_separability_eigenvalue(L, spi).g_max;
            } catch (const NoConvergenceError& e) {
                spi_row.g = e.best().g;
                spi_row.converged = false;
            }
            spi_row.seconds = spi_clock.seconds();

            OracleConfig ocfg = oracle;
            ocfg.seed = derive_seed(oracle.seed, op_seed);
            BenchRow oracle_row{size, k, "oracle"};
            Stopwatch oracle_clock;
            oracle_row.g = oracle_gmax(L, ocfg).g;
            oracle_row.seconds = oracle_clock.seconds();

            sum.spi_mean_seconds += spi_row.seconds / samples;
            sum.oracle_mean_seconds += oracle_row.seconds / samples;
            sum.max_abs_delta_g = std::max(sum.max_abs_delta_g, std::abs(spi_row.g - oracle_row.g));
            out.rows.push_back(std::move(spi_row));
            out.rows.push_back(std::move(oracle_row));
        }
        out.summary.push_back(sum);
    }
    return out;
}

CsvWriter BenchOutput::rows_csv(BenchMode mode) const {
    CsvWriter csv({"mode", "size", "dims", "sample", "method", "g", "converged", "seconds"});
    for (const auto& r : rows)
        csv.row({mode == BenchMode::Dims ? "dims" : "parties", std::to_string(r.size),
                 bench_dims(mode, r.size).to_string(), std::to_string(r.sample), r.method, format_double(r.g),
                 yes_no(r.converged), format_double(r.seconds)});
    return csv;
}

CsvWriter BenchOutput::summary_csv() const {
    CsvWriter csv({"size", "spi_mean_seconds", "oracle_mean_seconds", "max_abs_delta_g"});
    for (const auto& s : summary)
        csv.row({std::to_string(s.size), format_double(s.spi_mean_seconds), format_double(s.oracle_mean_seconds),
                 format_double(s.max_abs_delta_g)});
    return csv;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

int to_int(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty()) throw InputError("export: invalid " + what + " '" + s + "'");
    return v;
}

}  // namespace

json export_named_operator(const std::string& name) {
    const auto parts = split(name, ':');
    if (parts.empty()) throw InputError("export: empty name");
    const std::string& kind = parts[0];
    if (kind == "smolin" && parts.size() == 1) {
        const DensityOperator s = smolin_state();
        return matrix_to_json(s.matrix(), s.dims());
    }
    if (kind == "horodecki" && parts.size() == 2) {
        std::size_t pos = 0;
        double alpha = 0.0;
        try {
            alpha = std::stod(parts[1], &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != parts[1].size()) throw InputError("export: invalid alpha '" + parts[1] + "'");
        const DensityOperator h = horodecki_state(alpha);
        return matrix_to_json(h.matrix(), h.dims());
    }
    if (kind == "swap" && parts.size() == 2) {
        const MultipartiteOperator l = swap_operator(to_int(parts[1], "dimension"));
        return matrix_to_json(l.matrix(), l.dims());
    }
    if (kind == "random" && parts.size() == 3) {
        std::string dims_text = parts[1];
        for (char& c : dims_text)
            if (c == 'x') c = ',';
        std::vector<int> dims;
        for (const auto& d : split(dims_text, ',')) dims.push_back(to_int(d, "dimension"));
        std::uint64_t seed = 0;
        try {
            std::size_t pos = 0;
            seed = std::stoull(parts[2], &pos);
            if (pos != parts[2].size()) throw InputError("");
        } catch (const std::exception&) {
            throw InputError("export: invalid seed '" + parts[2] + "'");
        }
        const MultipartiteOperator l = random_operator({SubsystemDims(std::move(dims)), seed});
        return matrix_to_json(l.matrix(), l.dims());
    }
    throw InputError("export: unknown operator name '" + name +
                     "' (expected smolin, horodecki:<alpha>, swap:<d>, random:<dims>:<seed>)");
}

}  // namespace sepiter
