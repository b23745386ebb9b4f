// sepiter: maximal separability eigenvalues and entanglement witnesses.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sepiter/commands.hpp"
#include "sepiter/states.hpp"

namespace fs = std::filesystem;
using namespace sepiter;

namespace {

struct GlobalFlags {
    double tol = SpiConfig{}.epsilon;
    int max_cycles = SpiConfig{}.max_cycles;
    std::string start = "basis";
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
};

SpiConfig make_config(const GlobalFlags& f) {
    SpiConfig cfg;
    cfg.epsilon = f.tol;
    cfg.max_cycles = f.max_cycles;
    cfg.start_strategy = parse_start_strategy(f.start);
    cfg.seed = f.seed;
    cfg.threads = f.threads;
    cfg.validate();
    return cfg;
}

std::optional<Partition> parse_partition(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return Partition::parse(text);
}

void write_with_manifest(const fs::path& path, const std::string& text, const RunManifest& manifest) {
    write_text_file(path, text);
    write_text_file(path.string() + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

void emit_json(const json& doc, const GlobalFlags& g, RunManifest& manifest) {
    if (g.out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        write_with_manifest(g.out, doc.dump(2) + "\n", manifest);
    }
}

std::string joined_argv(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Separability power iteration: maximal separability eigenvalues and entanglement witnesses"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--tol", g.tol, "N-orthogonality residual threshold");
    app.add_option("--max-cycles", g.max_cycles, "SPI cycle budget per recursion level");
    app.add_option("--start", g.start, "Starting vectors: basis (operator basis) or eigproj")
        ->check(CLI::IsMember({"basis", "eigproj"}));
    app.add_option("--seed", g.seed, "Seed for every random choice");
    app.add_option("--threads", g.threads, "Worker threads for multi-start solves")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output file (solve, witness, bench, states) or directory (reproduce)");

    // solve
    auto* solve = app.add_subcommand("solve", "Maximal separability eigenvalue of an operator file");
    std::string solve_file, solve_partition;
    solve->add_option("operator", solve_file, "Operator JSON file")->required();
    solve->add_option("--partition", solve_partition, "Parties, e.g. 1,2|3,4 (default: every subsystem)");

    // witness test
    auto* witness = app.add_subcommand("witness", "Witness construction and evaluation");
    witness->require_subcommand(1);
    auto* witness_test = witness->add_subcommand("test", "Build the witness for L and test a density operator");
    std::string witness_op, witness_state, witness_partition;
    witness_test->add_option("operator", witness_op, "Test operator L (JSON)")->required();
    witness_test->add_option("state", witness_state, "Density operator rho (JSON, operator format)")->required();
    witness_test->add_option("--partition", witness_partition, "Parties, e.g. 1|2,3,4");

    // reproduce
    auto* reproduce = app.add_subcommand("reproduce", "Regenerate the reference tables as CSV");
    std::string target;
    double gamma2 = 0.5, alpha_step = 0.1, beta_step = 0.1;
    int recurrence_cycles = 10;
    reproduce->add_option("target", target, "horodecki | smolin | swap-recurrence")
        ->required()
        ->check(CLI::IsMember({"horodecki", "smolin", "swap-recurrence"}));
    reproduce->add_option("--gamma2", gamma2, "swap-recurrence: initial |<a1|a2>|^2");
    reproduce->add_option("--cycles", recurrence_cycles, "swap-recurrence: number of cycles");
    reproduce->add_option("--alpha-step", alpha_step, "horodecki: alpha grid step");
    reproduce->add_option("--beta-step", beta_step, "horodecki: beta grid step");

    // bench
    auto* bench = app.add_subcommand("bench", "SPI vs. genetic oracle on random operators");
    std::string bench_mode;
    std::vector<int> sizes;
    int samples = 10;
    OracleConfig ocfg;
    bench->add_option("mode", bench_mode, "dims (N=2, d varies) | parties (qubits, N varies)")
        ->required()
        ->check(CLI::IsMember({"dims", "parties"}));
    bench->add_option("--sizes", sizes, "d values (dims) or N values (parties)")->delimiter(',')->required();
    bench->add_option("--samples", samples, "Random operators per size");
    bench->add_option("--oracle-population", ocfg.population);
    bench->add_option("--oracle-generations", ocfg.generations);
    bench->add_option("--oracle-restarts", ocfg.restarts);
    bench->add_option("--oracle-refine", ocfg.refine_iters);

    // states export
    auto* states = app.add_subcommand("states", "Reference operators");
    states->require_subcommand(1);
    auto* states_export = states->add_subcommand("export", "Write a reference operator as JSON");
    std::string state_name;
    states_export->add_option("--name", state_name, "smolin | horodecki:<alpha> | swap:<d> | random:<dims>:<seed>")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    RunManifest manifest;
    manifest.command_line = joined_argv(argc, argv);
    try {
        const SpiConfig cfg = make_config(g);
        manifest.config = spi_config_to_json(cfg);
        manifest.seeds = {{"seed", g.seed}};

        if (*solve) {
            const MultipartiteOperator op = operator_from_json(read_json_file(solve_file), solve_file);
            const auto out = run_solve(op, parse_partition(solve_partition), cfg);
            manifest.timings["solver"] = out.solver_seconds;
            emit_json(out.result, g, manifest);
            return out.exit_code;
        }
        if (*witness_test) {
            const MultipartiteOperator L = operator_from_json(read_json_file(witness_op), witness_op);
            RawOperator raw = parse_operator(read_json_file(witness_state), witness_state);
            const DensityOperator rho(std::move(raw.matrix), std::move(raw.dims));
            const auto out = run_witness_test(L, rho, parse_partition(witness_partition), cfg);
            manifest.timings["solver"] = out.solver_seconds;
            emit_json(out.result, g, manifest);
            return kExitOk;
        }
        if (*reproduce) {
            const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
            CsvOutput out = target == "smolin"      ? reproduce_smolin(cfg)
                            : target == "horodecki" ? reproduce_horodecki(cfg, alpha_step, beta_step)
                                                    : reproduce_swap_recurrence(cfg, gamma2, recurrence_cycles);
            manifest.config["target"] = target;
            if (target == "swap-recurrence") {
                manifest.config["gamma2"] = gamma2;
                manifest.config["cycles"] = recurrence_cycles;
            } else if (target == "horodecki") {
                manifest.config["alpha_step"] = alpha_step;
                manifest.config["beta_step"] = beta_step;
            }
            manifest.timings["solver"] = out.solver_seconds;
            write_with_manifest(dir / out.filename, out.csv.text(), manifest);
            std::cout << (dir / out.filename).string() << "\n";
            return kExitOk;
        }
        if (*bench) {
            const BenchMode mode = bench_mode == "dims" ? BenchMode::Dims : BenchMode::Parties;
            ocfg.seed = g.seed;
            ocfg.threads = g.threads;
            ocfg.validate();
            manifest.config["oracle"] = oracle_config_to_json(ocfg);
            manifest.config["mode"] = bench_mode;
            manifest.config["sizes"] = sizes;
            manifest.config["samples"] = samples;
            const BenchOutput out = run_bench(mode, sizes, samples, g.seed, cfg, ocfg);
            double spi_total = 0.0, oracle_total = 0.0;
            for (const auto& r : out.rows) (r.method == "spi" ? spi_total : oracle_total) += r.seconds;
            manifest.timings["spi"] = spi_total;
            manifest.timings["oracle"] = oracle_total;
            const fs::path path = g.out.empty() ? fs::path("bench_" + bench_mode + ".csv") : fs::path(g.out);
            write_with_manifest(path, out.rows_csv(mode).text(), manifest);
            fs::path summary = path;
            summary.replace_filename(path.stem().string() + "_summary.csv");
            write_with_manifest(summary, out.summary_csv().text(), manifest);
            std::cout << out.summary_csv().text();
            return kExitOk;
        }
        if (*states_export) {
            if (g.out.empty()) throw InputError("states export: --out is required");
            manifest.config["name"] = state_name;
            write_with_manifest(g.out, export_named_operator(state_name).dump() + "\n", manifest);
            return kExitOk;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
