#include "sepiter/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>

#include <Eigen/Eigenvalues>

#include "sepiter/random.hpp"

namespace sepiter {

void OracleConfig::validate() const {
    if (population < 2) throw DomainError("OracleConfig: population must be >= 2");
    if (generations < 1 || restarts < 1 || refine_iters < 1 || threads < 1)
        throw DomainError("OracleConfig: counts must be >= 1");
    if (!(mutation_scale > 0.0)) throw DomainError("OracleConfig: mutation_scale must be positive");
}

std::size_t angle_parameter_count(const SubsystemDims& dims) {
    std::size_t n = 0;
    for (int d : dims.values()) n += 2 * static_cast<std::size_t>(d) - 2;
    return n;
}

ProductState product_from_angles(const SubsystemDims& dims, const std::vector<double>& params) {
    if (params.size() != angle_parameter_count(dims))
        throw StructuralError("product_from_angles: wrong parameter count");
    std::vector<Vector> factors;
    std::size_t p = 0;
    for (int d : dims.values()) {
        Vector f(d);
        double tail = 1.0;  // product of sines so far
        for (int k = 0; k + 1 < d; ++k) {
            f[k] = tail * std::cos(params[p + k]);
            tail *= std::sin(params[p + k]);
        }
        f[d - 1] = tail;
        for (int k = 1; k < d; ++k) f[k] *= std::polar(1.0, params[p + (d - 1) + (k - 1)]);
        p += 2 * static_cast<std::size_t>(d) - 2;
        factors.push_back(std::move(f));
    }
    return ProductState::normalized(std::move(factors), dims);
}

ProductState cyclic_refine(const MultipartiteOperator& op, const ProductState& state, int iters) {
    if (!(op.dims() == state.dims())) throw StructuralError("cyclic_refine: dims mismatch");
    ProductState current = state;
    double value = expectation(op, current);
    for (int it = 0; it < iters; ++it) {
        const double before = value;
        for (std::size_t j = 0; j < current.parties(); ++j) {
            const Matrix reduced = reduced_operator(op, current, j);
            Eigen::SelfAdjointEigenSolver<Matrix> es(reduced);
            const Vector top = es.eigenvectors().col(reduced.rows() - 1);
            auto factors = current.factors();
            factors[j] = top / top.norm();
            ProductState candidate(std::move(factors), current.dims());
            const double v = expectation(op, candidate);
            if (v >= value) {
                current = std::move(candidate);
                value = v;
            }
        }
        if (value - before < 1e-15) break;
    }
    return current.canonical_phase();
}

namespace {

struct Individual {
    std::vector<double> genes;
    double fitness = 0.0;  // expectation value; maximized
};

double evaluate(const MultipartiteOperator& op, const std::vector<double>& genes) {
    const Vector v = flatten(product_from_angles(op.dims(), genes)).entries;
    return v.dot(op.matrix() * v).real();
}

OracleResult run_restart(const MultipartiteOperator& op, const OracleConfig& cfg, std::uint64_t stream) {
    Rng rng(derive_seed(cfg.seed, stream));
    const std::size_t n = angle_parameter_count(op.dims());
    OracleResult out;

    std::vector<double> best_genes(n, 0.0);
    if (n > 0) {
        std::vector<Individual> pop(cfg.population);
        for (auto& ind : pop) {
            ind.genes.resize(n);
            for (double& g : ind.genes) g = 2.0 * std::numbers::pi * rng.uniform();
            ind.fitness = evaluate(op, ind.genes);
            ++out.evaluations;
        }
        const double gene_rate = std::max(1.0 / static_cast<double>(n), 0.2);
        auto tournament = [&]() -> const Individual& {
            const Individual* pick = nullptr;
            for (int t = 0; t < 3; ++t) {
                const Individual& c = pop[rng.below(pop.size())];
                if (pick == nullptr || c.fitness > pick->fitness) pick = &c;
            }
            return *pick;
        };
        auto by_fitness = [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; };
        for (int gen = 0; gen < cfg.generations; ++gen) {
            std::stable_sort(pop.begin(), pop.end(), by_fitness);
            std::vector<Individual> next(pop.begin(), pop.begin() + 2);  // elitism
            while (next.size() < pop.size()) {
                const Individual& a = tournament();
                const Individual& b = tournament();
                Individual child;
                child.genes.resize(n);
                for (std::size_t k = 0; k < n; ++k) {
                    child.genes[k] = rng.uniform() < 0.5 ? a.genes[k] : b.genes[k];
                    if (rng.uniform() < gene_rate) child.genes[k] += cfg.mutation_scale * rng.normal();
                }
                child.fitness = evaluate(op, child.genes);
                ++out.evaluations;
                next.push_back(std::move(child));
            }
            pop = std::move(next);
        }
        const auto it = std::max_element(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
            return a.fitness < b.fitness;
        });
        best_genes = it->genes;
    }
    out.state = cyclic_refine(op, product_from_angles(op.dims(), best_genes), cfg.refine_iters);
    out.g = expectation(op, out.state);
    return out;
}

}  // namespace

OracleResult oracle_gmax(const MultipartiteOperator& op, const OracleConfig& cfg) {
    cfg.validate();
    const auto count = static_cast<std::size_t>(cfg.restarts);
    std::vector<std::optional<OracleResult>> results(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) results[i] = run_restart(op, cfg, i);
    };
    const int nthreads = std::min(cfg.threads, cfg.restarts);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }

    OracleResult best = std::move(*results[0]);
    long evaluations = best.evaluations;
    for (std::size_t i = 1; i < count; ++i) {
        evaluations += results[i]->evaluations;
        if (results[i]->g > best.g) {
            best = std::move(*results[i]);
            best.best_restart = i;
        }
    }
    best.evaluations = evaluations;
    return best;
}

}  // namespace sepiter
