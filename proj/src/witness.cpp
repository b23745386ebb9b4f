#include "sepiter/witness.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "parallel_for.hpp"

namespace sepiter {

Witness build_witness(const MultipartiteOperator& L, const Partition& partition, const SpiConfig& cfg) {
    CoarseGrained cg = coarse_grain(L, partition);
    WitnessBound bound = max_separability_eigenvalue(cg.op, cfg);

    std::vector<StartSummary> summary;
    std::vector<ProductState> vectors;
    summary.reserve(bound.per_start.size());
    vectors.reserve(bound.per_start.size());
    for (auto& r : bound.per_start) {
        summary.push_back({r.start_index, r.g, r.residual, r.cycles, r.converged});
        vectors.push_back(std::move(r.state));
    }
    return Witness{
        .L = L,
        .grouped = std::move(cg.op),
        .permutation = std::move(cg.permutation),
        .g_max = bound.g_max,
        .argmax = std::move(bound.argmax),
        .partition = partition,
        .strategy = cfg.start_strategy,
        .config = cfg,
        .shift = bound.shift,
        .per_start = std::move(summary),
        .eigenvectors = std::move(vectors),
    };
}

StateTest test_state(const Witness& w, const DensityOperator& rho) {
    if (!(rho.dims() == w.L.dims()))
        throw StructuralError("test_state: state dims " + rho.dims().to_string() + " vs witness dims " +
                              w.L.dims().to_string());
    StateTest t;
    t.trace = trace_product(w.L.matrix(), rho.matrix());
    t.value = w.g_max - t.trace;
    t.entangled = t.value < -kDetectionMargin;
    t.inconclusive = !t.entangled && t.value < 0.0;
    return t;
}

PartitionScan partition_scan(const MultipartiteOperator& L, const DensityOperator& rho,
                             const std::vector<Partition>& partitions, const SpiConfig& cfg) {
    cfg.validate();
    // partitions fan out; each solve runs on one thread
    SpiConfig inner = cfg;
    inner.threads = 1;
    std::vector<std::optional<PartitionRow>> rows(partitions.size());
    detail::parallel_for(partitions.size(), cfg.threads, [&](std::size_t i) {
        const Witness w = build_witness(L, partitions[i], inner);
        const StateTest t = test_state(w, rho);
        rows[i] = PartitionRow{partitions[i], w.g_max, t.trace, t.entangled, t.inconclusive};
    });
    PartitionScan scan;
    for (auto& row : rows) scan.rows.push_back(std::move(*row));
    for (const auto& row : scan.rows) {
        auto [it, inserted] = scan.k_bounds.try_emplace(row.partition.parties(), row.g_max);
        if (!inserted) it->second = std::max(it->second, row.g_max);
    }
    return scan;
}

ObservableWitness from_observables(const std::vector<MultipartiteOperator>& observables,
                                   const std::vector<double>& coefficients) {
    if (observables.empty()) throw StructuralError("from_observables: empty observable list");
    if (observables.size() != coefficients.size())
        throw StructuralError("from_observables: coefficient count does not match observables");
    const SubsystemDims& dims = observables.front().dims();
    Matrix sum = Matrix::Zero(dims.total(), dims.total());
    for (std::size_t k = 0; k < observables.size(); ++k) {
        if (!(observables[k].dims() == dims)) throw StructuralError("from_observables: observables differ in dims");
        sum += coefficients[k] * observables[k].matrix();
    }
    PositiveShift shifted = ensure_positive(MultipartiteOperator(std::move(sum), dims));
    return {std::move(shifted.op), shifted.shift};
}

std::vector<double> uniform_grid(double step, double upper) {
    if (!(step > 0.0)) throw DomainError("uniform_grid: step must be positive");
    std::vector<double> out;
    for (long k = 0;; ++k) {
        const double v = std::round(static_cast<double>(k) * step * 1e9) / 1e9;
        if (v > upper + 1e-12) break;
        out.push_back(v);
    }
    return out;
}

HorodeckiGrid horodecki_grid(const std::vector<double>& alphas, const std::vector<double>& betas,
                             const SpiConfig& cfg) {
    HorodeckiGrid grid;
    grid.alphas = alphas;
    grid.betas = betas;
    std::vector<DensityOperator> states;
    states.reserve(alphas.size());
    for (double a : alphas) states.push_back(horodecki_state(a));

    const Partition bipartition = Partition::finest(2);
    std::vector<MultipartiteOperator> tests;
    for (double b : betas) tests.push_back(horodecki_state(b).as_operator());
    cfg.validate();
    SpiConfig inner = cfg;
    inner.threads = 1;
    grid.g_beta.assign(betas.size(), 0.0);
    detail::parallel_for(betas.size(), cfg.threads, [&](std::size_t ib) {
        grid.g_beta[ib] = build_witness(tests[ib], bipartition, inner).g_max;
    });
    grid.detected.assign(alphas.size(), false);
    for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
        for (std::size_t ib = 0; ib < betas.size(); ++ib) {
            const double tr = trace_product(states[ia].matrix(), tests[ib].matrix());
            const bool hit = grid.g_beta[ib] - tr < -kDetectionMargin;
            grid.cells.push_back({alphas[ia], betas[ib], grid.g_beta[ib], tr, hit});
            if (hit) grid.detected[ia] = true;
        }
    }
    return grid;
}

}  // namespace sepiter
