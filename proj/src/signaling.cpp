#include "lueders/signaling.hpp"

#include <cmath>

#include "lueders/channel.hpp"
#include "lueders/error.hpp"
#include "lueders/parallel.hpp"

namespace lueders {
namespace {

constexpr double kNonCommuting = 1e-3;
constexpr double kDeviationFloor = 1e-12;
constexpr double kCommuting = 1e-12;
constexpr double kDeviationCeiling = 1e-9;

}  // namespace

double statistics_shift(const EffectFamily& f, const Operator& b, const Operator& rho) {
    return trace_product_real(apply_lueders(f, rho), b) - trace_product_real(rho, b);
}

SignalingRecord max_signaling_state(const EffectFamily& f, const Operator& b, const Tolerances& tol) {
    const DeviationReport dev = deviation(f, b, tol);
    const EigenSystem es = eigh(dev.deviation_op, tol);
    // Extremal |eigenvalue|; ascending order puts candidates at both ends and
    // ties go to the positive end.
    const std::size_t top = es.values.size() - 1;
    const std::size_t k = std::abs(es.values.front()) > std::abs(es.values[top]) ? 0 : top;
    const std::vector<cplx> v = es.vector(k);

    Operator rho = Operator::outer(v);
    rho *= 1.0 / rho.trace().real();
    DensityOperator witness = DensityOperator::make(rho, tol);
    const double channel_value = statistics_shift(f, b, witness.op());
    return SignalingRecord{b.dim(),         f.size(),      dev.deviation_norm,     std::move(witness),
                           -es.values[k],   channel_value, dev.max_commutator_norm};
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k) {
        grid.push_back(static_cast<double>(k) / 20.0);
    }
    return grid;
}

std::vector<SweepRow> sweep_unsharpness(const std::vector<double>& grid, const Tolerances& tol) {
    for (double lambda : grid) {
        if (!(lambda >= 0.0 && lambda <= 1.0)) {
            throw Error(ErrorKind::OutOfRange, "lambda grid value " + std::to_string(lambda) + " is outside [0, 1]");
        }
    }
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double lambda : grid) {
        const UnsharpQubitPair pair = unsharp_qubit_family(lambda, tol);
        const double measured = deviation(pair.family, pair.sigma_x, tol).deviation_norm;
        rows.push_back({lambda, measured, pair.predicted_sigma_x, std::abs(measured - pair.predicted_sigma_x)});
    }
    return rows;
}

ScanResult scan_commutator_vs_deviation(const EnsembleConfig& cfg, std::size_t trials, std::size_t threads,
                                        const Tolerances& tol) {
    if (trials < 1) {
        throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
    }
    cfg.validate(tol);
    ScanResult result;
    result.records.resize(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(cfg.seed, t);
        const FamilyDraw draw = random_family(cfg, rng, tol);
        const Effect b = companion_effect(cfg, draw, rng, 0, tol);
        const DeviationReport dev = deviation(draw.family, b.op(), tol);
        result.records[t] = ScanRecord{t,        cfg.seed, cfg.dim, cfg.n_outcomes, cfg.regime.kind, dev.max_commutator_norm,
                                       dev.deviation_norm};
    });
    result.violations = 0;
    for (const ScanRecord& r : result.records) {
        const bool missed_signal = r.commutator_norm > kNonCommuting && r.deviation_norm < kDeviationFloor;
        const bool false_signal = r.commutator_norm <= kCommuting && r.deviation_norm > kDeviationCeiling;
        if (missed_signal || false_signal) {
            ++result.violations;
        }
    }
    result.separation_holds = result.violations == 0;
    return result;
}

}  // namespace lueders
