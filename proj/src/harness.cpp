#include "lueders/harness.hpp"

#include <algorithm>
#include <cmath>

#include "lueders/channel.hpp"
#include "lueders/error.hpp"
#include "lueders/parallel.hpp"

namespace lueders {
namespace {

struct Instance {
    TrialInstance meta;
    FamilyDraw draw;
    Effect effect;
};

double max_commutator(const EffectFamily& f, const Operator& b) {
    double m = 0.0;
    for (const Effect& e : f.effects()) {
        m = std::max(m, operator_norm(commutator(e.op(), b)));
    }
    return m;
}

Instance draw_instance(const BatchConfig& cfg, std::size_t trial, std::size_t n_outcomes_override, Rng& rng,
                       const Tolerances& tol) {
    EnsembleConfig ec;
    ec.seed = cfg.seed;
    ec.dim = cfg.dims[rng.index(cfg.dims.size())];
    ec.n_outcomes =
        n_outcomes_override > 0 ? n_outcomes_override : cfg.outcomes[rng.index(cfg.outcomes.size())];
    ec.regime.kind = cfg.regimes[rng.index(cfg.regimes.size())];
    ec.regime.lambda = cfg.lambda;
    if (ec.regime.kind == RegimeKind::UnsharpQubit) {
        ec.dim = 2;
        ec.n_outcomes = 2;
    }

    const bool filter = cfg.min_commutator > 0.0 && ec.regime.kind == RegimeKind::Generic && ec.dim >= 2;
    for (std::size_t redraws = 0; redraws <= cfg.max_redraws; ++redraws) {
        FamilyDraw draw = random_family(ec, rng, tol);
        Effect b = companion_effect(ec, draw, rng, cfg.n_clusters, tol);
        if (filter && max_commutator(draw.family, b.op()) < cfg.min_commutator) {
            continue;
        }
        return Instance{{trial, ec.dim, ec.n_outcomes, ec.regime.kind, redraws}, std::move(draw), std::move(b)};
    }
    throw Error(ErrorKind::InvalidArgument, "trial " + std::to_string(trial) + ": no draw reached ||[E, B]|| >= " +
                                                std::to_string(cfg.min_commutator) + " in " +
                                                std::to_string(cfg.max_redraws) + " redraws");
}

}  // namespace

void BatchConfig::validate(const Tolerances& tol) const {
    if (trials < 1) {
        throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
    }
    if (dims.empty() || outcomes.empty() || regimes.empty()) {
        throw Error(ErrorKind::InvalidArgument, "dims, outcomes and regimes must be non-empty");
    }
    for (std::size_t d : dims) {
        if (d < 1) {
            throw Error(ErrorKind::InvalidArgument, "dim must be >= 1");
        }
    }
    for (std::size_t n : outcomes) {
        if (n < 1 || n > tol.max_outcomes) {
            throw Error(ErrorKind::InvalidArgument, "outcomes must be in [1, " + std::to_string(tol.max_outcomes) + "]");
        }
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(ErrorKind::OutOfRange, "lambda must lie in [0, 1]");
    }
    if (!(min_commutator >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "min_commutator must be >= 0");
    }
    if (n_clusters > 0) {
        if (n_clusters > 21) {
            throw Error(ErrorKind::InvalidArgument, "at most 21 eigenvalue clusters fit the 0.05 gap");
        }
        for (std::size_t d : dims) {
            if (d < n_clusters) {
                throw Error(ErrorKind::InvalidArgument, "clusters (" + std::to_string(n_clusters) +
                                                            ") exceed dim " + std::to_string(d));
            }
        }
    }
}

ChannelSanity channel_sanity(const EffectFamily& f, const Operator& b, const DensityOperator& rho,
                             const Tolerances& tol) {
    const Operator out = apply_lueders(f, rho.op());
    const Operator dual = heisenberg_dual(f, b, tol);
    return ChannelSanity{std::abs(out.trace().real() - 1.0), eigvalsh(out, tol).front(),
                         std::abs(trace_product_real(out, b) - trace_product_real(rho.op(), dual))};
}

std::vector<Prop1Trial> run_prop1_batch(const BatchConfig& cfg, const Tolerances& tol) {
    cfg.validate(tol);
    std::vector<Prop1Trial> out(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
        Rng rng(cfg.seed, t);
        Instance inst = draw_instance(cfg, t, 0, rng, tol);
        const DensityOperator rho = random_density(inst.meta.dim, rng, tol);
        out[t] = Prop1Trial{inst.meta, check_prop1(inst.draw.family, inst.effect.op(), tol),
                            channel_sanity(inst.draw.family, inst.effect.op(), rho, tol)};
    });
    return out;
}

std::vector<Prop2Trial> run_prop2_batch(const BatchConfig& cfg, const Tolerances& tol) {
    cfg.validate(tol);
    std::vector<Prop2Trial> out(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
        Rng rng(cfg.seed, t);
        Instance inst = draw_instance(cfg, t, 2, rng, tol);
        const DensityOperator rho = random_density(inst.meta.dim, rng, tol);
        const Effect& e = inst.draw.family[0];
        const EffectFamily binary = EffectFamily::from_effects({e, complement(e)}, tol);
        out[t] = Prop2Trial{inst.meta, check_prop2(e, inst.effect.op(), tol),
                            channel_sanity(binary, inst.effect.op(), rho, tol)};
    });
    return out;
}

}  // namespace lueders
