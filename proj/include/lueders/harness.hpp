#pragma once
// Seeded verification batches for the two propositions. Trial t draws its
// whole instance from Rng(seed, t), so a batch is reproducible bit for bit at
// any thread count.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lueders/ensembles.hpp"
#include "lueders/theorem.hpp"
#include "lueders/tolerances.hpp"

namespace lueders {

struct BatchConfig {
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::vector<std::size_t> dims{2};  ///< each trial picks one uniformly
    std::vector<std::size_t> outcomes{2};  ///< ignored by binary batches
    std::vector<RegimeKind> regimes{RegimeKind::Generic};
    double lambda = 0.5;  ///< UnsharpQubit regime
    /// Generic draws with max_i ||[E_i, B]|| below this are redrawn (dim >= 2).
    double min_commutator = 0.0;
    std::size_t n_clusters = 0;  ///< forwarded to companion_effect
    std::size_t threads = 1;
    std::size_t max_redraws = 1000;

    void validate(const Tolerances& tol = {}) const;
};

/// The three channel identities checked on one random state per trial.
struct ChannelSanity {
    double trace_error;  ///< |tr I_L(rho) - 1|
    double min_eigenvalue;  ///< of I_L(rho)
    double duality_residual;  ///< |tr[I_L(rho) B] - tr[rho I_L*(B)]|
};

struct TrialInstance {
    std::size_t trial;
    std::size_t dim;
    std::size_t n_outcomes;
    RegimeKind regime;
    std::size_t redraws;
};

struct Prop1Trial {
    TrialInstance instance;
    Prop1Report report;
    ChannelSanity sanity;
};

struct Prop2Trial {
    TrialInstance instance;
    Prop2Report report;
    ChannelSanity sanity;
};

std::vector<Prop1Trial> run_prop1_batch(const BatchConfig& cfg, const Tolerances& tol = {});
/// Binary families {E, I - E}; cfg.outcomes is ignored.
std::vector<Prop2Trial> run_prop2_batch(const BatchConfig& cfg, const Tolerances& tol = {});

ChannelSanity channel_sanity(const EffectFamily& f, const Operator& b, const DensityOperator& rho,
                             const Tolerances& tol = {});

}  // namespace lueders
