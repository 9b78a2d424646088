#pragma once
// Nonselective Lueders instruments: the state map rho -> sum_i E_i^{1/2} rho E_i^{1/2},
// its trace-dual on observables, and the deviation operator measuring how far
// the instrument moves the statistics of a test observable.

#include <cstddef>
#include <optional>

#include "lueders/linalg.hpp"
#include "lueders/quantum.hpp"
#include "lueders/tolerances.hpp"

namespace lueders {

/// sum_i P_i rho P_i
DensityOperator lueders_sharp(const ProjectiveFamily& f, const DensityOperator& rho, const Tolerances& tol = {});

/// sum_i E_i^{1/2} rho E_i^{1/2}, using the square roots cached on the family.
DensityOperator lueders_unsharp(const EffectFamily& f, const DensityOperator& rho, const Tolerances& tol = {});

/// Unvalidated form of lueders_unsharp for sampling loops; the result is the
/// hermitian part of the Kraus sum.
Operator apply_lueders(const EffectFamily& f, const Operator& rho);

struct SelectiveOutcome {
    double probability;
    std::optional<DensityOperator> post_state;  ///< empty when probability <= zero_tol
};

/// Outcome i: p = tr[E_i rho], post-state E_i^{1/2} rho E_i^{1/2} / p.
SelectiveOutcome selective_outcome(const EffectFamily& f, std::size_t i, const DensityOperator& rho,
                                   const Tolerances& tol = {});

/// sum_i E_i^{1/2} B E_i^{1/2}: unital, maps effects to effects.
Operator heisenberg_dual(const EffectFamily& f, const Operator& b, const Tolerances& tol = {});

struct DeviationReport {
    double deviation_norm;
    Operator deviation_op;  ///< B - heisenberg_dual(F, B), hermitian
    double max_commutator_norm;  ///< max_i ||[E_i, B]||
    bool preserved;  ///< deviation_norm <= zero_tol
    std::size_t dim;
    std::size_t n_outcomes;
};

/// tr[I_L(rho) B] - tr[rho B] = -tr[rho D] for D = deviation_op, so the
/// statistics of B survive every state exactly when ||D|| = 0.
DeviationReport deviation(const EffectFamily& f, const Operator& b, const Tolerances& tol = {});

/// Throws NotHermitian if ||B - B^dagger|| exceeds hermitian_tol.
void require_hermitian_observable(const Operator& b, const Tolerances& tol);

}  // namespace lueders
