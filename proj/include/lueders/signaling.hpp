#pragma once
// Causality reading of the deviation operator: how far can a nonselective
// Lueders measurement of F shift the statistics of B, and in which state?
//
// Sign convention: witness_value = tr[I_L(rho*) B] - tr[rho* B] = -tr[rho* D],
// with D the deviation operator. The supremum of |witness_value| over all
// states is ||D||, attained on an eigenvector of D with the largest
// |eigenvalue|.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lueders/ensembles.hpp"
#include "lueders/linalg.hpp"
#include "lueders/quantum.hpp"
#include "lueders/tolerances.hpp"

namespace lueders {

struct SignalingRecord {
    std::size_t dim;
    std::size_t n_outcomes;
    double deviation_norm;
    DensityOperator witness_state;  ///< rank-1 projector onto the extremal eigenvector
    double witness_value;  ///< -(extremal eigenvalue of D)
    double witness_value_channel;  ///< same quantity, evaluated by running the channel
    double commutator_norm;  ///< max_i ||[E_i, B]||
};

SignalingRecord max_signaling_state(const EffectFamily& f, const Operator& b, const Tolerances& tol = {});

/// |tr[I_L(rho) B] - tr[rho B]| evaluated through the Schroedinger picture.
double statistics_shift(const EffectFamily& f, const Operator& b, const Operator& rho);

struct SweepRow {
    double lambda;
    double measured;  ///< deviation norm for B = sigma_x
    double predicted;  ///< 1 - sqrt(1 - lambda^2)
    double abs_error;
};

/// 0, 0.05, ..., 1 (21 points, computed as k / 20).
std::vector<double> default_lambda_grid();

/// Throws OutOfRange on any lambda outside [0, 1].
std::vector<SweepRow> sweep_unsharpness(const std::vector<double>& grid, const Tolerances& tol = {});

struct ScanRecord {
    std::size_t trial;
    std::uint64_t seed;  ///< master seed; (seed, trial) identifies the stream
    std::size_t dim;
    std::size_t n_outcomes;
    RegimeKind regime;
    double commutator_norm;
    double deviation_norm;
};

struct ScanResult {
    std::vector<ScanRecord> records;
    /// No record with commutator_norm > 1e-3 has deviation_norm < 1e-12, and
    /// none with commutator_norm <= 1e-12 has deviation_norm > 1e-9.
    bool separation_holds;
    std::size_t violations;
};

/// Draws `trials` (F, B) pairs from cfg (stream = trial index) and records
/// both norms. Order of records follows trial index for any thread count.
ScanResult scan_commutator_vs_deviation(const EnsembleConfig& cfg, std::size_t trials, std::size_t threads = 1,
                                        const Tolerances& tol = {});

}  // namespace lueders
