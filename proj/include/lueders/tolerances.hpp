#pragma once

#include <cstddef>

namespace lueders {

/// Every numerical comparison in the library reads one of these knobs.
struct Tolerances {
    double hermitian_tol = 1e-10;    ///< ||A - A^dagger|| accepted as hermitian
    double psd_tol = 1e-10;          ///< eigenvalues in [-psd_tol, 0) count as zero
    double cluster_tol = 1e-8;       ///< relative gap below which eigenvalues merge (times max(1, ||A||))
    double reconstruct_tol = 1e-10;  ///< decomposition round-trip error
    double zero_tol = 1e-10;         ///< absolute "is zero" threshold

    // Verdict thresholds used by the theorem checkers.
    double comm_rel_tol = 1e-9;  ///< commutes iff max ||[E_i, B]|| <= comm_rel_tol * ||B||
    double dev_rel_tol = 1e-9;   ///< preserved iff deviation_norm <= dev_rel_tol * ||B||
    double gray_factor = 10.0;   ///< width of the Inconclusive band, (tol, gray_factor * tol]
    double radius_tol = 1e-6;    ///< quasi-nilpotent iff s_{n_max} <= radius_tol
    std::size_t n_max = 64;      ///< length of spectral-radius sequences

    std::size_t max_outcomes = 64;
};

}  // namespace lueders
