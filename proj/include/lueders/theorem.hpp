#pragma once
// Executable forms of the generalized Lueders theorem: statistics
// preservation under a Lueders instrument holds for every state exactly when
// the instrument's effects commute with the test observable.
//
//  * check_prop1 - any finite effect family, test effect with discrete
//    spectrum. Verified by peeling the spectrum of B from the top: at each
//    level the top projector P must satisfy P E_i^{1/2} P = E_i^{1/2} P.
//  * check_prop2 - binary family {E, I - E}, any hermitian B. Verified through
//    [E^{1/2}, [E^{1/2}, B]] = 0 and quasi-nilpotency of C = i[E^{1/2}, B].
//  * check_lemma - for an inner derivation d = [x, .] with d^2 a = 0:
//    d^n(a^n) = n! (da)^n, hence r(da) = 0.
//
// Floating point cannot decide "= 0" exactly, so each checker compares its
// two sides of the biconditional against thresholds scaled by ||B|| and
// reports Inconclusive when a mismatch sits inside the gray band
// (tol, gray_factor * tol].

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "lueders/linalg.hpp"
#include "lueders/quantum.hpp"
#include "lueders/tolerances.hpp"

namespace lueders {

enum class Verdict { Consistent, Inconsistent, Inconclusive };
std::string_view verdict_name(Verdict v);

/// Combine the two sides of "preserved <=> commutes".
/// `preserve_value` is compared with `preserve_tol`, `commute_value` with
/// `commute_tol`.
Verdict biconditional_verdict(double preserve_value, double preserve_tol, double commute_value, double commute_tol,
                              double gray_factor);

// ---------------------------------------------------------------------------
// Eigenvalue peeling

struct PeelStep {
    double eigenvalue;  ///< ||B_cur||
    Operator projector;  ///< spectral projector of the top cluster of B_cur
    std::size_t multiplicity;
    Operator next;  ///< B_cur - eigenvalue * projector
    std::vector<double> residuals;  ///< ||E_i^{1/2} P - P E_i^{1/2} P|| per outcome
};

/// One peeling step. B_cur must be hermitian and positive semidefinite.
/// Throws ZeroOperator once ||B_cur|| <= zero_tol.
PeelStep peel_level(const Operator& b_cur, const EffectFamily& f, const Tolerances& tol = {});

struct PeelLevel {
    std::size_t level;  ///< 1-based
    double eigenvalue;
    Operator projector;
    std::size_t multiplicity;
    std::vector<double> residuals;
    double max_residual;
    bool commutes;  ///< max_residual <= zero_tol
    /// The final zero-eigenvalue cluster, reached when ||B_cur|| vanished
    /// while part of the space was still unpeeled; P = I - sum of earlier P_k.
    bool zero_remainder;
};

struct Prop1Report {
    std::size_t dim;
    std::size_t n_outcomes;
    double b_norm;
    /// Added multiple of I when B was not positive; commutation is invariant under it.
    double shift;
    std::size_t cluster_count;  ///< K, the number of distinct eigenvalues of B
    std::vector<PeelLevel> levels;
    double reconstruction_residual;  ///< ||sum_k b_k P_k - (B + shift I)||
    double deviation_norm;
    double max_commutator_norm;  ///< max_i ||[E_i, B]||
    bool all_commute;  ///< every peel level commutes
    bool levels_match_commutators;  ///< all_commute agrees with the direct commutator test
    std::optional<std::size_t> first_failing_level;
    Verdict verdict;
    bool verdict_consistent;
};

/// Deviation, full peeling with per-level residuals, and the cross-checked
/// biconditional. Accepts any hermitian B; a non-positive B is shifted.
Prop1Report check_prop1(const EffectFamily& f, const Operator& b, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Binary families

struct Prop2Report {
    std::size_t dim;
    double b_norm;
    double deviation_norm;
    double commutator_norm;  ///< ||[E, B]||
    double anticommutator_gap_norm;  ///< ||EB + BE - 2 E^{1/2} B E^{1/2}||
    double double_comm_norm;  ///< ||[E^{1/2}, [E^{1/2}, B]]||
    double proof_identity_residual;  ///< max entry of the difference of the two operators above
    Operator c_op;  ///< C = i [E^{1/2}, B], hermitian
    double c_norm;
    double c_hermitian_residual;
    std::vector<double> radius_seq;
    double radius_tail;
    bool quasi_nilpotent;  ///< radius_tail <= radius_tol
    /// deviation_norm <= zero_tol implies quasi-nilpotent C and ||C|| <= zero_tol.
    bool chain_holds;
    Verdict verdict;
    bool verdict_consistent;
};

Prop2Report check_prop2(const Effect& e, const Operator& b, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Inner derivations

/// d^n a for d = [x, .].
Operator derivation_power(const Operator& x, const Operator& a, std::size_t n);

struct LemmaReport {
    std::size_t dim;
    double x_norm;
    double a_norm;
    double hypothesis_residual;  ///< ||d^2 a||
    Operator da;
    std::vector<double> identity_residuals;  ///< ||d^n(a^n) - n! (da)^n||, n = 1..n_max
    std::vector<double> identity_bounds;  ///< n! * max(1, (2||x|| ||a||)^n) * zero_tol
    bool identity_holds;
    std::vector<double> radius_seq;  ///< s_n of da
    std::vector<double> envelope;  ///< (n!)^{-1/n} * 2||x|| * ||a||
    bool envelope_holds;
    double radius_tail;
    bool quasi_nilpotent;
    bool passed;
};

/// Throws HypothesisViolated when ||d^2 a|| > zero_tol.
LemmaReport check_lemma(const Operator& x, const Operator& a, const Tolerances& tol = {});

}  // namespace lueders
