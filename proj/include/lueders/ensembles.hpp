#pragma once
// Seed-reproducible random instances: states, effect families and companion
// test effects. Every draw is a pure function of (seed, stream counter); a
// batch assigns one stream per trial so worker scheduling cannot change
// results.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lueders/linalg.hpp"
#include "lueders/quantum.hpp"
#include "lueders/tolerances.hpp"

namespace lueders {

enum class RegimeKind { Generic, Commuting, Projective, UnsharpQubit };

struct Regime {
    RegimeKind kind = RegimeKind::Generic;
    double lambda = 0.0;  ///< unsharpness, UnsharpQubit only
};

std::string_view regime_name(RegimeKind k);
/// "generic" | "commuting" | "projective" | "unsharp-qubit"
std::optional<RegimeKind> parse_regime(std::string_view s);

struct EnsembleConfig {
    std::uint64_t seed = 0;
    std::size_t dim = 2;
    std::size_t n_outcomes = 2;
    Regime regime{};

    /// Throws InvalidArgument / OutOfRange on bad parameters.
    void validate(const Tolerances& tol = {}) const;
};

/// Counter-split random stream.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    double gaussian() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// splitmix64 finaliser; used to derive per-stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// d x d matrix of independent standard complex Gaussians (E|z|^2 = 1).
Operator ginibre(std::size_t dim, Rng& rng);
/// Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal phases
/// folded into Q.
Operator haar_unitary(std::size_t dim, Rng& rng);
/// (G + G^dagger) / 2 for Ginibre G.
Operator random_hermitian(std::size_t dim, Rng& rng);

/// Hilbert-Schmidt random state G G^dagger / tr(G G^dagger).
DensityOperator random_density(std::size_t dim, Rng& rng, const Tolerances& tol = {});
DensityOperator random_density(const EnsembleConfig& cfg, const Tolerances& tol = {});
/// Haar random pure state |psi><psi|.
DensityOperator random_pure_state(std::size_t dim, Rng& rng, const Tolerances& tol = {});

/// A family together with the unitary that diagonalises it, when the regime
/// guarantees a common eigenbasis (Commuting, Projective).
struct FamilyDraw {
    EffectFamily family;
    std::optional<Operator> basis;
};

/// Generic: E_i = M^{-1/2} F_i M^{-1/2}, F_i Ginibre-PSD, M = sum F_i.
/// Commuting: U diag(w_i) U^dagger with entrywise-normalised weights.
/// Projective: Haar eigenbasis coarse-grained into n_outcomes bins.
/// UnsharpQubit: {(I + lambda sz)/2, (I - lambda sz)/2}.
FamilyDraw random_family(const EnsembleConfig& cfg, Rng& rng, const Tolerances& tol = {});

/// Test effect B paired with a family. Commuting: diagonal in the family's
/// basis. Otherwise: independent, spectrum affinely placed inside [0, 1]
/// with spread >= 0.1 (dim >= 2). `n_clusters` > 0 forces exactly that many
/// distinct eigenvalues.
Effect companion_effect(const EnsembleConfig& cfg, const FamilyDraw& draw, Rng& rng, std::size_t n_clusters = 0,
                        const Tolerances& tol = {});

struct UnsharpQubitPair {
    double lambda;
    EffectFamily family;  ///< {(I + lambda sz)/2, (I - lambda sz)/2}
    Effect effect;  ///< (I + sx)/2
    Operator sigma_x;
    double predicted_sigma_x;  ///< 1 - sqrt(1 - lambda^2)
    double predicted_effect;  ///< half of the above
};

/// Throws OutOfRange unless 0 <= lambda <= 1.
UnsharpQubitPair unsharp_qubit_family(double lambda, const Tolerances& tol = {});

/// Pair (x, a) with d^2 a = 0 exactly in floating point, d = [x, .].
/// x = c J for the shift J and a power of two c; a = diag(dim-1, ..., 0) plus a
/// polynomial in J with dyadic coefficients; both conjugated by the same
/// random signed permutation. Then da = -c J, nilpotent. Rounding-perturbed
/// nilpotents have spectral radius near eps^(1/dim), which is why the entries
/// are kept exactly representable.
struct LemmaPair {
    Operator x;
    Operator a;
};
LemmaPair exact_lemma_pair(std::size_t dim, Rng& rng);

namespace pauli {
Operator x();
Operator y();
Operator z();
}  // namespace pauli

}  // namespace lueders
