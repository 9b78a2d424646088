#include "lueders/ensembles.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lueders/error.hpp"

namespace lueders {
namespace {

constexpr int kNormalizerRetries = 16;
constexpr double kMinSpread = 0.1;
constexpr double kMinClusterGap = 0.05;

using EigenMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

// U diag(values) U^dagger
Operator conjugate_diagonal(const Operator& u, std::span<const double> values) {
    const std::size_t d = u.dim();
    Operator scaled = u;
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            scaled(i, k) *= values[k];
        }
    }
    return hermitian_part(mul_adjoint(scaled, u));
}

// Affine map of `values` onto [lo, lo + span] with span >= kMinSpread.
void place_in_unit_interval(std::vector<double>& values, Rng& rng) {
    const double span = kMinSpread + (1.0 - kMinSpread) * rng.uniform();
    const double lo = (1.0 - span) * rng.uniform();
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double vmin = *mn;
    const double width = *mx - *mn;
    for (double& v : values) {
        v = width > 0.0 ? lo + span * (v - vmin) / width : lo + 0.5 * span;
    }
}

// Exactly k distinct levels in [0, 1], pairwise separated by kMinClusterGap,
// each used at least once across d slots.
std::vector<double> clustered_values(std::size_t d, std::size_t k, Rng& rng) {
    if (k == 0 || k > d) {
        throw Error(ErrorKind::InvalidArgument,
                    "cannot place " + std::to_string(k) + " eigenvalue clusters in dimension " + std::to_string(d));
    }
    if (static_cast<double>(k - 1) * kMinClusterGap > 1.0) {
        throw Error(ErrorKind::InvalidArgument, "too many eigenvalue clusters for the minimum gap");
    }
    // Levels: k points with the required gaps plus uniformly split slack.
    const double slack = 1.0 - static_cast<double>(k - 1) * kMinClusterGap;
    std::vector<double> cuts(k);
    for (double& c : cuts) {
        c = slack * rng.uniform();
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> levels(k);
    for (std::size_t j = 0; j < k; ++j) {
        levels[j] = cuts[j] + static_cast<double>(j) * kMinClusterGap;
    }
    std::vector<double> values(d);
    for (std::size_t i = 0; i < d; ++i) {
        values[i] = i < k ? levels[i] : levels[rng.index(k)];
    }
    std::shuffle(values.begin(), values.end(), rng.engine());
    return values;
}

EffectFamily identity_family(std::size_t d, const Tolerances& tol) {
    return EffectFamily::make({Operator::identity(d)}, tol);
}

FamilyDraw generic_family(const EnsembleConfig& cfg, Rng& rng, const Tolerances& tol) {
    const std::size_t d = cfg.dim;
    for (int attempt = 0; attempt < kNormalizerRetries; ++attempt) {
        std::vector<Operator> parts;
        Operator total(d);
        for (std::size_t i = 0; i < cfg.n_outcomes; ++i) {
            const Operator g = ginibre(d, rng);
            parts.push_back(hermitian_part(mul_adjoint(g, g)));
            total += parts.back();
        }
        Operator inv_root(d);
        try {
            inv_root = psd_inv_sqrt(total, tol);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NotPositive) {
                continue;
            }
            throw;
        }
        std::vector<Operator> effects;
        effects.reserve(parts.size());
        for (const Operator& p : parts) {
            effects.push_back(hermitian_part(sandwich(inv_root, p, inv_root)));
        }
        return FamilyDraw{EffectFamily::make(effects, tol), std::nullopt};
    }
    throw Error(ErrorKind::SingularNormalizer,
                "normaliser sum F_i stayed singular after " + std::to_string(kNormalizerRetries) + " draws");
}

FamilyDraw commuting_family(const EnsembleConfig& cfg, Rng& rng, const Tolerances& tol) {
    const std::size_t d = cfg.dim;
    const std::size_t n = cfg.n_outcomes;
    Operator u = haar_unitary(d, rng);
    // weights[i][j]: eigenvalue of E_i on basis vector j; columns sum to 1.
    std::vector<std::vector<double>> weights(n, std::vector<double>(d));
    for (std::size_t j = 0; j < d; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            weights[i][j] = -std::log1p(-rng.uniform());  // Exp(1): normalised, a flat Dirichlet column
            total += weights[i][j];
        }
        for (std::size_t i = 0; i < n; ++i) {
            weights[i][j] /= total;
        }
    }
    std::vector<Operator> effects;
    effects.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        effects.push_back(conjugate_diagonal(u, weights[i]));
    }
    return FamilyDraw{EffectFamily::make(effects, tol), std::move(u)};
}

FamilyDraw projective_family(const EnsembleConfig& cfg, Rng& rng, const Tolerances& tol) {
    const std::size_t d = cfg.dim;
    const std::size_t n = cfg.n_outcomes;
    Operator u = haar_unitary(d, rng);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng.engine());
    // Bin of each eigenvector; every bin is non-empty when n <= d.
    std::vector<std::size_t> bin(d);
    for (std::size_t r = 0; r < d; ++r) {
        bin[order[r]] = r < n ? r : rng.index(n);
    }
    std::vector<Operator> effects;
    effects.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> indicator(d);
        for (std::size_t j = 0; j < d; ++j) {
            indicator[j] = bin[j] == i ? 1.0 : 0.0;
        }
        effects.push_back(conjugate_diagonal(u, indicator));
    }
    return FamilyDraw{EffectFamily::make(effects, tol), std::move(u)};
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view regime_name(RegimeKind k) {
    switch (k) {
        case RegimeKind::Generic: return "generic";
        case RegimeKind::Commuting: return "commuting";
        case RegimeKind::Projective: return "projective";
        case RegimeKind::UnsharpQubit: return "unsharp-qubit";
    }
    return "unknown";
}

std::optional<RegimeKind> parse_regime(std::string_view s) {
    for (RegimeKind k : {RegimeKind::Generic, RegimeKind::Commuting, RegimeKind::Projective, RegimeKind::UnsharpQubit}) {
        if (regime_name(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

void EnsembleConfig::validate(const Tolerances& tol) const {
    if (dim < 1) {
        throw Error(ErrorKind::InvalidArgument, "dim must be >= 1");
    }
    if (n_outcomes < 1 || n_outcomes > tol.max_outcomes) {
        throw Error(ErrorKind::InvalidArgument,
                    "outcomes must be in [1, " + std::to_string(tol.max_outcomes) + "], got " + std::to_string(n_outcomes));
    }
    if (regime.kind == RegimeKind::UnsharpQubit) {
        if (dim != 2 || n_outcomes != 2) {
            throw Error(ErrorKind::InvalidArgument, "unsharp-qubit regime needs dim = 2 and 2 outcomes");
        }
        if (!(regime.lambda >= 0.0 && regime.lambda <= 1.0)) {
            throw Error(ErrorKind::OutOfRange, "lambda must lie in [0, 1]");
        }
    }
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix64(mix64(seed) ^ mix64(~stream))) {}

Operator ginibre(std::size_t dim, Rng& rng) {
    Operator g(dim);
    const double s = 1.0 / std::sqrt(2.0);
    for (cplx& z : g.data()) {
        const double re = rng.gaussian();
        const double im = rng.gaussian();
        z = {s * re, s * im};
    }
    return g;
}

Operator haar_unitary(std::size_t dim, Rng& rng) {
    const Operator g = ginibre(dim, rng);
    const auto n = static_cast<Eigen::Index>(dim);
    EigenMat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = g(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
    }
    Eigen::HouseholderQR<EigenMat> qr(m);
    const EigenMat q = qr.householderQ() * EigenMat::Identity(n, n);
    const EigenMat& r = qr.matrixQR();
    Operator u(dim);
    for (Eigen::Index j = 0; j < n; ++j) {
        const cplx rjj = r(j, j);
        const double mag = std::abs(rjj);
        const cplx phase = mag > 0.0 ? rjj / mag : cplx(1.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            u(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = q(i, j) * phase;
        }
    }
    return u;
}

Operator random_hermitian(std::size_t dim, Rng& rng) { return hermitian_part(ginibre(dim, rng)); }

DensityOperator random_density(std::size_t dim, Rng& rng, const Tolerances& tol) {
    const Operator g = ginibre(dim, rng);
    Operator rho = hermitian_part(mul_adjoint(g, g));
    rho *= 1.0 / rho.trace().real();
    return DensityOperator::make(rho, tol);
}

DensityOperator random_density(const EnsembleConfig& cfg, const Tolerances& tol) {
    Rng rng(cfg.seed, 0);
    return random_density(cfg.dim, rng, tol);
}

DensityOperator random_pure_state(std::size_t dim, Rng& rng, const Tolerances& tol) {
    std::vector<cplx> v(dim);
    double norm2 = 0.0;
    for (cplx& z : v) {
        const double re = rng.gaussian();
        const double im = rng.gaussian();
        z = {re, im};
        norm2 += re * re + im * im;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (cplx& z : v) {
        z *= inv;
    }
    Operator rho = Operator::outer(v);
    rho *= 1.0 / rho.trace().real();
    return DensityOperator::make(rho, tol);
}

FamilyDraw random_family(const EnsembleConfig& cfg, Rng& rng, const Tolerances& tol) {
    cfg.validate(tol);
    if (cfg.regime.kind == RegimeKind::UnsharpQubit) {
        return FamilyDraw{unsharp_qubit_family(cfg.regime.lambda, tol).family, Operator::identity(2)};
    }
    if (cfg.n_outcomes == 1) {
        // Completeness forces {I}; keep a basis so companions can still commute.
        return FamilyDraw{identity_family(cfg.dim, tol),
                          cfg.regime.kind == RegimeKind::Generic ? std::nullopt
                                                                 : std::optional<Operator>(haar_unitary(cfg.dim, rng))};
    }
    switch (cfg.regime.kind) {
        case RegimeKind::Commuting: return commuting_family(cfg, rng, tol);
        case RegimeKind::Projective: return projective_family(cfg, rng, tol);
        default: return generic_family(cfg, rng, tol);
    }
}

Effect companion_effect(const EnsembleConfig& cfg, const FamilyDraw& draw, Rng& rng, std::size_t n_clusters,
                        const Tolerances& tol) {
    const std::size_t d = cfg.dim;
    if (cfg.regime.kind == RegimeKind::UnsharpQubit) {
        return unsharp_qubit_family(cfg.regime.lambda, tol).effect;
    }
    std::vector<double> values;
    if (n_clusters > 0) {
        values = clustered_values(d, n_clusters, rng);
    } else {
        values.resize(d);
        for (double& v : values) {
            v = rng.uniform();
        }
        place_in_unit_interval(values, rng);
    }
    if (cfg.regime.kind == RegimeKind::Commuting && draw.basis.has_value()) {
        return Effect::make(conjugate_diagonal(*draw.basis, values), tol);
    }
    if (n_clusters > 0) {
        return Effect::make(conjugate_diagonal(haar_unitary(d, rng), values), tol);
    }
    // Independent effect: spectrum of a random hermitian operator, rescaled.
    const EigenSystem es = eigh(random_hermitian(d, rng), tol);
    std::vector<double> spectrum = es.values;
    place_in_unit_interval(spectrum, rng);
    return Effect::make(conjugate_diagonal(es.vectors, spectrum), tol);
}

LemmaPair exact_lemma_pair(std::size_t dim, Rng& rng) {
    if (dim == 0) {
        throw Error(ErrorKind::InvalidArgument, "dim must be >= 1");
    }
    const double c = std::ldexp(1.0, static_cast<int>(rng.index(5)) - 2);  // 1/4 .. 4
    Operator shift(dim);
    for (std::size_t i = 0; i + 1 < dim; ++i) {
        shift(i, i + 1) = 1.0;
    }
    Operator x = c * shift;

    Operator a(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        a(i, i) = static_cast<double>(dim - 1 - i);
    }
    // sum_k q_k J^k with q_k in {-1, -1/2, ..., 1}
    Operator jk = Operator::identity(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const double q = (static_cast<double>(rng.index(5)) - 2.0) / 2.0;
        a.add_scaled(q, jk);
        jk = jk * shift;
    }

    // signed permutation W; W^dagger = W^{-1} exactly
    std::vector<std::size_t> perm(dim);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    Operator w(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        w(i, perm[i]) = rng.index(2) == 0 ? 1.0 : -1.0;
    }
    return {w * x * w.adjoint(), w * a * w.adjoint()};
}

UnsharpQubitPair unsharp_qubit_family(double lambda, const Tolerances& tol) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        std::ostringstream os;
        os << "lambda = " << lambda << " is outside [0, 1]";
        throw Error(ErrorKind::OutOfRange, os.str());
    }
    const Operator plus = Operator::diagonal({0.5 * (1.0 + lambda), 0.5 * (1.0 - lambda)});
    const Operator minus = Operator::diagonal({0.5 * (1.0 - lambda), 0.5 * (1.0 + lambda)});
    const Operator sx = pauli::x();
    Operator b = Operator::identity(2) + sx;
    b *= 0.5;
    const double predicted = 1.0 - std::sqrt(1.0 - lambda * lambda);
    return UnsharpQubitPair{lambda, EffectFamily::make({plus, minus}, tol), Effect::make(b, tol), sx, predicted,
                            0.5 * predicted};
}

namespace pauli {
Operator x() { return Operator{{0.0, 1.0}, {1.0, 0.0}}; }
Operator y() { return Operator{{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}}; }
Operator z() { return Operator::diagonal({1.0, -1.0}); }
}  // namespace pauli

}  // namespace lueders
