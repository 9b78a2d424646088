#pragma once
// Validated measurement-theory values. Validation happens once, at
// construction; everything downstream trusts these types.

#include <cstddef>
#include <vector>

#include "lueders/linalg.hpp"
#include "lueders/tolerances.hpp"

namespace lueders {

/// Self-adjoint operator with 0 <= E <= I (within psd_tol). Carries its
/// eigensystem and positive square root, computed at construction.
class Effect {
public:
    static Effect make(const Operator& a, const Tolerances& tol = {});

    const Operator& op() const noexcept { return op_; }
    const Operator& sqrt() const noexcept { return sqrt_; }
    const EigenSystem& eigensystem() const noexcept { return eig_; }
    double min_eigenvalue() const { return eig_.values.front(); }
    double max_eigenvalue() const { return eig_.values.back(); }
    std::size_t dim() const noexcept { return op_.dim(); }

private:
    Effect(Operator op, EigenSystem eig);

    Operator op_;
    EigenSystem eig_;
    Operator sqrt_;

    friend Effect complement(const Effect& e);
};

inline Effect make_effect(const Operator& a, const Tolerances& tol = {}) { return Effect::make(a, tol); }

/// I - E. Reuses the eigenbasis of E.
Effect complement(const Effect& e);

/// Finite POVM: effects summing to the identity within zero_tol.
class EffectFamily {
public:
    static EffectFamily make(const std::vector<Operator>& ops, const Tolerances& tol = {});
    static EffectFamily from_effects(std::vector<Effect> effects, const Tolerances& tol = {});

    std::size_t size() const noexcept { return effects_.size(); }
    std::size_t dim() const noexcept { return effects_.front().dim(); }
    const Effect& operator[](std::size_t i) const { return effects_[i]; }
    const std::vector<Effect>& effects() const noexcept { return effects_; }
    /// ||sum_i E_i - I|| measured at construction.
    double completeness_residual() const noexcept { return completeness_residual_; }

private:
    explicit EffectFamily(std::vector<Effect> effects, double residual)
        : effects_(std::move(effects)), completeness_residual_(residual) {}

    std::vector<Effect> effects_;
    double completeness_residual_;
};

inline EffectFamily make_family(const std::vector<Operator>& ops, const Tolerances& tol = {}) {
    return EffectFamily::make(ops, tol);
}

struct ProjectivityReport {
    bool projective;
    double max_idempotency_residual;  ///< max_i ||E_i^2 - E_i||
    double max_orthogonality_residual;  ///< max_{i != j} ||E_i E_j||
};

ProjectivityReport is_projective(const EffectFamily& f, const Tolerances& tol = {});

/// An EffectFamily whose members are mutually orthogonal projections.
class ProjectiveFamily {
public:
    static ProjectiveFamily make(EffectFamily f, const Tolerances& tol = {});

    const EffectFamily& family() const noexcept { return family_; }
    std::size_t size() const noexcept { return family_.size(); }
    std::size_t dim() const noexcept { return family_.dim(); }
    const Operator& projector(std::size_t i) const { return family_[i].op(); }

private:
    explicit ProjectiveFamily(EffectFamily f) : family_(std::move(f)) {}
    EffectFamily family_;
};

/// Positive semidefinite, unit trace.
class DensityOperator {
public:
    static DensityOperator make(const Operator& a, const Tolerances& tol = {});

    const Operator& op() const noexcept { return op_; }
    std::size_t dim() const noexcept { return op_.dim(); }

private:
    explicit DensityOperator(Operator op) : op_(std::move(op)) {}
    Operator op_;
};

/// tr[rho B] for hermitian B; the imaginary part is checked against zero_tol
/// and discarded.
double expectation(const DensityOperator& rho, const Operator& b, const Tolerances& tol = {});

/// Re tr[A B] without validation, for hot loops over already-validated data.
double trace_product_real(const Operator& a, const Operator& b);

}  // namespace lueders
