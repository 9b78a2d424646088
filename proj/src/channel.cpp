#include "lueders/channel.hpp"

#include <algorithm>
#include <sstream>

#include "lueders/error.hpp"

namespace lueders {

void require_hermitian_observable(const Operator& b, const Tolerances& tol) {
    const double r = hermitian_residual(b);
    if (r > tol.hermitian_tol) {
        std::ostringstream os;
        os << "observable: max |B - B^dagger| = " << r << " exceeds " << tol.hermitian_tol;
        throw Error(ErrorKind::NotHermitian, os.str());
    }
}

DensityOperator lueders_sharp(const ProjectiveFamily& f, const DensityOperator& rho, const Tolerances& tol) {
    require_same_dim(f.projector(0), rho.op(), "lueders_sharp");
    Operator out(rho.dim());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Operator& p = f.projector(i);
        out += sandwich(p, rho.op(), p);
    }
    return DensityOperator::make(hermitian_part(out), tol);
}

Operator apply_lueders(const EffectFamily& f, const Operator& rho) {
    require_same_dim(f[0].op(), rho, "lueders_unsharp");
    Operator out(rho.dim());
    for (const Effect& e : f.effects()) {
        out += sandwich(e.sqrt(), rho, e.sqrt());
    }
    return hermitian_part(out);
}

DensityOperator lueders_unsharp(const EffectFamily& f, const DensityOperator& rho, const Tolerances& tol) {
    return DensityOperator::make(apply_lueders(f, rho.op()), tol);
}

SelectiveOutcome selective_outcome(const EffectFamily& f, std::size_t i, const DensityOperator& rho,
                                   const Tolerances& tol) {
    if (i >= f.size()) {
        throw Error(ErrorKind::IndexOutOfRange,
                    "outcome " + std::to_string(i) + " of a family with " + std::to_string(f.size()) + " outcomes");
    }
    require_same_dim(f[i].op(), rho.op(), "selective_outcome");
    const double p = trace_product_real(f[i].op(), rho.op());
    if (p <= tol.zero_tol) {
        return {p, std::nullopt};
    }
    Operator post = hermitian_part(sandwich(f[i].sqrt(), rho.op(), f[i].sqrt()));
    // Normalise by the post-operator's own trace: equal to p in exact
    // arithmetic, and immune to cancellation when p is small.
    post *= 1.0 / post.trace().real();
    return {p, DensityOperator::make(post, tol)};
}

Operator heisenberg_dual(const EffectFamily& f, const Operator& b, const Tolerances& tol) {
    require_same_dim(f[0].op(), b, "heisenberg_dual");
    require_hermitian_observable(b, tol);
    Operator out(b.dim());
    for (const Effect& e : f.effects()) {
        out += sandwich(e.sqrt(), b, e.sqrt());
    }
    return hermitian_part(out);
}

DeviationReport deviation(const EffectFamily& f, const Operator& b, const Tolerances& tol) {
    Operator dual = heisenberg_dual(f, b, tol);
    Operator dev = hermitian_part(b - dual);
    const double norm = operator_norm(dev);
    double max_comm = 0.0;
    for (const Effect& e : f.effects()) {
        max_comm = std::max(max_comm, operator_norm(commutator(e.op(), b)));
    }
    return DeviationReport{norm, std::move(dev), max_comm, norm <= tol.zero_tol, b.dim(), f.size()};
}

}  // namespace lueders
