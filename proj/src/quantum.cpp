#include "lueders/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lueders/error.hpp"

namespace lueders {
namespace {

void require_dim_match(const std::vector<Operator>& ops) {
    for (const auto& op : ops) {
        require_same_dim(ops.front(), op, "effect family");
    }
}

}  // namespace

Effect::Effect(Operator op, EigenSystem eig)
    : op_(std::move(op)),
      eig_(std::move(eig)),
      sqrt_(sqrt_from_eigensystem(eig_)) {}

Effect Effect::make(const Operator& a, const Tolerances& tol) {
    EigenSystem es = eigh(a, tol);
    const double lo = es.values.front();
    const double hi = es.values.back();
    if (lo < -tol.psd_tol || hi > 1.0 + tol.psd_tol) {
        std::ostringstream os;
        os << "spectrum [" << lo << ", " << hi << "] is not inside [0, 1]";
        throw Error(ErrorKind::SpectrumOutOfRange, os.str());
    }
    return Effect(a, std::move(es));
}

Effect complement(const Effect& e) {
    const std::size_t d = e.dim();
    Operator c = Operator::identity(d);
    c -= e.op();
    EigenSystem es = e.eig_;
    // I - E shares the eigenvectors; flip and reverse to keep ascending order.
    for (double& v : es.values) {
        v = 1.0 - v;
    }
    std::reverse(es.values.begin(), es.values.end());
    Operator reversed(d);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            reversed(i, k) = es.vectors(i, d - 1 - k);
        }
    }
    es.vectors = std::move(reversed);
    return Effect(std::move(c), std::move(es));
}

EffectFamily EffectFamily::make(const std::vector<Operator>& ops, const Tolerances& tol) {
    if (ops.empty()) {
        throw Error(ErrorKind::InvalidArgument, "effect family needs at least one effect");
    }
    require_dim_match(ops);
    std::vector<Effect> effects;
    effects.reserve(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
        try {
            effects.push_back(Effect::make(ops[i], tol));
        } catch (const Error& e) {
            throw Error(e.kind(), "effect " + std::to_string(i) + ": " + e.detail());
        }
    }
    return from_effects(std::move(effects), tol);
}

EffectFamily EffectFamily::from_effects(std::vector<Effect> effects, const Tolerances& tol) {
    if (effects.empty()) {
        throw Error(ErrorKind::InvalidArgument, "effect family needs at least one effect");
    }
    if (effects.size() > tol.max_outcomes) {
        throw Error(ErrorKind::TooManyOutcomes, std::to_string(effects.size()) + " outcomes exceed the limit of " +
                                                    std::to_string(tol.max_outcomes));
    }
    const std::size_t d = effects.front().dim();
    Operator sum(d);
    for (const auto& e : effects) {
        require_same_dim(sum, e.op(), "effect family");
        sum += e.op();
    }
    sum -= Operator::identity(d);
    const double residual = operator_norm(hermitian_part(sum));
    if (residual > tol.zero_tol) {
        std::ostringstream os;
        os << "||sum_i E_i - I|| = " << residual << " exceeds " << tol.zero_tol;
        throw Error(ErrorKind::Incomplete, os.str());
    }
    return EffectFamily(std::move(effects), residual);
}

ProjectivityReport is_projective(const EffectFamily& f, const Tolerances& tol) {
    ProjectivityReport r{true, 0.0, 0.0};
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Operator& e = f[i].op();
        r.max_idempotency_residual = std::max(r.max_idempotency_residual, operator_norm(hermitian_part(e * e - e)));
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            r.max_orthogonality_residual = std::max(r.max_orthogonality_residual, operator_norm(e * f[j].op()));
        }
    }
    r.projective = r.max_idempotency_residual <= tol.zero_tol && r.max_orthogonality_residual <= tol.zero_tol;
    return r;
}

ProjectiveFamily ProjectiveFamily::make(EffectFamily f, const Tolerances& tol) {
    const ProjectivityReport r = is_projective(f, tol);
    if (!r.projective) {
        std::ostringstream os;
        os << "family is not projective: max ||E^2 - E|| = " << r.max_idempotency_residual
           << ", max ||E_i E_j|| = " << r.max_orthogonality_residual;
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
    return ProjectiveFamily(std::move(f));
}

DensityOperator DensityOperator::make(const Operator& a, const Tolerances& tol) {
    const double herm = hermitian_residual(a);
    if (herm > tol.hermitian_tol) {
        std::ostringstream os;
        os << "max |rho - rho^dagger| = " << herm;
        throw Error(ErrorKind::NotHermitian, os.str());
    }
    const double tr = a.trace().real();
    if (std::abs(tr - 1.0) > tol.zero_tol) {
        std::ostringstream os;
        os << "trace " << tr << " differs from 1 by more than " << tol.zero_tol;
        throw Error(ErrorKind::NotADensity, os.str());
    }
    if (!cholesky_psd(a, tol.psd_tol)) {
        const double lo = eigvalsh(a, tol).front();
        std::ostringstream os;
        os << "min eigenvalue " << lo << " < -" << tol.psd_tol;
        throw Error(ErrorKind::NotPositive, os.str());
    }
    return DensityOperator(a);
}

double trace_product_real(const Operator& a, const Operator& b) {
    const std::size_t d = a.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            s += a(i, j).real() * b(j, i).real() - a(i, j).imag() * b(j, i).imag();
        }
    }
    return s;
}

double expectation(const DensityOperator& rho, const Operator& b, const Tolerances& tol) {
    require_same_dim(rho.op(), b, "expectation");
    const double herm = hermitian_residual(b);
    if (herm > tol.hermitian_tol) {
        std::ostringstream os;
        os << "observable: max |B - B^dagger| = " << herm;
        throw Error(ErrorKind::NotHermitian, os.str());
    }
    const std::size_t d = b.dim();
    cplx t = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            t += rho.op()(i, j) * b(j, i);
        }
    }
    const double scale = std::max(1.0, b.max_abs() * static_cast<double>(d));
    if (std::abs(t.imag()) > tol.zero_tol * scale) {
        std::ostringstream os;
        os << "tr[rho B] has imaginary part " << t.imag();
        throw Error(ErrorKind::NotHermitian, os.str());
    }
    return t.real();
}

}  // namespace lueders
