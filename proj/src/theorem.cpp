#include "lueders/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lueders/channel.hpp"
#include "lueders/error.hpp"

namespace lueders {
namespace {

bool in_gray_band(double value, double tol, double gray_factor) {
    return value > tol && value <= gray_factor * tol;
}

double max_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

std::vector<double> peel_residuals(const Operator& p, const EffectFamily& f) {
    std::vector<double> r;
    r.reserve(f.size());
    for (const Effect& e : f.effects()) {
        const Operator sp = e.sqrt() * p;
        r.push_back(operator_norm(sp - p * sp));
    }
    return r;
}

}  // namespace

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Consistent: return "consistent";
        case Verdict::Inconsistent: return "inconsistent";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

Verdict biconditional_verdict(double preserve_value, double preserve_tol, double commute_value, double commute_tol,
                              double gray_factor) {
    const bool preserved = preserve_value <= preserve_tol;
    const bool commutes = commute_value <= commute_tol;
    if (preserved == commutes) {
        return Verdict::Consistent;
    }
    if (in_gray_band(preserve_value, preserve_tol, gray_factor) ||
        in_gray_band(commute_value, commute_tol, gray_factor)) {
        return Verdict::Inconclusive;
    }
    return Verdict::Inconsistent;
}

// ---------------------------------------------------------------------------
// Peeling

PeelStep peel_level(const Operator& b_cur, const EffectFamily& f, const Tolerances& tol) {
    require_same_dim(f[0].op(), b_cur, "peel_level");
    const double b = operator_norm(hermitian_part(b_cur));
    if (b <= tol.zero_tol) {
        std::ostringstream os;
        os << "||B_cur|| = " << b << "; peeling is complete";
        throw Error(ErrorKind::ZeroOperator, os.str());
    }
    SpectralDecomposition sd = eig_hermitian(b_cur, tol);
    SpectralCluster& top = sd.clusters.front();
    Operator next = b_cur;
    next.add_scaled(-b, top.projector);
    std::vector<double> residuals = peel_residuals(top.projector, f);
    return PeelStep{b, std::move(top.projector), top.multiplicity, hermitian_part(next), std::move(residuals)};
}

Prop1Report check_prop1(const EffectFamily& f, const Operator& b, const Tolerances& tol) {
    require_same_dim(f[0].op(), b, "check_prop1");
    require_hermitian_observable(b, tol);
    const std::size_t d = b.dim();

    Prop1Report rep{};
    rep.dim = d;
    rep.n_outcomes = f.size();
    rep.b_norm = operator_norm(hermitian_part(b));

    const DeviationReport dev = deviation(f, b, tol);
    rep.deviation_norm = dev.deviation_norm;
    rep.max_commutator_norm = dev.max_commutator_norm;

    // Peeling needs B >= 0 so that the top eigenvalue is ||B_cur||.
    Operator shifted = hermitian_part(b);
    const double lowest = eigvalsh(shifted, tol).front();
    rep.shift = lowest < -tol.psd_tol ? rep.b_norm : 0.0;
    if (rep.shift > 0.0) {
        shifted.add_scaled(rep.shift, Operator::identity(d));
    }
    rep.cluster_count = eig_hermitian(shifted, tol).clusters.size();

    Operator current = shifted;
    Operator covered(d);
    Operator rebuilt(d);
    for (std::size_t level = 1; level <= d; ++level) {
        PeelLevel pl{};
        pl.level = level;
        try {
            PeelStep step = peel_level(current, f, tol);
            pl.eigenvalue = step.eigenvalue;
            pl.projector = std::move(step.projector);
            pl.multiplicity = step.multiplicity;
            pl.residuals = std::move(step.residuals);
            current = std::move(step.next);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroOperator) {
                throw;
            }
            Operator rest = Operator::identity(d) - covered;
            if (operator_norm(rest) <= 0.5) {
                break;  // the whole space is already peeled
            }
            pl.eigenvalue = 0.0;
            pl.projector = hermitian_part(rest);
            pl.multiplicity = static_cast<std::size_t>(std::lround(pl.projector.trace().real()));
            pl.residuals = peel_residuals(pl.projector, f);
            pl.zero_remainder = true;
        }
        pl.max_residual = max_of(pl.residuals);
        pl.commutes = pl.max_residual <= tol.zero_tol;
        covered += pl.projector;
        rebuilt.add_scaled(pl.eigenvalue, pl.projector);
        const bool last = pl.zero_remainder;
        rep.levels.push_back(std::move(pl));
        if (last) {
            break;
        }
    }
    rep.reconstruction_residual = operator_norm(hermitian_part(rebuilt - shifted));

    rep.all_commute = std::all_of(rep.levels.begin(), rep.levels.end(), [](const PeelLevel& l) { return l.commutes; });
    for (const PeelLevel& l : rep.levels) {
        if (!l.commutes) {
            rep.first_failing_level = l.level;
            break;
        }
    }

    const double comm_tol = tol.comm_rel_tol * rep.b_norm;
    const double dev_tol = tol.dev_rel_tol * rep.b_norm;
    rep.levels_match_commutators = rep.all_commute == (rep.max_commutator_norm <= comm_tol);

    double peel_value = 0.0;
    for (const PeelLevel& l : rep.levels) {
        peel_value = std::max(peel_value, l.max_residual);
    }
    rep.verdict = biconditional_verdict(rep.deviation_norm, dev_tol, peel_value, tol.zero_tol, tol.gray_factor);
    if (rep.verdict == Verdict::Consistent && !rep.levels_match_commutators) {
        const bool gray = in_gray_band(peel_value, tol.zero_tol, tol.gray_factor) ||
                          in_gray_band(rep.max_commutator_norm, comm_tol, tol.gray_factor);
        rep.verdict = gray ? Verdict::Inconclusive : Verdict::Inconsistent;
    }
    rep.verdict_consistent = rep.verdict == Verdict::Consistent;
    return rep;
}

// ---------------------------------------------------------------------------
// Binary families

Prop2Report check_prop2(const Effect& e, const Operator& b, const Tolerances& tol) {
    require_same_dim(e.op(), b, "check_prop2");
    require_hermitian_observable(b, tol);

    Prop2Report rep{};
    rep.dim = b.dim();
    rep.b_norm = operator_norm(hermitian_part(b));

    const EffectFamily binary = EffectFamily::from_effects({e, complement(e)}, tol);
    rep.deviation_norm = deviation(binary, b, tol).deviation_norm;
    rep.commutator_norm = operator_norm(commutator(e.op(), b));

    const Operator& s = e.sqrt();
    // EB + BE - 2 S B S, with E taken as given (not as S*S)
    Operator gap = e.op() * b + b * e.op();
    gap.add_scaled(-2.0, sandwich(s, b, s));
    const Operator sb = commutator(s, b);
    const Operator dd = commutator(s, sb);
    rep.anticommutator_gap_norm = operator_norm(gap);
    rep.double_comm_norm = operator_norm(dd);
    rep.proof_identity_residual = (gap - dd).max_abs();

    rep.c_op = cplx(0.0, 1.0) * sb;
    rep.c_hermitian_residual = hermitian_residual(rep.c_op);
    rep.c_norm = operator_norm(rep.c_op);
    rep.radius_seq = spectral_radius_sequence(rep.c_op, tol.n_max);
    rep.radius_tail = rep.radius_seq.back();
    rep.quasi_nilpotent = rep.radius_tail <= tol.radius_tol;
    rep.chain_holds = rep.deviation_norm > tol.zero_tol || (rep.quasi_nilpotent && rep.c_norm <= tol.zero_tol);

    rep.verdict = biconditional_verdict(rep.deviation_norm, tol.dev_rel_tol * rep.b_norm, rep.commutator_norm,
                                        tol.comm_rel_tol * rep.b_norm, tol.gray_factor);
    rep.verdict_consistent = rep.verdict == Verdict::Consistent;
    return rep;
}

// ---------------------------------------------------------------------------
// Inner derivations

Operator derivation_power(const Operator& x, const Operator& a, std::size_t n) {
    require_same_dim(x, a, "derivation_power");
    if (n == 0) {
        throw Error(ErrorKind::InvalidArgument, "derivation power must be >= 1");
    }
    Operator out = a;
    for (std::size_t k = 0; k < n; ++k) {
        out = commutator(x, out);
    }
    return out;
}

LemmaReport check_lemma(const Operator& x, const Operator& a, const Tolerances& tol) {
    require_same_dim(x, a, "check_lemma");
    if (tol.n_max < 2) {
        throw Error(ErrorKind::InvalidArgument, "lemma check needs n_max >= 2");
    }
    LemmaReport rep{};
    rep.dim = x.dim();
    rep.x_norm = operator_norm(x);
    rep.a_norm = operator_norm(a);
    rep.da = commutator(x, a);
    rep.hypothesis_residual = operator_norm(commutator(x, rep.da));
    if (rep.hypothesis_residual > tol.zero_tol) {
        std::ostringstream os;
        os << "||d^2 a|| = " << rep.hypothesis_residual << " exceeds " << tol.zero_tol;
        throw Error(ErrorKind::HypothesisViolated, os.str());
    }

    const double d_bound = 2.0 * rep.x_norm;
    Operator a_pow = a;  // a^n
    Operator da_pow = rep.da;  // (da)^n
    rep.identity_holds = true;
    for (std::size_t n = 1; n <= tol.n_max; ++n) {
        if (n > 1) {
            a_pow = a_pow * a;
            da_pow = da_pow * rep.da;
        }
        const double nd = static_cast<double>(n);
        const double factorial = std::tgamma(nd + 1.0);
        Operator lhs = derivation_power(x, a_pow, n);
        lhs.add_scaled(-factorial, da_pow);
        const double residual = operator_norm(lhs);
        const double bound = factorial * std::max(1.0, std::pow(d_bound * rep.a_norm, nd)) * tol.zero_tol;
        rep.identity_residuals.push_back(residual);
        rep.identity_bounds.push_back(bound);
        rep.identity_holds = rep.identity_holds && residual <= bound;
    }

    rep.radius_seq = spectral_radius_sequence(rep.da, tol.n_max);
    rep.envelope_holds = true;
    for (std::size_t n = 1; n <= tol.n_max; ++n) {
        const double nd = static_cast<double>(n);
        const double env = std::exp(-std::lgamma(nd + 1.0) / nd) * d_bound * rep.a_norm;
        rep.envelope.push_back(env);
        rep.envelope_holds = rep.envelope_holds && rep.radius_seq[n - 1] <= env * (1.0 + 1e-12) + tol.zero_tol;
    }
    rep.radius_tail = rep.radius_seq.back();
    rep.quasi_nilpotent = rep.radius_tail <= tol.radius_tol;
    rep.passed = rep.identity_holds && rep.envelope_holds && rep.quasi_nilpotent;
    return rep;
}

}  // namespace lueders
