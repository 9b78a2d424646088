#include "lueders/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lueders/error.hpp"
#include "lueders/kernels.hpp"

namespace lueders {
namespace {

using EigenMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using RowMap = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

EigenMat to_eigen(const Operator& a) {
    const auto n = static_cast<Eigen::Index>(a.dim());
    return RowMap(a.data().data(), n, n);
}

Operator from_eigen(const EigenMat& m) {
    const auto n = static_cast<std::size_t>(m.rows());
    Operator out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

void require_hermitian(const Operator& a, const Tolerances& tol) {
    const double r = hermitian_residual(a);
    if (r > tol.hermitian_tol) {
        std::ostringstream os;
        os << "max |A - A^dagger| = " << r << " exceeds " << tol.hermitian_tol;
        throw Error(ErrorKind::NotHermitian, os.str());
    }
}

// Eigen only reads the lower triangle; feed it the exact hermitian part so the
// answer does not depend on which triangle carried the rounding noise.
EigenMat symmetrized(const Operator& a) {
    return to_eigen(hermitian_part(a));
}

}  // namespace

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim == 0) {
        throw Error(ErrorKind::InvalidArgument, "operator dimension must be >= 1");
    }
}

Operator::Operator(std::size_t dim, std::vector<cplx> entries) : dim_(dim), data_(std::move(entries)) {
    if (dim == 0) {
        throw Error(ErrorKind::InvalidArgument, "operator dimension must be >= 1");
    }
    if (data_.size() != dim * dim) {
        throw Error(ErrorKind::DimMismatch, "entry count " + std::to_string(data_.size()) +
                                                " is not dim^2 for dim " + std::to_string(dim));
    }
}

Operator::Operator(std::initializer_list<std::initializer_list<cplx>> rows) : Operator(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != dim_) {
            throw Error(ErrorKind::DimMismatch, "ragged operator literal");
        }
        std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
        ++i;
    }
}

Operator Operator::identity(std::size_t dim) {
    Operator out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out(i, i) = 1.0;
    }
    return out;
}

Operator Operator::diagonal(std::span<const double> diag) {
    Operator out(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        out(i, i) = diag[i];
    }
    return out;
}

Operator Operator::diagonal(std::initializer_list<double> diag) {
    return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

Operator Operator::outer(std::span<const cplx> v) {
    Operator out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            out(i, j) = v[i] * std::conj(v[j]);
        }
    }
    return out;
}

Operator Operator::adjoint() const {
    Operator out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            out(j, i) = std::conj((*this)(i, j));
        }
    }
    return out;
}

cplx Operator::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

double Operator::max_abs() const { return kernels::active().max_abs(data_.size(), data_.data()); }

double Operator::frobenius() const {
    double s = 0.0;
    for (const cplx& z : data_) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

Operator& Operator::operator+=(const Operator& o) {
    require_same_dim(*this, o, "operator +");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += o.data_[i];
    }
    return *this;
}

Operator& Operator::operator-=(const Operator& o) {
    require_same_dim(*this, o, "operator -");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= o.data_[i];
    }
    return *this;
}

Operator& Operator::operator*=(cplx s) {
    for (cplx& z : data_) {
        z = {s.real() * z.real() - s.imag() * z.imag(), s.real() * z.imag() + s.imag() * z.real()};
    }
    return *this;
}

Operator& Operator::add_scaled(cplx s, const Operator& o) {
    require_same_dim(*this, o, "add_scaled");
    kernels::active().axpy(data_.size(), s, o.data_.data(), data_.data());
    return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator *");
    Operator c(a.dim());
    kernels::active().gemm(a.dim(), a.data().data(), b.data().data(), c.data().data());
    return c;
}

Operator mul_adjoint(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "mul_adjoint");
    Operator c(a.dim());
    kernels::active().gemm_adj(a.dim(), a.data().data(), b.data().data(), c.data().data());
    return c;
}

Operator sandwich(const Operator& a, const Operator& b, const Operator& c) { return (a * b) * c; }

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimMismatch, std::string(what) + ": " + std::to_string(a.dim()) + " vs " +
                                                std::to_string(b.dim()));
    }
}

Operator commutator(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "commutator");
    Operator ab = a * b;
    ab -= b * a;
    return ab;
}

Operator hermitian_part(const Operator& a) {
    const std::size_t d = a.dim();
    Operator out(d);
    for (std::size_t i = 0; i < d; ++i) {
        out(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < d; ++j) {
            const cplx h = 0.5 * (a(i, j) + std::conj(a(j, i)));
            out(i, j) = h;
            out(j, i) = std::conj(h);
        }
    }
    return out;
}

double hermitian_residual(const Operator& a) {
    const std::size_t d = a.dim();
    double r = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            r = std::max(r, std::abs(a(i, j) - std::conj(a(j, i))));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Spectral tools

std::vector<cplx> EigenSystem::vector(std::size_t k) const {
    const std::size_t d = vectors.dim();
    std::vector<cplx> v(d);
    for (std::size_t i = 0; i < d; ++i) {
        v[i] = vectors(i, k);
    }
    return v;
}

EigenSystem eigh(const Operator& a, const Tolerances& tol) {
    require_hermitian(a, tol);
    Eigen::SelfAdjointEigenSolver<EigenMat> solver(symmetrized(a), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::InvalidArgument, "hermitian eigensolver did not converge");
    }
    const auto& ev = solver.eigenvalues();
    return EigenSystem{std::vector<double>(ev.data(), ev.data() + ev.size()), from_eigen(solver.eigenvectors())};
}

std::vector<double> eigvalsh(const Operator& a, const Tolerances& tol) {
    require_hermitian(a, tol);
    Eigen::SelfAdjointEigenSolver<EigenMat> solver(symmetrized(a), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::size_t SpectralDecomposition::dim() const {
    std::size_t d = 0;
    for (const auto& c : clusters) {
        d += c.multiplicity;
    }
    return d;
}

Operator SpectralDecomposition::reconstruct() const {
    Operator out(dim());
    for (const auto& c : clusters) {
        out.add_scaled(c.eigenvalue, c.projector);
    }
    return out;
}

SpectralDecomposition eig_hermitian(const Operator& a, const Tolerances& tol) {
    const EigenSystem es = eigh(a, tol);
    const std::size_t d = a.dim();
    double scale = 0.0;
    for (double v : es.values) {
        scale = std::max(scale, std::abs(v));
    }
    const double gap = tol.cluster_tol * std::max(1.0, scale);

    // Walk eigenvalues from the top, opening a new cluster whenever the gap to
    // the previous (lower-index-in-descending-order) eigenvalue exceeds `gap`.
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < d; ++r) {
        const std::size_t k = d - 1 - r;
        if (groups.empty() || es.values[groups.back().back()] - es.values[k] > gap) {
            groups.emplace_back();
        }
        groups.back().push_back(k);
    }

    SpectralDecomposition sd;
    sd.clusters.reserve(groups.size());
    for (const auto& g : groups) {
        Operator basis(d);  // columns of the cluster, zero elsewhere
        double mean = 0.0;
        for (std::size_t k : g) {
            mean += es.values[k];
            for (std::size_t i = 0; i < d; ++i) {
                basis(i, k) = es.vectors(i, k);
            }
        }
        mean /= static_cast<double>(g.size());
        sd.clusters.push_back({mean, hermitian_part(mul_adjoint(basis, basis)), g.size()});
    }
    return sd;
}

Operator sqrt_from_eigensystem(const EigenSystem& es) {
    const double top = std::max(std::abs(es.values.front()), std::abs(es.values.back()));
    const double floor = 4.0 * static_cast<double>(es.values.size()) * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, top);
    return hermitian_part(hermitian_function(es, [floor](double v) { return v > floor ? std::sqrt(v) : 0.0; }));
}

Operator psd_sqrt(const Operator& e, const Tolerances& tol) {
    const EigenSystem es = eigh(e, tol);
    if (es.values.front() < -tol.psd_tol) {
        std::ostringstream os;
        os << "min eigenvalue " << es.values.front() << " < -" << tol.psd_tol;
        throw Error(ErrorKind::NotPositive, os.str());
    }
    return sqrt_from_eigensystem(es);
}

Operator psd_inv_sqrt(const Operator& m, const Tolerances& tol) {
    const EigenSystem es = eigh(m, tol);
    if (es.values.front() < tol.psd_tol) {
        std::ostringstream os;
        os << "min eigenvalue " << es.values.front() << " < " << tol.psd_tol;
        throw Error(ErrorKind::NotPositive, os.str());
    }
    return hermitian_part(hermitian_function(es, [](double v) { return 1.0 / std::sqrt(v); }));
}

double operator_norm(const Operator& a) {
    const double amax = a.max_abs();
    if (amax == 0.0) {
        return 0.0;
    }
    if (hermitian_residual(a) == 0.0) {
        Eigen::SelfAdjointEigenSolver<EigenMat> solver(to_eigen(a), Eigen::EigenvaluesOnly);
        const auto& ev = solver.eigenvalues();
        return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    }
    // Scale to unit max entry before forming A^dagger A so tiny operators
    // (commutators of nearly commuting pairs) do not underflow.
    Operator s = a;
    s *= 1.0 / amax;
    Operator gram = s.adjoint() * s;
    Eigen::SelfAdjointEigenSolver<EigenMat> solver(symmetrized(gram), Eigen::EigenvaluesOnly);
    const double top = solver.eigenvalues()(solver.eigenvalues().size() - 1);
    return amax * std::sqrt(std::max(top, 0.0));
}

Operator power(const Operator& a, std::size_t n) {
    Operator result = Operator::identity(a.dim());
    Operator base = a;
    while (n > 0) {
        if (n & 1U) {
            result = result * base;
        }
        n >>= 1U;
        if (n > 0) {
            base = base * base;
        }
    }
    return result;
}

std::vector<double> spectral_radius_sequence(const Operator& a, std::size_t n_max) {
    if (n_max == 0) {
        throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
    }
    std::vector<double> seq(n_max, 0.0);
    const double c = operator_norm(a);
    if (c == 0.0) {
        return seq;
    }
    // s_n(A) = c * s_n(A / c). The running power is renormalised every step
    // and its log-scale carried separately so long tails do not underflow.
    Operator unit = a;
    unit *= 1.0 / c;
    Operator p = unit;
    double log_scale = 0.0;
    seq[0] = c;
    for (std::size_t n = 2; n <= n_max; ++n) {
        p = p * unit;
        const double pn = operator_norm(p);
        if (pn == 0.0) {
            // exact zero stays zero for every later power
            break;
        }
        log_scale += std::log(pn);
        p *= 1.0 / pn;
        seq[n - 1] = c * std::exp(log_scale / static_cast<double>(n));
    }
    return seq;
}

bool cholesky_psd(const Operator& a, double shift) {
    EigenMat m = symmetrized(a);
    m.diagonal().array() += shift;
    Eigen::LLT<EigenMat> llt(m);
    return llt.info() == Eigen::Success;
}

}  // namespace lueders
