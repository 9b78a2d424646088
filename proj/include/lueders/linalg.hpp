#pragma once
// Dense complex operators on C^d and the handful of spectral tools the rest
// of the library is built from.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "lueders/tolerances.hpp"

namespace lueders {

using cplx = std::complex<double>;

/// Square complex matrix, row-major. dim() >= 1 always.
class Operator {
public:
    Operator() : Operator(std::size_t{1}) {}
    explicit Operator(std::size_t dim);
    /// Row-major entries; entries.size() must equal dim * dim.
    Operator(std::size_t dim, std::vector<cplx> entries);
    /// Rows given literally, e.g. {{0, 1}, {1, 0}}.
    Operator(std::initializer_list<std::initializer_list<cplx>> rows);

    static Operator zero(std::size_t dim) { return Operator(dim); }
    static Operator identity(std::size_t dim);
    static Operator diagonal(std::span<const double> diag);
    static Operator diagonal(std::initializer_list<double> diag);
    /// |v><v|
    static Operator outer(std::span<const cplx> v);

    std::size_t dim() const noexcept { return dim_; }
    cplx operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    std::span<const cplx> data() const noexcept { return data_; }
    std::span<cplx> data() noexcept { return data_; }

    Operator adjoint() const;
    cplx trace() const;
    /// Largest entry modulus.
    double max_abs() const;
    double frobenius() const;

    Operator& operator+=(const Operator& o);
    Operator& operator-=(const Operator& o);
    Operator& operator*=(cplx s);
    /// this += s * o
    Operator& add_scaled(cplx s, const Operator& o);

    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator-(Operator a) { return a *= -1.0; }
    friend Operator operator*(cplx s, Operator a) { return a *= s; }
    friend Operator operator*(Operator a, cplx s) { return a *= s; }
    /// Matrix product through the active kernel set.
    friend Operator operator*(const Operator& a, const Operator& b);

    friend bool operator==(const Operator&, const Operator&) = default;

private:
    std::size_t dim_;
    std::vector<cplx> data_;
};

/// a * b^dagger without materialising the adjoint.
Operator mul_adjoint(const Operator& a, const Operator& b);
/// a * b * c
Operator sandwich(const Operator& a, const Operator& b, const Operator& c);

Operator commutator(const Operator& a, const Operator& b);
Operator hermitian_part(const Operator& a);
/// max |(A - A^dagger)_ij|; exact zero for hermitian storage.
double hermitian_residual(const Operator& a);
/// Throws DimMismatch unless the dimensions agree.
void require_same_dim(const Operator& a, const Operator& b, const char* what);

/// Eigenvalues (ascending) and orthonormal eigenvectors as columns of `vectors`.
struct EigenSystem {
    std::vector<double> values;
    Operator vectors;
    std::vector<cplx> vector(std::size_t k) const;
};

/// Raw hermitian eigensolve; throws NotHermitian beyond tol.hermitian_tol.
EigenSystem eigh(const Operator& a, const Tolerances& tol = {});
/// Eigenvalues only, ascending.
std::vector<double> eigvalsh(const Operator& a, const Tolerances& tol = {});

struct SpectralCluster {
    double eigenvalue;
    Operator projector;
    std::size_t multiplicity;
};

/// Distinct eigenvalues in strictly decreasing order with their projectors.
struct SpectralDecomposition {
    std::vector<SpectralCluster> clusters;

    std::size_t dim() const;
    /// sum_k b_k P_k
    Operator reconstruct() const;
};

SpectralDecomposition eig_hermitian(const Operator& a, const Tolerances& tol = {});

/// f applied to the spectrum: U diag(f(lambda)) U^dagger.
template <class F>
Operator hermitian_function(const EigenSystem& es, F&& f) {
    const std::size_t d = es.vectors.dim();
    Operator scaled = es.vectors;
    for (std::size_t k = 0; k < d; ++k) {
        const double fk = f(es.values[k]);
        for (std::size_t i = 0; i < d; ++i) {
            scaled(i, k) *= fk;
        }
    }
    return mul_adjoint(scaled, es.vectors);
}

/// Square root through a precomputed eigensystem. Eigenvalues at or below
/// the rounding floor 4 d eps max(1, |lambda|max) are taken as zero; otherwise
/// a computed projector, whose null eigenvalues come out around 1e-16, would
/// get a square root off by about 1e-8.
Operator sqrt_from_eigensystem(const EigenSystem& es);
/// Positive square root; eigenvalues in [-psd_tol, 0) are clamped to zero.
Operator psd_sqrt(const Operator& e, const Tolerances& tol = {});
/// Inverse square root of a positive definite operator. Throws NotPositive
/// when the smallest eigenvalue is below psd_tol.
Operator psd_inv_sqrt(const Operator& m, const Tolerances& tol = {});

/// Largest singular value.
double operator_norm(const Operator& a);

/// s_n = ||A^n||^{1/n}, n = 1..n_max.
std::vector<double> spectral_radius_sequence(const Operator& a, std::size_t n_max);

/// A^n by repeated squaring.
Operator power(const Operator& a, std::size_t n);

/// Cholesky-based test for A + shift*I >= 0 (A hermitian); cheaper than a full
/// eigensolve when only the sign of the spectrum matters.
bool cholesky_psd(const Operator& a, double shift);

}  // namespace lueders
