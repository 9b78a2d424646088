#include <doctest.h>

#include <cmath>

#include "lueders/ensembles.hpp"
#include "lueders/error.hpp"
#include "lueders/linalg.hpp"
#include "oracles.hpp"

using namespace lueders;

namespace {

const Operator kSx{{0.0, 1.0}, {1.0, 0.0}};
const Operator kSy{{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}};
const Operator kSz = Operator::diagonal({1.0, -1.0});

void check_decomposition_invariants(const SpectralDecomposition& sd, const Operator& a, const Tolerances& tol) {
    const std::size_t d = a.dim();
    CHECK(sd.dim() == d);
    Operator sum(d);
    for (std::size_t k = 0; k < sd.clusters.size(); ++k) {
        const Operator& p = sd.clusters[k].projector;
        CHECK(oracle::max_entry_diff(p * p, p) <= 1e-10);
        CHECK(hermitian_residual(p) <= 1e-12);
        CHECK(std::abs(p.trace().real() - static_cast<double>(sd.clusters[k].multiplicity)) <= 1e-10);
        if (k > 0) {
            CHECK(sd.clusters[k - 1].eigenvalue - sd.clusters[k].eigenvalue > tol.cluster_tol);
        }
        for (std::size_t j = k + 1; j < sd.clusters.size(); ++j) {
            CHECK(operator_norm(p * sd.clusters[j].projector) <= 1e-10);
        }
        sum += p;
    }
    CHECK(operator_norm(sum - Operator::identity(d)) <= 1e-10);
    CHECK(operator_norm(sd.reconstruct() - a) <= tol.reconstruct_tol * std::max(1.0, operator_norm(a)));
}

}  // namespace

TEST_SUITE("linalg") {
    TEST_CASE("eig_hermitian: identity is a single triple cluster") {
        const auto sd = eig_hermitian(Operator::identity(3));
        REQUIRE(sd.clusters.size() == 1);
        CHECK(sd.clusters[0].eigenvalue == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(sd.clusters[0].multiplicity == 3);
        CHECK(oracle::max_entry_diff(sd.clusters[0].projector, Operator::identity(3)) <= 1e-14);
    }

    TEST_CASE("eig_hermitian: diag(1, 1, 0)") {
        const auto sd = eig_hermitian(Operator::diagonal({1.0, 1.0, 0.0}));
        REQUIRE(sd.clusters.size() == 2);
        CHECK(sd.clusters[0].eigenvalue == doctest::Approx(1.0));
        CHECK(sd.clusters[0].multiplicity == 2);
        CHECK(oracle::max_entry_diff(sd.clusters[0].projector, Operator::diagonal({1.0, 1.0, 0.0})) <= 1e-14);
        CHECK(std::abs(sd.clusters[1].eigenvalue) <= 1e-15);
        CHECK(sd.clusters[1].multiplicity == 1);
        CHECK(oracle::max_entry_diff(sd.clusters[1].projector, Operator::diagonal({0.0, 0.0, 1.0})) <= 1e-14);
    }

    TEST_CASE("eig_hermitian: Pauli x splits into (I +- sx)/2") {
        const auto sd = eig_hermitian(kSx);
        REQUIRE(sd.clusters.size() == 2);
        const Operator p_plus = 0.5 * (Operator::identity(2) + kSx);
        const Operator p_minus = 0.5 * (Operator::identity(2) - kSx);
        CHECK(sd.clusters[0].eigenvalue == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(sd.clusters[1].eigenvalue == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(oracle::max_entry_diff(sd.clusters[0].projector, p_plus) <= 1e-14);
        CHECK(oracle::max_entry_diff(sd.clusters[1].projector, p_minus) <= 1e-14);
    }

    TEST_CASE("eig_hermitian merges a numerically split degenerate eigenvalue") {
        oracle::Gen g(3);
        Rng rng(3, 0);
        const Operator u = haar_unitary(5, rng);
        Operator a = u * Operator::diagonal({0.7, 0.7, 0.7, 0.2, 0.2}) * u.adjoint();
        a = hermitian_part(a);
        const auto sd = eig_hermitian(a);
        REQUIRE(sd.clusters.size() == 2);
        CHECK(sd.clusters[0].multiplicity == 3);
        CHECK(sd.clusters[1].multiplicity == 2);
        check_decomposition_invariants(sd, a, Tolerances{});
    }

    TEST_CASE("eig_hermitian rejects non-hermitian input and reports the violation") {
        const Operator a{{0.0, 1.0}, {0.0, 0.0}};
        try {
            (void)eig_hermitian(a);
            FAIL("expected NotHermitian");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotHermitian);
            CHECK(std::string(e.what()).find("1") != std::string::npos);
        }
    }

    TEST_CASE("eig_hermitian round-trips random hermitian matrices, dims 2-16") {
        oracle::Gen g(17);
        const Tolerances tol;
        for (int trial = 0; trial < 60; ++trial) {
            const std::size_t d = g.size(2, 16);
            const Operator a = g.hermitian(d);
            CAPTURE(d);
            check_decomposition_invariants(eig_hermitian(a, tol), a, tol);
        }
    }

    TEST_CASE("psd_sqrt examples") {
        CHECK(oracle::max_entry_diff(psd_sqrt(Operator::identity(3)), Operator::identity(3)) <= 1e-15);

        Operator e = Operator::diagonal({4.0 / 9.0, 1.0});
        CHECK(oracle::max_entry_diff(psd_sqrt(e), Operator::diagonal({2.0 / 3.0, 1.0})) <= 1e-15);

        const double lambda = 0.6;
        const Operator unsharp = 0.5 * (Operator::identity(2) + lambda * kSz);
        CHECK(oracle::max_entry_diff(psd_sqrt(unsharp), Operator::diagonal({std::sqrt(0.8), std::sqrt(0.2)})) <= 1e-15);
    }

    TEST_CASE("psd_sqrt clamps rounding-level negativity and rejects real negativity") {
        const Operator nearly = Operator::diagonal({-1e-12, 0.25});
        CHECK(oracle::max_entry_diff(psd_sqrt(nearly), Operator::diagonal({0.0, 0.5})) <= 1e-15);
        try {
            (void)psd_sqrt(Operator::diagonal({-1e-3, 1.0}));
            FAIL("expected NotPositive");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotPositive);
        }
    }

    TEST_CASE("psd_sqrt squares back to random PSD input") {
        oracle::Gen g(23);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t d = g.size(1, 12);
            Operator e = g.psd(d);
            e *= 1.0 / operator_norm(e);
            const Operator s = psd_sqrt(e);
            CHECK(operator_norm(s * s - e) <= 1e-10);
            CHECK(eigvalsh(s).front() >= -1e-12);
        }
    }

    TEST_CASE("operator_norm examples") {
        CHECK(operator_norm(Operator::zero(3)) == 0.0);
        CHECK(operator_norm(kSx) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(operator_norm(Operator::diagonal({0.3, -0.7})) == doctest::Approx(0.7).epsilon(1e-15));
    }

    TEST_CASE("operator_norm agrees with a power-iteration oracle") {
        oracle::Gen g(29);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t d = g.size(1, 10);
            const Operator a = g.matrix(d);
            CHECK(operator_norm(a) == doctest::Approx(oracle::power_norm(oracle::from(a))).epsilon(1e-9));
        }
        // nilpotent, non-normal
        CHECK(operator_norm(Operator{{0.0, 3.0}, {0.0, 0.0}}) == doctest::Approx(3.0).epsilon(1e-15));
    }

    TEST_CASE("operator_norm is submultiplicative") {
        oracle::Gen g(31);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t d = g.size(1, 10);
            const Operator a = g.matrix(d);
            const Operator b = g.matrix(d);
            CHECK(operator_norm(a * b) <= operator_norm(a) * operator_norm(b) * (1.0 + 1e-13));
        }
    }

    TEST_CASE("commutator examples") {
        CHECK(commutator(Operator::diagonal({1.0, 2.0}), Operator::diagonal({5.0, -3.0})).max_abs() == 0.0);
        const Operator expected = cplx(0.0, -2.0) * kSy;
        CHECK(oracle::max_entry_diff(commutator(kSx, kSz), expected) == 0.0);
        oracle::Gen g(37);
        const Operator a = g.matrix(4);
        CHECK(commutator(a, Operator::identity(4)).max_abs() <= 1e-15);
        CHECK_THROWS_AS(commutator(a, Operator::identity(3)), Error);
    }

    TEST_CASE("commutator is antisymmetric") {
        oracle::Gen g(41);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t d = g.size(1, 9);
            const Operator a = g.matrix(d);
            const Operator b = g.matrix(d);
            const Operator ab = commutator(a, b);
            const Operator ba = commutator(b, a);
            const double scale = std::max(1.0, ab.max_abs());
            CHECK((ab + ba).max_abs() <= 1e-15 * scale * static_cast<double>(d));
            // and equals the plain-loop oracle
            const auto ref = oracle::sub(oracle::mul(oracle::from(a), oracle::from(b)),
                                         oracle::mul(oracle::from(b), oracle::from(a)));
            CHECK(oracle::max_entry_diff(ab, oracle::to_op(ref)) <= 1e-13 * static_cast<double>(d));
        }
    }

    TEST_CASE("spectral_radius_sequence examples") {
        const auto nil = spectral_radius_sequence(Operator{{0.0, 1.0}, {0.0, 0.0}}, 8);
        CHECK(nil[0] == doctest::Approx(1.0).epsilon(1e-15));
        for (std::size_t n = 1; n < nil.size(); ++n) {
            CHECK(nil[n] == 0.0);
        }
        for (double s : spectral_radius_sequence(Operator::identity(3), 10)) {
            CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
        }
        for (double s : spectral_radius_sequence(Operator::diagonal({0.5, 0.25}), 12)) {
            CHECK(s == doctest::Approx(0.5).epsilon(1e-14));
        }
        CHECK_THROWS_AS(spectral_radius_sequence(Operator::identity(2), 0), Error);
    }

    TEST_CASE("spectral_radius_sequence of a hermitian operator converges to its norm") {
        oracle::Gen g(43);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t d = g.size(2, 10);
            Operator a = g.hermitian(d);
            a *= 1.0 / operator_norm(a);
            const auto seq = spectral_radius_sequence(a, 64);
            CHECK(std::abs(seq.back() - operator_norm(a)) <= 1e-8);
        }
    }

    TEST_CASE("spectral_radius_sequence tracks the spectral radius of a non-normal operator") {
        // upper triangular, eigenvalues 0.5 and 0.25, large off-diagonal
        const Operator a{{0.5, 10.0}, {0.0, 0.25}};
        const auto seq = spectral_radius_sequence(a, 256);
        CHECK(seq[0] > 10.0);
        CHECK(seq.back() < 0.6);
        CHECK(seq.back() > 0.5);
    }

    TEST_CASE("power uses exact repeated squaring") {
        const Operator a{{1.0, 1.0}, {0.0, 1.0}};
        const Operator a10 = power(a, 10);
        CHECK(a10(0, 1) == cplx(10.0));
        CHECK(power(a, 0) == Operator::identity(2));
    }

    TEST_CASE("Operator construction contracts") {
        CHECK_THROWS_AS(Operator(0), Error);
        CHECK_THROWS_AS(Operator(2, std::vector<cplx>(3)), Error);
        CHECK(Operator::identity(2).trace() == cplx(2.0));
    }
}
