#include <doctest.h>

#include <cmath>

#include "lueders/channel.hpp"
#include "lueders/ensembles.hpp"
#include "lueders/error.hpp"
#include "lueders/kernels.hpp"
#include "oracles.hpp"

using namespace lueders;

namespace {

const Operator kPlus = 0.5 * Operator{{1.0, 1.0}, {1.0, 1.0}};

EffectFamily z_basis() { return make_family({Operator::diagonal({1.0, 0.0}), Operator::diagonal({0.0, 1.0})}); }

EffectFamily unsharp_z(double lambda) {
    return make_family({0.5 * (Operator::identity(2) + lambda * pauli::z()),
                        0.5 * (Operator::identity(2) - lambda * pauli::z())});
}

// sum_i S_i X S_i with S_i the square roots computed here by a 2x2 closed
// form is not general; for random families the oracle instead takes square
// roots from the library's eigensystem and does the products with plain loops.
oracle::Mat kraus_sum(const EffectFamily& f, const oracle::Mat& x) {
    const std::size_t d = x.size();
    oracle::Mat out(d, std::vector<cplx>(d));
    for (const Effect& e : f.effects()) {
        const oracle::Mat s = oracle::from(e.sqrt());
        const oracle::Mat t = oracle::mul(oracle::mul(s, x), s);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                out[i][j] += t[i][j];
            }
        }
    }
    return out;
}

struct Triple {
    FamilyDraw draw;
    DensityOperator rho;
    Operator b;
};

Triple random_triple(std::uint64_t stream, std::size_t max_dim = 16, std::size_t max_n = 8) {
    Rng rng(2024, stream);
    EnsembleConfig cfg;
    cfg.dim = 2 + rng.index(max_dim - 1);
    cfg.n_outcomes = 1 + rng.index(max_n);
    cfg.regime.kind = static_cast<RegimeKind>(rng.index(3));
    auto draw = random_family(cfg, rng);
    auto rho = random_density(cfg.dim, rng);
    return {std::move(draw), std::move(rho), random_hermitian(cfg.dim, rng)};
}

}  // namespace

TEST_SUITE("lueders") {
    TEST_CASE("lueders_sharp examples") {
        const Tolerances tol;
        const auto single = ProjectiveFamily::make(make_family({Operator::identity(2)}));
        const auto rho = DensityOperator::make(kPlus);
        CHECK(oracle::max_entry_diff(lueders_sharp(single, rho).op(), kPlus) <= 1e-15);

        const auto z = ProjectiveFamily::make(z_basis());
        CHECK(oracle::max_entry_diff(lueders_sharp(z, rho).op(), 0.5 * Operator::identity(2)) <= 1e-15);

        const auto diag_rho = DensityOperator::make(Operator::diagonal({0.3, 0.7}));
        CHECK(oracle::max_entry_diff(lueders_sharp(z, diag_rho).op(), diag_rho.op()) <= tol.zero_tol);

        const auto rho3 = DensityOperator::make((1.0 / 3.0) * Operator::identity(3));
        CHECK_THROWS_AS(lueders_sharp(z, rho3), Error);
    }

    TEST_CASE("lueders_unsharp examples") {
        Rng rng(5, 0);
        const auto rho = random_density(3, rng);
        const auto halves = make_family({0.5 * Operator::identity(3), 0.5 * Operator::identity(3)});
        CHECK(oracle::max_entry_diff(lueders_unsharp(halves, rho).op(), rho.op()) <= 1e-15);

        // off-diagonals scaled by sqrt(1 - 0.36) = 0.8
        const Operator expected = 0.5 * (Operator::identity(2) + 0.8 * pauli::x());
        CHECK(oracle::max_entry_diff(lueders_unsharp(unsharp_z(0.6), DensityOperator::make(kPlus)).op(), expected) <=
              1e-15);
    }

    TEST_CASE("lueders_unsharp reduces to lueders_sharp on projective families") {
        for (std::uint64_t t = 0; t < 30; ++t) {
            Rng rng(77, t);
            EnsembleConfig cfg;
            cfg.dim = 2 + rng.index(10);
            cfg.n_outcomes = 1 + rng.index(4);
            cfg.regime.kind = RegimeKind::Projective;
            const auto draw = random_family(cfg, rng);
            const auto pf = ProjectiveFamily::make(draw.family);
            const auto rho = random_density(cfg.dim, rng);
            CHECK(operator_norm(lueders_unsharp(draw.family, rho).op() - lueders_sharp(pf, rho).op()) <= 1e-10);
        }
    }

    TEST_CASE("selective_outcome examples") {
        const auto rho = DensityOperator::make(kPlus);
        const auto one = selective_outcome(make_family({Operator::identity(2)}), 0, rho);
        CHECK(one.probability == doctest::Approx(1.0).epsilon(1e-15));
        REQUIRE(one.post_state.has_value());
        CHECK(oracle::max_entry_diff(one.post_state->op(), kPlus) <= 1e-15);

        const auto zero = selective_outcome(z_basis(), 1, DensityOperator::make(Operator::diagonal({1.0, 0.0})));
        CHECK(zero.probability == 0.0);
        CHECK_FALSE(zero.post_state.has_value());

        const auto half = selective_outcome(unsharp_z(0.6), 0, DensityOperator::make(0.5 * Operator::identity(2)));
        CHECK(half.probability == doctest::Approx(0.5).epsilon(1e-15));
        REQUIRE(half.post_state.has_value());
        CHECK(oracle::max_entry_diff(half.post_state->op(), Operator::diagonal({0.8, 0.2})) <= 1e-15);

        try {
            (void)selective_outcome(z_basis(), 2, rho);
            FAIL("expected IndexOutOfRange");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::IndexOutOfRange);
        }
    }

    TEST_CASE("selective outcomes recombine into the nonselective channel") {
        for (std::uint64_t t = 0; t < 40; ++t) {
            const auto tr = random_triple(t, 8, 5);
            const auto& f = tr.draw.family;
            Operator sum(f.dim());
            for (std::size_t i = 0; i < f.size(); ++i) {
                const auto out = selective_outcome(f, i, tr.rho);
                if (out.post_state) {
                    sum.add_scaled(out.probability, out.post_state->op());
                }
            }
            CHECK(operator_norm(sum - lueders_unsharp(f, tr.rho).op()) <= 1e-9);
        }
    }

    TEST_CASE("heisenberg_dual examples") {
        const auto f = unsharp_z(0.6);
        CHECK(oracle::max_entry_diff(heisenberg_dual(f, Operator::identity(2)), Operator::identity(2)) <= 1e-15);
        CHECK(heisenberg_dual(z_basis(), pauli::x()).max_abs() <= 1e-15);
        for (double lambda : {0.0, 0.3, 0.6, 0.9, 1.0}) {
            const Operator expected = std::sqrt(1.0 - lambda * lambda) * pauli::x();
            CHECK(oracle::max_entry_diff(heisenberg_dual(unsharp_z(lambda), pauli::x()), expected) <= 1e-15);
        }
        CHECK_THROWS_AS(heisenberg_dual(f, Operator{{0.0, 1.0}, {0.0, 0.0}}), Error);
        CHECK_THROWS_AS(heisenberg_dual(f, Operator::identity(3)), Error);
    }

    TEST_CASE("heisenberg_dual is unital and maps effects to effects") {
        for (std::uint64_t t = 0; t < 40; ++t) {
            const auto tr = random_triple(t);
            const auto& f = tr.draw.family;
            const std::size_t d = f.dim();
            CHECK(operator_norm(heisenberg_dual(f, Operator::identity(d)) - Operator::identity(d)) <= 1e-10);
            Rng rng(3, t);
            Operator p = ginibre(d, rng);
            p = mul_adjoint(p, p);
            p *= 1.0 / operator_norm(p);
            const auto vals = eigvalsh(heisenberg_dual(f, hermitian_part(p)));
            CHECK(vals.front() >= -1e-10);
            CHECK(vals.back() <= 1.0 + 1e-10);
        }
    }

    TEST_CASE("deviation examples") {
        const auto commuting = make_family({Operator::diagonal({0.3, 0.5, 1.0}), Operator::diagonal({0.7, 0.5, 0.0})});
        const auto r0 = deviation(commuting, Operator::diagonal({2.0, -1.0, 0.5}));
        CHECK(r0.deviation_norm <= 1e-10);
        CHECK(r0.preserved);

        const auto r1 = deviation(z_basis(), pauli::x());
        CHECK(r1.deviation_norm == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(oracle::max_entry_diff(r1.deviation_op, pauli::x()) <= 1e-15);
        CHECK_FALSE(r1.preserved);
        CHECK(r1.max_commutator_norm == doctest::Approx(1.0).epsilon(1e-15));

        const auto r2 = deviation(unsharp_z(0.6), pauli::x());
        CHECK(std::abs(r2.deviation_norm - 0.2) <= 1e-15);
        CHECK(oracle::max_entry_diff(r2.deviation_op, 0.2 * pauli::x()) <= 1e-15);
        CHECK(r2.dim == 2);
        CHECK(r2.n_outcomes == 2);
    }

    TEST_CASE("random triples: trace, positivity and duality") {
        const Tolerances tol;
        for (std::uint64_t t = 0; t < 120; ++t) {
            const auto tr = random_triple(t);
            const auto& f = tr.draw.family;
            CAPTURE(t);
            const auto out = lueders_unsharp(f, tr.rho);
            CHECK(std::abs(out.op().trace().real() - 1.0) <= tol.zero_tol);
            CHECK(eigvalsh(out.op()).front() >= -tol.psd_tol);

            // the channel agrees with a plain-loop Kraus sum
            const auto ref = kraus_sum(f, oracle::from(tr.rho.op()));
            CHECK(oracle::max_entry_diff(out.op(), oracle::to_op(ref)) <= 1e-12);

            const double lhs = expectation(out, tr.b);
            const double rhs = expectation(tr.rho, heisenberg_dual(f, tr.b));
            CHECK(std::abs(lhs - rhs) <= 1e-10);

            // tr[I(rho) B] - tr[rho B] = -tr[rho D]
            const auto dev = deviation(f, tr.b);
            CHECK(std::abs((lhs - expectation(tr.rho, tr.b)) + expectation(tr.rho, dev.deviation_op)) <= 1e-10);
            CHECK(hermitian_residual(dev.deviation_op) <= tol.hermitian_tol);
            CHECK(dev.preserved == (dev.deviation_norm <= tol.zero_tol));
        }
    }

    TEST_CASE("sharp channel is idempotent") {
        const Tolerances tol;
        for (std::uint64_t t = 0; t < 40; ++t) {
            Rng rng(41, t);
            EnsembleConfig cfg;
            cfg.dim = 2 + rng.index(12);
            cfg.n_outcomes = 1 + rng.index(6);
            cfg.regime.kind = RegimeKind::Projective;
            const auto pf = ProjectiveFamily::make(random_family(cfg, rng).family);
            const auto once = lueders_sharp(pf, random_density(cfg.dim, rng));
            CHECK(operator_norm(lueders_sharp(pf, once).op() - once.op()) <= tol.zero_tol);
        }
    }

    TEST_CASE("families built to commute with B preserve its statistics") {
        for (std::uint64_t t = 0; t < 60; ++t) {
            Rng rng(8, t);
            EnsembleConfig cfg;
            cfg.dim = 2 + rng.index(7);
            cfg.n_outcomes = 2 + rng.index(3);
            cfg.regime.kind = RegimeKind::Commuting;
            const auto draw = random_family(cfg, rng);
            const Effect b = companion_effect(cfg, draw, rng);
            CHECK(deviation(draw.family, b.op()).deviation_norm <= 1e-10);
        }
    }

    TEST_CASE("deviation is attained and never exceeded") {
        for (std::uint64_t t = 0; t < 10; ++t) {
            const auto tr = random_triple(t, 6, 4);
            const auto dev = deviation(tr.draw.family, tr.b);
            const auto es = eigh(dev.deviation_op);
            const std::size_t top = std::abs(es.values.front()) > std::abs(es.values.back()) ? 0 : es.values.size() - 1;
            const auto v = es.vector(top);
            CHECK(std::abs(std::abs(trace_product_real(Operator::outer(v), dev.deviation_op)) - dev.deviation_norm) <=
                  1e-10);
            Rng rng(13, t);
            for (int k = 0; k < 1000; ++k) {
                const auto rho = random_density(tr.rho.dim(), rng);
                CHECK(std::abs(trace_product_real(rho.op(), dev.deviation_op)) <= dev.deviation_norm + 1e-10);
            }
        }
    }

    TEST_CASE("channel output is identical across kernel backends") {
        namespace k = lueders::kernels;
        const k::Backend original = k::active().backend;
        const auto tr = random_triple(5, 12, 4);
        k::select(k::Backend::Scalar);
        const Operator ref = lueders_unsharp(tr.draw.family, tr.rho).op();
        const double ref_dev = deviation(tr.draw.family, tr.b).deviation_norm;
        for (k::Backend b : k::available_backends()) {
            k::select(b);
            CAPTURE(k::backend_name(b));
            CHECK(operator_norm(lueders_unsharp(tr.draw.family, tr.rho).op() - ref) <= 1e-13);
            CHECK(std::abs(deviation(tr.draw.family, tr.b).deviation_norm - ref_dev) <= 1e-12);
        }
        k::select(original);
    }
}
