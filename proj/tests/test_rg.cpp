#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mpsrg/errors.hpp"
#include "mpsrg/models.hpp"
#include "mpsrg/rg.hpp"
#include "oracles.hpp"
#include "state_helpers.hpp"

using namespace mpsrg;

namespace {

ComplexMatrix cluster_transfer_expected() {
    // (1/2) [[1,1,1,1],[0,0,0,0],[0,0,0,0],[1,-1,-1,1]]
    return ComplexMatrix::from_rows({{0.5, 0.5, 0.5, 0.5},
                                     {0, 0, 0, 0},
                                     {0, 0, 0, 0},
                                     {0.5, -0.5, -0.5, 0.5}});
}

std::vector<Complex> squared_eigenvalues(const TransferMatrix& e) {
    std::vector<Complex> sq;
    for (const Complex& z : e.spectrum().eigenvalues) sq.push_back(z * z);
    return sq;
}

} // namespace

TEST_CASE("transfer_matrix of the canonical presets") {
    const TransferMatrix ghz = transfer_matrix(make_preset("ghz"));
    ComplexMatrix ghz_expected(4, 4);
    ghz_expected.at(0, 0) = 1.0;
    ghz_expected.at(3, 3) = 1.0;
    CHECK(distance(ghz.matrix(), ghz_expected) == 0.0);

    const TransferMatrix cl = transfer_matrix(make_preset("cluster"));
    CHECK(distance(cl.matrix(), cluster_transfer_expected()) < 1e-15);

    const TransferMatrix prod = transfer_matrix(make_preset("product"));
    REQUIRE(prod.dim() == 1);
    CHECK(std::abs(prod.matrix()(0, 0) - Complex{1.0, 0.0}) == 0.0);
}

TEST_CASE("transfer_matrix is invariant under physical-index mixing") {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t d = 2 + rep % 2;
        const std::size_t bond = 2 + rep % 2;
        const MatrixProductState mps = testutil::random_mps(rng, d, bond);
        const ComplexMatrix u = oracles::random_unitary(rng, d);
        std::vector<ComplexMatrix> mixed(d, ComplexMatrix(bond, bond));
        for (std::size_t qi = 0; qi < d; ++qi) {
            for (std::size_t p = 0; p < d; ++p) {
                mixed[qi] += u(qi, p) * mps.tensors[p];
            }
        }
        const TransferMatrix e0 = transfer_matrix(mps);
        const TransferMatrix e1 = transfer_matrix(MatrixProductState(mixed));
        CHECK(distance(e0.matrix(), e1.matrix()) <= 1e-12 * e0.matrix().frobenius_norm());
    }
}

TEST_CASE("coarse_grain_step on GHZ keeps the projector tensors") {
    const RgStepResult step = coarse_grain_step(make_preset("ghz"));
    REQUIRE(step.coarse_state.phys_dim == 2);
    CHECK(distance(step.coarse_state.tensors[0], ComplexMatrix::from_rows({{1, 0}, {0, 0}})) <
          1e-14);
    CHECK(distance(step.coarse_state.tensors[1], ComplexMatrix::from_rows({{0, 0}, {0, 1}})) <
          1e-14);
    CHECK(step.discarded_weight < 1e-14);
    const ComplexMatrix gram = step.isometry * step.isometry.adjoint();
    CHECK(distance(gram, ComplexMatrix::identity(2)) < 1e-12);
    CHECK(distance(transfer_matrix(step.coarse_state).matrix(),
                   transfer_matrix(make_preset("ghz")).matrix()) < 1e-14);
}

TEST_CASE("coarse_grain_step on the cluster state: four equal weights, rank-1 square") {
    const RgStepResult step = coarse_grain_step(make_preset("cluster"));
    REQUIRE(step.coarse_state.phys_dim == 4);
    REQUIRE(step.singular_values.size() == 4);
    for (double s : step.singular_values) {
        CHECK(s == doctest::Approx(step.singular_values[0]).epsilon(1e-12));
    }
    const TransferMatrix coarse_e = transfer_matrix(step.coarse_state);
    CHECK(numeric_rank(coarse_e.matrix(), 1e-8) == 1);
}

TEST_CASE("coarse_grain_step on a product state is trivial") {
    const RgStepResult step = coarse_grain_step(make_preset("product"));
    CHECK(step.coarse_state.phys_dim == 1);
    REQUIRE(step.singular_values.size() == 1);
    CHECK(step.singular_values[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum squaring: coarse transfer spectrum is the squared spectrum") {
    std::mt19937_64 rng(113);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t d = 2 + rep % 2;
        const std::size_t bond = 2 + (rep / 2) % 2;
        const MatrixProductState mps = testutil::random_mps(rng, d, bond);
        const TransferMatrix e = transfer_matrix(mps);
        const RgStepResult step = coarse_grain_step(mps);
        CHECK(step.coarse_state.phys_dim <= bond * bond);
        const TransferMatrix coarse_e = transfer_matrix(step.coarse_state);
        const double mismatch = oracles::match_multisets(coarse_e.spectrum().eigenvalues,
                                                         squared_eigenvalues(e));
        CHECK(mismatch <= 1e-8 * std::max(1.0, e.matrix().frobenius_norm()));
    }
}

TEST_CASE("normalize_leading scales AKLT by 1/sqrt(3)") {
    const MatrixProductState aklt = normalize_leading(make_preset("aklt"));
    const double expected = 1.0 / std::sqrt(3.0);
    CHECK(std::abs(aklt.tensors[0](0, 1) - Complex{expected, 0.0}) < 1e-12);
    const TransferMatrix e = transfer_matrix(aklt);
    const Spectrum& spec = e.spectrum();
    CHECK(std::abs(spec.eigenvalues[0] - Complex{1.0, 0.0}) < 1e-12);
    for (int i = 1; i < 4; ++i) {
        CHECK(std::abs(spec.eigenvalues[i] - Complex{-1.0 / 3.0, 0.0}) < 1e-12);
    }

    const MatrixProductState ghz = normalize_leading(make_preset("ghz"));
    CHECK(distance(ghz.tensors[0], make_preset("ghz").tensors[0]) == 0.0);
}

TEST_CASE("normalize_leading rejects a nilpotent transfer matrix") {
    const MatrixProductState nil({ComplexMatrix::from_rows({{0, 1}, {0, 0}})});
    CHECK_THROWS_AS(normalize_leading(nil), NumericalError);
}

TEST_CASE("flow on AKLT converges to the dimer spectrum") {
    const FlowTrace trace = flow(make_preset("aklt"), 8, 1e-10);
    CHECK(trace.converged);
    REQUIRE(!trace.records.empty());
    const FlowRecord& last = trace.records.back();
    CHECK(last.d_eff == 4);
    CHECK(std::abs(last.top_eigenvalues[0]) == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = 1; i < 4; ++i) CHECK(std::abs(last.top_eigenvalues[i]) < 1e-6);
    for (const FlowRecord& rec : trace.records) {
        CHECK(rec.d_eff <= 4);
        for (const Complex& ev : rec.top_eigenvalues) CHECK(std::abs(ev) <= 1.0 + 1e-10);
    }
    // subleading magnitude squares at each step while above the noise floor
    for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
        const double l2 = std::abs(trace.records[i].top_eigenvalues[1]);
        const double l2_next = std::abs(trace.records[i + 1].top_eigenvalues[1]);
        if (l2 > 1e-7) CHECK(l2_next == doctest::Approx(l2 * l2).epsilon(1e-6));
    }
}

TEST_CASE("flow residual is non-increasing once below 0.1 in the convergent branch") {
    for (const char* name : {"aklt", "cluster"}) {
        const FlowTrace trace = flow(make_preset(name), 10, 1e-12);
        CHECK(trace.converged);
        double prev = -1.0;
        for (const FlowRecord& rec : trace.records) {
            if (prev >= 0.0 && prev < 0.1) CHECK(rec.residual <= prev);
            prev = rec.residual;
        }
    }
}

TEST_CASE("flow on GHZ is stationary from the first step") {
    const FlowTrace trace = flow(make_preset("ghz"), 6, 1e-10);
    CHECK(trace.converged);
    CHECK(trace.records.size() == 1);
    CHECK(trace.records.front().residual < 1e-14);
    CHECK(trace.records.front().entropy_bits == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("flow flags an irrational unimodular phase as periodic") {
    const Complex ph = std::polar(1.0, std::numbers::pi * std::sqrt(2.0));
    const MatrixProductState toy({ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, ph}})});
    const FlowTrace trace = flow(toy, 16, 1e-10);
    CHECK(!trace.converged);
    CHECK(trace.periodic);
    CHECK(trace.records.size() < 16); // stall detector fires early
}

TEST_CASE("fixed_point_operator limits") {
    const TransferMatrix aklt = transfer_matrix(normalize_leading(make_preset("aklt")));
    const FixedPointLimit lim = fixed_point_operator(aklt);
    CHECK(lim.period == 1);
    // |I><I| / 2 with |I> = |00> + |11>
    ComplexMatrix expected(4, 4);
    for (std::size_t i : {0ul, 3ul})
        for (std::size_t j : {0ul, 3ul}) expected.at(i, j) = 0.5;
    CHECK(distance(lim.e_infinity, expected) < 1e-9);

    const FixedPointLimit ghz = fixed_point_operator(transfer_matrix(make_preset("ghz")));
    CHECK(ghz.period == 1);
    CHECK(distance(ghz.e_infinity, transfer_matrix(make_preset("ghz")).matrix()) < 1e-12);

    // antiferromagnetic GHZ: eigenvalue -1, period-2 limit pair
    const MatrixProductState anti({ComplexMatrix::from_rows({{0, 1}, {0, 0}}),
                                   ComplexMatrix::from_rows({{0, 0}, {1, 0}})});
    const FixedPointLimit alt = fixed_point_operator(transfer_matrix(anti));
    CHECK(alt.period == 2);
    REQUIRE(alt.alternate.has_value());
    CHECK(distance(*alt.alternate, alt.e_infinity) > 1e-6);
    // odd-limit squared returns to the even limit
    CHECK(distance(*alt.alternate * *alt.alternate, alt.e_infinity) < 1e-10);
}

TEST_CASE("fixed_point_operator rejects irrational phases") {
    const Complex ph = std::polar(1.0, std::numbers::pi * std::sqrt(2.0));
    ComplexMatrix toy(4, 4);
    toy.at(0, 0) = 1.0;
    toy.at(1, 1) = ph;
    toy.at(2, 2) = std::conj(ph);
    CHECK_THROWS_AS(fixed_point_operator(TransferMatrix::from_matrix(toy), 48, 1e-10),
                    NonConvergentError);
}

TEST_CASE("renormalize_observable on identity and GHZ") {
    const RgStepResult ghz_step = coarse_grain_step(make_preset("ghz"));
    const ComplexMatrix id2 = ComplexMatrix::identity(2);
    CHECK(distance(renormalize_observable(id2, ghz_step), ComplexMatrix::identity(2)) < 1e-12);

    const ComplexMatrix sz = ComplexMatrix::from_rows({{1, 0}, {0, -1}});
    const ComplexMatrix coarse_sz = renormalize_observable(sz, ghz_step);
    CHECK(distance(coarse_sz, sz) < 1e-12); // diag(1,-1) in the (00,11) coarse basis
    CHECK_THROWS_AS(renormalize_observable(ComplexMatrix::identity(3), ghz_step), InvalidInput);
}

TEST_CASE("expectation values are preserved by observable renormalization") {
    std::mt19937_64 rng(131);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t d = 2 + rep % 2;
        const MatrixProductState mps = testutil::random_mps(rng, d, 2);
        const ComplexMatrix op = oracles::random_hermitian(rng, d);
        const PureStateVector fine = state_vector(mps, 8);
        const Complex before = expectation_local(fine, op, 2);

        const RgStepResult step = coarse_grain_step(mps);
        const PureStateVector coarse = state_vector(step.coarse_state, 4);
        const Complex after = expectation_local(coarse, renormalize_observable(op, step), 1);
        CHECK(std::abs(before - after) < 1e-10);
    }
}

TEST_CASE("mid-block observables contract toward a multiple of the identity") {
    MatrixProductState state = normalize_leading(make_preset("aklt"));
    ComplexMatrix op = ComplexMatrix::from_rows({{1, 0, 0}, {0, 0, 0}, {0, 0, -1}});
    double prev_dev = -1.0;
    for (int step = 0; step < 4; ++step) {
        const RgStepResult rg = coarse_grain_step(state);
        op = renormalize_observable(op, rg);
        state = normalize_leading(rg.coarse_state);
        const std::size_t dd = op.rows();
        const Complex mean = op.trace() / static_cast<double>(dd);
        ComplexMatrix dev = op;
        for (std::size_t i = 0; i < dd; ++i) dev.at(i, i) -= mean;
        const double dev_norm = dev.frobenius_norm();
        if (prev_dev >= 0.0) CHECK(dev_norm < prev_dev);
        prev_dev = dev_norm;
    }
}

TEST_CASE("block entropy grows under coarse-graining") {
    std::mt19937_64 rng(139);
    for (int rep = 0; rep < 6; ++rep) {
        const std::size_t d = 2 + rep % 2;
        const MatrixProductState mps = testutil::random_mps(rng, d, 2);
        const PureStateVector fine = state_vector(mps, 8);
        const PureStateVector coarse = state_vector(coarse_grain_step(mps).coarse_state, 4);
        for (std::size_t k = 1; k <= 2; ++k) { // k <= m/3 keeps clear of ring wrap-around
            CHECK(block_entropy(coarse, k) >= block_entropy(fine, k) - 1e-10);
        }
    }
    // longer chains, d = 2
    for (int rep = 0; rep < 3; ++rep) {
        const MatrixProductState mps = testutil::random_mps(rng, 2, 2);
        const PureStateVector fine = state_vector(mps, 12);
        const PureStateVector coarse = state_vector(coarse_grain_step(mps).coarse_state, 6);
        for (std::size_t k = 1; k <= 4; ++k) {
            CHECK(block_entropy(coarse, k) >= block_entropy(fine, k) - 1e-10);
        }
    }
}
