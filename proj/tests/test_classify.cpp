#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mpsrg/classify.hpp"
#include "mpsrg/errors.hpp"
#include "mpsrg/models.hpp"
#include "mpsrg/rg.hpp"
#include "oracles.hpp"
#include "state_helpers.hpp"

using namespace mpsrg;

namespace {

TransferMatrix ghz_transfer() { return transfer_matrix(make_preset("ghz")); }

MatrixProductState gauge_conjugate(const MatrixProductState& mps, const ComplexMatrix& s,
                                   const ComplexMatrix& s_inv, const ComplexMatrix& mix) {
    const std::size_t d = mps.phys_dim;
    std::vector<ComplexMatrix> out(d, ComplexMatrix(mps.bond_dim, mps.bond_dim));
    for (std::size_t q = 0; q < d; ++q) {
        for (std::size_t p = 0; p < d; ++p) out[q] += mix(q, p) * (s * mps.tensors[p] * s_inv);
    }
    return MatrixProductState(std::move(out));
}

ComplexMatrix invert_2x2(const ComplexMatrix& m) {
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return ComplexMatrix::from_rows(
        {{m(1, 1) / det, -m(0, 1) / det}, {-m(1, 0) / det, m(0, 0) / det}});
}

} // namespace

TEST_CASE("dominant_eigenvectors: AKLT canonical gauge") {
    const TransferMatrix e = transfer_matrix(normalize_leading(make_preset("aklt")));
    const DominantPair pair = dominant_eigenvectors(e);
    CHECK(pair.degeneracy == 1);
    CHECK(!pair.defective);
    CHECK(pair.canonical);
    CHECK(pair.schmidt_rank_right == 2);
    CHECK(pair.schmidt_rank_left == 2);
    REQUIRE(pair.lambda.size() == 2);
    CHECK(pair.lambda[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(pair.lambda[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(distance(pair.phi_right, ComplexMatrix::identity(2)) < 1e-10);
}

TEST_CASE("dominant_eigenvectors: GHZ degeneracy with product eigenbasis") {
    const DominantPair pair = dominant_eigenvectors(ghz_transfer());
    CHECK(pair.degeneracy == 2);
    CHECK(!pair.defective);
    CHECK(!pair.canonical);
    for (std::size_t k = 0; k < 2; ++k) {
        ComplexMatrix x(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) x.at(i, j) = pair.right_basis(i * 2 + j, k);
        CHECK(numeric_rank(x, 1e-8) == 1); // product vectors |00>, |11>
    }
}

TEST_CASE("dominant_eigenvectors flags the defective W spectrum") {
    const DominantPair pair = dominant_eigenvectors(transfer_matrix(make_preset("w", {0.0})));
    CHECK(pair.defective);
    CHECK(!pair.canonical);
}

TEST_CASE("classify: rank-2 limit is GHZ") {
    const FixedPointReport rep = classify(ghz_transfer());
    CHECK(rep.label == FixedPointClass::GHZ);
    CHECK(rep.e_infinity_rank == 2);
    CHECK(rep.unit_degeneracy == 2);
    CHECK(!rep.defective);
    CHECK(rep.jordan.algebraic == 2);
    CHECK(rep.jordan.geometric == 2);
}

TEST_CASE("classify: identity transfer matrix is a redundant-bond product") {
    const FixedPointReport rep = classify(TransferMatrix::from_matrix(ComplexMatrix::identity(4)));
    CHECK(rep.label == FixedPointClass::Product);
    CHECK(rep.e_infinity_rank == 4);
}

TEST_CASE("classify: AKLT is a generic dimer with uniform weights") {
    const FixedPointReport rep = classify(transfer_matrix(normalize_leading(make_preset("aklt"))));
    CHECK(rep.label == FixedPointClass::GenericDimer);
    CHECK(rep.e_infinity_rank == 1);
    REQUIRE(rep.schmidt_weights.size() == 2);
    CHECK(rep.schmidt_weights[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(rep.schmidt_weights[1] == doctest::Approx(0.5).epsilon(1e-8));
    REQUIRE(rep.schmidt.has_value());
    CHECK(rep.schmidt->entropy_bits == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("classify: cluster state is a generic dimer already") {
    const FixedPointReport rep = classify(transfer_matrix(make_preset("cluster")));
    CHECK(rep.label == FixedPointClass::GenericDimer);
    CHECK(rep.schmidt_weights[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("classify: product preset at bond dimension one") {
    const FixedPointReport rep = classify(transfer_matrix(make_preset("product")));
    CHECK(rep.label == FixedPointClass::Product);
    CHECK(rep.e_infinity_rank == 1);
}

TEST_CASE("classify: W family with theta recovery") {
    for (double theta : {0.0, 0.8, -1.2, 2.5}) {
        const FixedPointReport rep = classify(transfer_matrix(make_preset("w", {theta})));
        CHECK(rep.label == FixedPointClass::WFamily);
        CHECK(rep.defective);
        CHECK(rep.e_infinity_rank == 0);
        REQUIRE(rep.theta.has_value());
        CHECK(distance(w_family_representative(*rep.theta), w_family_representative(theta)) <
              1e-8);
        CHECK(rep.fit_residual < 1e-6);
    }
}

TEST_CASE("classify: coarse-graining doubles the W angle") {
    for (double theta : {0.0, 0.35, 1.9}) {
        const RgStepResult step = coarse_grain_step(make_preset("w", {theta}));
        const FixedPointReport rep =
            classify(transfer_matrix(normalize_leading(step.coarse_state)));
        CHECK(rep.label == FixedPointClass::WFamily);
        REQUIRE(rep.theta.has_value());
        CHECK(distance(w_family_representative(*rep.theta),
                       w_family_representative(2.0 * theta)) < 1e-8);
    }
}

TEST_CASE("classify: domain-wall family with parameter recovery") {
    const double a = 0.6, b = 0.7, th = 0.4;
    const FixedPointReport rep =
        classify(transfer_matrix(make_preset("domain_wall", {a, b, th})));
    CHECK(rep.label == FixedPointClass::DomainWallFamily);
    CHECK(rep.defective);
    REQUIRE(rep.alpha.has_value());
    REQUIRE(rep.beta.has_value());
    REQUIRE(rep.theta.has_value());
    CHECK(*rep.alpha == doctest::Approx(a).epsilon(1e-6));
    CHECK(*rep.beta == doctest::Approx(b).epsilon(1e-6));
    CHECK(*rep.theta == doctest::Approx(th).epsilon(1e-6));
}

TEST_CASE("classify: support-2 domain wall (cos alpha = 1)") {
    const FixedPointReport rep =
        classify(transfer_matrix(make_preset("domain_wall", {0.0, 0.9, 0.3})));
    CHECK(rep.label == FixedPointClass::DomainWallFamily);
    REQUIRE(rep.alpha.has_value());
    CHECK(std::abs(*rep.alpha) < 1e-6);
    CHECK(*rep.beta == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("classify: period-2 spectrum falls outside the taxonomy") {
    const MatrixProductState anti({ComplexMatrix::from_rows({{0, 1}, {0, 0}}),
                                   ComplexMatrix::from_rows({{0, 0}, {1, 0}})});
    const FixedPointReport rep = classify(transfer_matrix(anti));
    CHECK(rep.label == FixedPointClass::PeriodicOrUnknown);
    CHECK(!rep.defective);
}

TEST_CASE("classify is gauge invariant") {
    std::mt19937_64 rng(151);
    const ComplexMatrix mix2 = oracles::random_unitary(rng, 2);
    ComplexMatrix s = ComplexMatrix::identity(2);
    const ComplexMatrix noise = oracles::random_matrix(rng, 2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) s.at(i, j) += 0.3 * noise(i, j);
    const ComplexMatrix s_inv = invert_2x2(s);

    // dimer class: label and Schmidt weights survive the gauge
    const MatrixProductState aklt = normalize_leading(make_preset("aklt"));
    const ComplexMatrix mix3 = oracles::random_unitary(rng, 3);
    const FixedPointReport base = classify(transfer_matrix(aklt));
    const FixedPointReport gauged =
        classify(transfer_matrix(gauge_conjugate(aklt, s, s_inv, mix3)));
    CHECK(gauged.label == base.label);
    REQUIRE(gauged.schmidt_weights.size() == base.schmidt_weights.size());
    for (std::size_t i = 0; i < base.schmidt_weights.size(); ++i) {
        CHECK(std::abs(gauged.schmidt_weights[i] - base.schmidt_weights[i]) < 1e-6);
    }

    // W family: label and theta survive the gauge
    const MatrixProductState w = make_preset("w", {0.9});
    const FixedPointReport wg = classify(transfer_matrix(gauge_conjugate(w, s, s_inv, mix2)));
    CHECK(wg.label == FixedPointClass::WFamily);
    REQUIRE(wg.theta.has_value());
    CHECK(distance(w_family_representative(*wg.theta), w_family_representative(0.9)) < 1e-6);

    // domain wall: the label survives (the parameters are frame dependent)
    const MatrixProductState dw = make_preset("domain_wall", {0.5, 1.1, -0.7});
    const ComplexMatrix mix3b = oracles::random_unitary(rng, 3);
    const FixedPointReport dwg = classify(transfer_matrix(gauge_conjugate(dw, s, s_inv, mix3b)));
    CHECK(dwg.label == FixedPointClass::DomainWallFamily);
}

TEST_CASE("fixed_point_mps reconstructs a true fixed point") {
    DominantPair pair;
    pair.degeneracy = 1;
    pair.canonical = true;
    pair.lambda = {0.9, 0.1};
    const MatrixProductState mps = fixed_point_mps(pair);
    REQUIRE(mps.phys_dim == 4);

    const TransferMatrix e = transfer_matrix(mps);
    const ComplexMatrix e1 = e.matrix();
    const ComplexMatrix e2 = e1 * e1;
    ComplexMatrix lhs = e2;
    lhs *= Complex{1.0 / e2.frobenius_norm(), 0.0};
    ComplexMatrix rhs = e1;
    rhs *= Complex{1.0 / e1.frobenius_norm(), 0.0};
    CHECK(distance(lhs, rhs) < 1e-10); // idempotent up to normalization

    // one more flow step returns the same class and weights
    const RgStepResult step = coarse_grain_step(normalize_leading(mps));
    const FixedPointReport rep = classify(transfer_matrix(normalize_leading(step.coarse_state)));
    CHECK(rep.label == FixedPointClass::GenericDimer);
    REQUIRE(rep.schmidt_weights.size() == 2);
    CHECK(rep.schmidt_weights[0] == doctest::Approx(0.9).epsilon(1e-8));
    CHECK(rep.schmidt_weights[1] == doctest::Approx(0.1).epsilon(1e-8));

    DominantPair degenerate;
    degenerate.canonical = false;
    CHECK_THROWS_AS(fixed_point_mps(degenerate), InvalidInput);
}

TEST_CASE("fixed_point_mps at bond dimension one is a product state") {
    DominantPair pair;
    pair.degeneracy = 1;
    pair.canonical = true;
    pair.lambda = {1.0};
    const MatrixProductState mps = fixed_point_mps(pair);
    CHECK(mps.phys_dim == 1);
    CHECK(std::abs(mps.tensors[0](0, 0) - Complex{1.0, 0.0}) < 1e-15);
}

TEST_CASE("detect_jordan multiplicities") {
    const TransferMatrix jordan =
        TransferMatrix::from_matrix(ComplexMatrix::from_rows({{1, 1}, {0, 1}}));
    const JordanInfo j1 = detect_jordan(jordan, Complex{1.0, 0.0});
    CHECK(j1.algebraic == 2);
    CHECK(j1.geometric == 1);

    const TransferMatrix plain =
        TransferMatrix::from_matrix(ComplexMatrix::from_rows({{1, 0}, {0, 1}}));
    const JordanInfo j2 = detect_jordan(plain, Complex{1.0, 0.0});
    CHECK(j2.algebraic == 2);
    CHECK(j2.geometric == 2);

    const TransferMatrix cluster = transfer_matrix(make_preset("cluster"));
    const JordanInfo j0 = detect_jordan(cluster, Complex{0.0, 0.0});
    CHECK(j0.algebraic == 3);
    CHECK(j0.geometric == 2);
    CHECK(numeric_rank(cluster.matrix(), 1e-8) == 2);
    CHECK(numeric_rank(cluster.matrix() * cluster.matrix(), 1e-8) == 1);
}

TEST_CASE("domain-wall tensors satisfy the product relations") {
    std::mt19937_64 rng(157);
    std::uniform_real_distribution<double> angle(0.1, 1.4);
    for (int rep = 0; rep < 8; ++rep) {
        const double a = angle(rng), b = angle(rng), th = angle(rng) - 0.7;
        const MatrixProductState dw = make_preset("domain_wall", {a, b, th});
        const ComplexMatrix& a0 = dw.tensors[0];
        const ComplexMatrix& a1 = dw.tensors[1];
        const ComplexMatrix& a2 = dw.tensors[2];

        auto prop_resid = [](const ComplexMatrix& prod, const ComplexMatrix& dir) {
            Complex num = 0.0;
            double den = 0.0;
            for (std::size_t k = 0; k < prod.entries().size(); ++k) {
                num += std::conj(dir.entries()[k]) * prod.entries()[k];
                den += std::norm(dir.entries()[k]);
            }
            ComplexMatrix r = prod;
            r -= (num / den) * dir;
            return r.frobenius_norm();
        };
        CHECK(prop_resid(a0 * a1, a1) < 1e-12); // A0 A1 = e^{i theta} A1
        CHECK(prop_resid(a1 * a2, a1) < 1e-12); // A1 A2 = e^{-i theta} A1
        CHECK(prop_resid(a0 * a2, a1) < 1e-12); // A0 A2 is along A1
        CHECK((a1 * a0).frobenius_norm() < 1e-12);
        CHECK((a2 * a1).frobenius_norm() < 1e-12);
        CHECK((a2 * a0).frobenius_norm() < 1e-12);
    }
}

TEST_CASE("presets flow to their known fixed-point classes") {
    const std::pair<const char*, FixedPointClass> expected[] = {
        {"product", FixedPointClass::Product},
        {"ghz", FixedPointClass::GHZ},
        {"cluster", FixedPointClass::GenericDimer},
        {"aklt", FixedPointClass::GenericDimer},
        {"w", FixedPointClass::WFamily},
        {"domain_wall", FixedPointClass::DomainWallFamily},
    };
    for (const auto& [name, label] : expected) {
        std::vector<double> params;
        if (std::string(name) == "w") params = {0.0};
        if (std::string(name) == "domain_wall") params = {0.6, 0.7, 0.4};
        const FlowTrace trace = flow(make_preset(name, params), 16, 1e-10);
        REQUIRE(trace.final_state.has_value());
        const FixedPointReport rep = classify(transfer_matrix(*trace.final_state));
        CHECK(rep.label == label);
    }
    // GHZ in particular is stationary under the flow
    const FlowTrace ghz = flow(make_preset("ghz"), 6, 1e-10);
    CHECK(ghz.converged);
    CHECK(ghz.records.size() == 1);
}

TEST_CASE("classify requires a normalized genuine transfer matrix") {
    CHECK_THROWS_AS(classify(transfer_matrix(make_preset("aklt"))), InvalidInput); // |l1|=3
    CHECK_THROWS_AS(classify(TransferMatrix::from_matrix(ComplexMatrix::identity(3))),
                    InvalidInput); // not D^2
}
