#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpsrg/decomp.hpp"
#include "mpsrg/mps.hpp"
#include "mpsrg/rg.hpp"

namespace mpsrg {

/// Fixed-point taxonomy for the coarse-graining flow. The full set applies
/// at bond dimension 2; for larger bonds only Product, GenericDimer and
/// PeriodicOrUnknown are ever assigned.
enum class FixedPointClass {
    Product,
    GenericDimer,
    GHZ,
    WFamily,
    DomainWallFamily,
    PeriodicOrUnknown,
};

std::string to_string(FixedPointClass label);

/// Multiplicities of the leading transfer eigenvalue.
struct JordanInfo {
    int algebraic = 1;
    int geometric = 1;
};

struct FixedPointReport {
    FixedPointClass label = FixedPointClass::PeriodicOrUnknown;

    /// lambda_i of Phi_L = sum lambda_i |ii> in the canonical gauge,
    /// descending, sum 1 (GenericDimer only).
    std::vector<double> schmidt_weights;
    /// Schmidt coefficients sqrt(lambda_i) of the dimer bond state and its
    /// entanglement entropy (GenericDimer only).
    std::optional<SchmidtData> schmidt;

    std::optional<double> theta; // WFamily (mod 2pi) / DomainWallFamily (mod pi)
    std::optional<double> alpha; // DomainWallFamily
    std::optional<double> beta;  // DomainWallFamily

    std::size_t e_infinity_rank = 0; // 0 when the power limit diverges
    JordanInfo jordan;
    bool defective = false;        // some unit-magnitude eigenvalue is defective
    std::size_t unit_degeneracy = 0;
    double fit_residual = 0.0;     // evidence from the pattern-matching branch
    std::string advisory;          // thermodynamic-limit identification note
};

/// Right/left dominant eigenvector data. In the nondegenerate full-rank case
/// the pair is gauge-fixed to Phi_R = sum |ii>, Phi_L = sum lambda_i |ii>
/// with lambda descending and sum 1 (canonical flag set).
struct DominantPair {
    ComplexMatrix phi_right; // D x D matrix form
    ComplexMatrix phi_left;
    std::size_t schmidt_rank_right = 0;
    std::size_t schmidt_rank_left = 0;
    std::size_t degeneracy = 0; // count of unit-magnitude eigenvalues
    bool defective = false;
    bool canonical = false;
    std::vector<double> lambda;
    ComplexMatrix right_basis; // D^2 x degeneracy raw eigenvectors
    ComplexMatrix left_basis;
};

/// Eigenvectors for all eigenvalues within tol of the unit circle, with the
/// canonical gauge applied when the dominant eigenvalue is simple and both
/// eigenvectors have full Schmidt rank. Defective spectra are flagged, not
/// errors.
DominantPair dominant_eigenvectors(const TransferMatrix& e, double tol = 1e-8);

/// Assign the transfer matrix (normalized, at or near a fixed point) to the
/// taxonomy. Unit-circle grouping for defectiveness detection is widened to
/// at least 1e-6: Jordan structure splits eigenvalues by the square root of
/// the backward error, which a 1e-8 grouping would miss.
FixedPointReport classify(const TransferMatrix& e, double tol = 1e-8);

/// Canonical fixed-point state A^{(pq)} = sqrt(lambda_q) |p><q| from a
/// canonical dominant pair. Throws InvalidInput for degenerate, defective or
/// rank-deficient pairs.
MatrixProductState fixed_point_mps(const DominantPair& pair);

/// (algebraic, geometric) multiplicities of one eigenvalue: algebraic from
/// the grouped spectrum at tol, geometric from dim - rank(E - eigenvalue I).
JordanInfo detect_jordan(const TransferMatrix& e, Complex eigenvalue, double tol = 1e-8);

/// Canonical 4x4 transfer representative of the W family at angle theta
/// (nilpotent coupling normalized to one).
ComplexMatrix w_family_representative(double theta);

} // namespace mpsrg
