#pragma once

#include <vector>

#include "mpsrg/matrix.hpp"

namespace mpsrg {

/// Thin singular value decomposition M = U * diag(S) * V^dagger with
/// k = min(rows, cols) columns in U and V (zero singular values included,
/// their singular-vector columns completed to an orthonormal set).
///
/// Phase convention: the first component of each right-singular vector with
/// magnitude above 1e-12 is made real positive; the matching left column
/// carries the compensating phase. Singular values are sorted descending.
struct SvdResult {
    ComplexMatrix left_vectors;          // rows x k, orthonormal columns
    std::vector<double> singular_values; // k, descending, >= 0
    ComplexMatrix right_vectors;         // cols x k, orthonormal columns

    /// U * diag(S) * V^dagger.
    ComplexMatrix reconstruct() const;
};

/// One-sided Jacobi SVD. Throws NumericalError if the sweep cap is exceeded,
/// InvalidInput for an empty matrix.
SvdResult svd(const ComplexMatrix& m);

/// One eigenvalue cluster after tolerance grouping.
struct EigenGroup {
    Complex value;  // cluster mean
    int algebraic;  // cluster size
    int geometric;  // dim - rank(M - value*I)
};

/// Full spectrum of a general complex square matrix. Eigenvalues are sorted
/// by descending magnitude (ties: descending real, then imaginary part);
/// right_vectors holds one unit right eigenvector per eigenvalue, column j
/// belonging to eigenvalues[j]. Defective clusters repeat (approximately)
/// the same eigenvector direction.
struct Spectrum {
    std::vector<Complex> eigenvalues;
    ComplexMatrix right_vectors;
    std::vector<EigenGroup> groups;

    /// Index of the group containing eigenvalues[0] (largest magnitude).
    const EigenGroup& leading_group() const { return groups.front(); }
};

/// Hessenberg reduction followed by shifted QR iteration; eigenvectors by
/// back substitution on the Schur factor. Multiplicities are grouped at the
/// absolute tolerance `tol`. Throws NumericalError when the iteration cap is
/// exceeded, InvalidInput for a non-square matrix.
Spectrum eig_general(const ComplexMatrix& m, double tol = 1e-8);

/// Number of singular values exceeding tol_rel * (largest singular value).
/// The zero matrix has rank 0.
std::size_t numeric_rank(const ComplexMatrix& m, double tol_rel = 1e-10);

/// Number of singular values exceeding the absolute threshold tol_abs.
std::size_t numeric_rank_abs(const ComplexMatrix& m, double tol_abs);

} // namespace mpsrg
