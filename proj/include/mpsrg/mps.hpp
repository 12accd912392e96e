#pragma once

#include <cstddef>
#include <vector>

#include "mpsrg/matrix.hpp"

namespace mpsrg {

/// Translationally invariant matrix product state: phys_dim site tensors of
/// size bond_dim x bond_dim, plus a boundary operator B entering amplitudes
/// as Tr(B * A[p1] * ... * A[pm]). The boundary defaults to the identity; a
/// non-trivial boundary is needed to realize some states (e.g. the W state)
/// exactly at finite chain length.
struct MatrixProductState {
    std::size_t phys_dim = 0;
    std::size_t bond_dim = 0;
    std::vector<ComplexMatrix> tensors;
    ComplexMatrix boundary;

    explicit MatrixProductState(std::vector<ComplexMatrix> site_tensors);
    MatrixProductState(std::vector<ComplexMatrix> site_tensors, ComplexMatrix boundary_op);

    MatrixProductState with_boundary(ComplexMatrix boundary_op) const;

    /// All tensors multiplied by a real factor (boundary untouched).
    MatrixProductState scaled(double factor) const;
};

/// Explicit normalized state on `sites` sites. Amplitudes are indexed base
/// local_dim with site 0 as the most significant digit.
struct PureStateVector {
    std::size_t sites = 0;
    std::size_t local_dim = 0;
    std::vector<Complex> amplitudes;
    bool normalized = false;
};

/// Schmidt coefficients across one bipartition, descending, with squares
/// summing to one; entropy_bits is the base-2 entanglement entropy.
struct SchmidtData {
    std::vector<double> coefficients;
    double entropy_bits = 0.0;
};

/// Realization cap: local_dim^sites may not exceed this.
inline constexpr std::size_t kStateSizeCap = std::size_t{1} << 22;

/// Contract the MPS on `sites` sites (amplitude = Tr(B A^{p1} ... A^{pm}))
/// and normalize. Throws InvalidInput past the size cap and NumericalError
/// for an identically zero state.
PureStateVector state_vector(const MatrixProductState& mps, std::size_t sites);

/// <psi| O_site |psi> for a local_dim x local_dim operator.
Complex expectation_local(const PureStateVector& state, const ComplexMatrix& op,
                          std::size_t site);

/// <O_i O_j> - <O_i><O_j> for two single-site operators at distinct sites.
Complex connected_correlator(const PureStateVector& state, const ComplexMatrix& op_a,
                             std::size_t site_i, const ComplexMatrix& op_b, std::size_t site_j);

/// Base-2 von Neumann entropy of the contiguous block [0, block_len).
double block_entropy(const PureStateVector& state, std::size_t block_len);

/// Schmidt decomposition across the cut between sites cut-1 and cut.
SchmidtData schmidt_decompose(const PureStateVector& state, std::size_t cut);

} // namespace mpsrg
