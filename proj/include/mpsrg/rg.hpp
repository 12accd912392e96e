#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "mpsrg/decomp.hpp"
#include "mpsrg/matrix.hpp"
#include "mpsrg/mps.hpp"

namespace mpsrg {

/// The D^2 x D^2 transfer operator E = sum_p A^p (x) conj(A^p) of a
/// translationally invariant MPS, with a lazily cached spectrum.
///
/// E is invariant under unitary mixing of the physical index, so it labels
/// the local-unitary equivalence class of the state; one coarse-graining
/// step acts as E -> E^2.
class TransferMatrix {
  public:
    static TransferMatrix from_mps(const MatrixProductState& mps);

    /// Wrap an explicit matrix (diagnostics and tests). bond_dim() is the
    /// square root of the dimension when that is a perfect square, else 0;
    /// classification requires a genuine D^2 x D^2 operator.
    static TransferMatrix from_matrix(ComplexMatrix e);

    const ComplexMatrix& matrix() const { return mat_; }
    std::size_t dim() const { return mat_.rows(); }
    std::size_t bond_dim() const { return bond_; }

    /// Spectrum at the given grouping tolerance. Cached per tolerance; the
    /// cache is not synchronized, so share one instance across threads only
    /// after the spectrum has been materialized. Deleted on temporaries: the
    /// returned reference lives inside this object.
    const Spectrum& spectrum(double tol = 1e-8) const&;
    const Spectrum& spectrum(double tol = 1e-8) const&& = delete;

    Complex leading_eigenvalue() const { return spectrum().eigenvalues.front(); }
    double leading_magnitude() const;

    TransferMatrix squared() const { return from_matrix(mat_ * mat_); }

  private:
    TransferMatrix(ComplexMatrix m, std::size_t bond);

    ComplexMatrix mat_;
    std::size_t bond_ = 0;
    mutable std::shared_ptr<const Spectrum> cache_;
    mutable double cache_tol_ = -1.0;
};

/// Convenience free function matching the operation name.
TransferMatrix transfer_matrix(const MatrixProductState& mps);

/// Result of one pairwise coarse-graining step.
struct RgStepResult {
    MatrixProductState coarse_state;     // phys_dim = retained rank
    ComplexMatrix isometry;              // d' x d^2, rows orthonormal
    std::vector<double> singular_values; // retained, descending
    double discarded_weight = 0.0;       // dropped squared weight / total
};

/// Merge site pairs (2j, 2j+1): build the d^2 x D^2 matrix of products
/// A^p A^q (row index p*d+q, column index alpha*D+gamma), take its SVD, keep
/// singular values above drop_tol_rel * max, and form coarse tensors
/// lambda_l * V^l. With drop_tol_rel at numerical zero the map is exact:
/// the coarse transfer matrix equals E^2.
RgStepResult coarse_grain_step(const MatrixProductState& mps, double drop_tol_rel = 1e-12);

/// Scale all tensors by 1/sqrt(|lambda_max(E)|) so the leading transfer
/// eigenvalue has magnitude one. Throws NumericalError when the leading
/// eigenvalue vanishes (nilpotent E).
MatrixProductState normalize_leading(const MatrixProductState& mps);

struct FlowOptions {
    double drop_tol_rel = 1e-12;
    double spectrum_tol = 1e-8;
    std::size_t entropy_sites = 6; // coarse chain length for the entropy column
    std::size_t stall_limit = 3;   // unimodular steps tolerated before flagging
};

struct FlowRecord {
    std::size_t step = 0;
    std::size_t d_eff = 0;
    std::array<Complex, 4> top_eigenvalues{}; // descending magnitude, zero padded
    double entropy_bits = 0.0;                // one coarse site; NaN if unrealizable
    std::size_t entropy_sites = 0;            // chain length actually used
    double residual = 0.0;                    // ||E_{n+1} - E_n||_F, phase aligned
    double correlation_length = 0.0;          // -1/ln|l2/l1|, inf when degenerate
};

struct FlowTrace {
    std::vector<FlowRecord> records;
    bool converged = false;
    bool periodic = false; // non-contracting unimodular spectrum, no stationary E
    std::optional<MatrixProductState> final_state;
};

/// Iterate normalize_leading followed by coarse_grain_step, recording
/// per-step diagnostics; stops early on ||E_{n+1} - E_n|| < conv_tol or when
/// a non-convergent unimodular spectrum persists (periodic flag).
FlowTrace flow(const MatrixProductState& mps, std::size_t max_steps, double conv_tol,
               const FlowOptions& opts = {});

/// Limit of repeated squaring of a normalized transfer matrix.
struct FixedPointLimit {
    ComplexMatrix e_infinity;              // limit of even powers
    int period = 1;                        // 1, or 2 when odd powers differ
    std::optional<ComplexMatrix> alternate; // odd-power limit when period == 2
};

/// Repeated squaring until ||E^{2n} - E^n|| < tol; detects period-2 limits
/// (eigenvalue -1). Throws NonConvergentError when no limit appears within
/// max_squarings, InvalidInput when E is not normalized.
FixedPointLimit fixed_point_operator(const TransferMatrix& e, std::size_t max_squarings = 64,
                                     double tol = 1e-10);

/// Coarse-grained observable O' = U (O (x) 1) U^dagger for the isometry U of
/// a coarse-graining step; O acts on the left member of each site pair.
ComplexMatrix renormalize_observable(const ComplexMatrix& op, const RgStepResult& step);

} // namespace mpsrg
