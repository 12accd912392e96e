#include "mpsrg/mps.hpp"

#include <cmath>
#include <utility>

#include "mpsrg/decomp.hpp"
#include "mpsrg/errors.hpp"

namespace mpsrg {

namespace {

void validate(const MatrixProductState& mps) {
    if (mps.tensors.empty()) throw InvalidInput("MatrixProductState: no site tensors");
    const std::size_t d = mps.tensors.size();
    const std::size_t bond = mps.tensors.front().rows();
    bool any_nonzero = false;
    for (const ComplexMatrix& a : mps.tensors) {
        if (a.rows() != bond || a.cols() != bond) {
            throw InvalidInput("MatrixProductState: tensors must share one square bond shape");
        }
        if (a.max_abs() > 0.0) any_nonzero = true;
    }
    if (!any_nonzero) throw InvalidInput("MatrixProductState: all tensors are zero");
    if (mps.boundary.rows() != bond || mps.boundary.cols() != bond) {
        throw InvalidInput("MatrixProductState: boundary shape mismatch");
    }
    (void)d;
}

std::size_t checked_dim(std::size_t local_dim, std::size_t sites) {
    std::size_t dim = 1;
    for (std::size_t i = 0; i < sites; ++i) {
        if (dim > kStateSizeCap / local_dim) {
            throw InvalidInput("state realization exceeds the d^m size cap");
        }
        dim *= local_dim;
    }
    return dim;
}

void contract_rec(const MatrixProductState& mps, std::size_t depth, std::size_t sites,
                  const ComplexMatrix& prefix, std::size_t base, std::size_t stride,
                  std::vector<Complex>& out) {
    const std::size_t d = mps.phys_dim;
    if (depth + 1 == sites) {
        // last site: amplitude = Tr(prefix * A^p), no full product needed
        const std::size_t bond = mps.bond_dim;
        for (std::size_t p = 0; p < d; ++p) {
            const ComplexMatrix& a = mps.tensors[p];
            Complex tr = 0.0;
            for (std::size_t i = 0; i < bond; ++i)
                for (std::size_t j = 0; j < bond; ++j) tr += prefix(i, j) * a(j, i);
            out[base + p] = tr;
        }
        return;
    }
    for (std::size_t p = 0; p < d; ++p) {
        contract_rec(mps, depth + 1, sites, prefix * mps.tensors[p], base + p * stride,
                     stride / d, out);
    }
}

std::size_t digit_of(std::size_t index, std::size_t stride, std::size_t d) {
    return (index / stride) % d;
}

} // namespace

MatrixProductState::MatrixProductState(std::vector<ComplexMatrix> site_tensors)
    : MatrixProductState(std::move(site_tensors), ComplexMatrix()) {}

MatrixProductState::MatrixProductState(std::vector<ComplexMatrix> site_tensors,
                                       ComplexMatrix boundary_op)
    : tensors(std::move(site_tensors)), boundary(std::move(boundary_op)) {
    phys_dim = tensors.size();
    bond_dim = tensors.empty() ? 0 : tensors.front().rows();
    if (boundary.empty()) boundary = ComplexMatrix::identity(bond_dim);
    validate(*this);
}

MatrixProductState MatrixProductState::with_boundary(ComplexMatrix boundary_op) const {
    return MatrixProductState(tensors, std::move(boundary_op));
}

MatrixProductState MatrixProductState::scaled(double factor) const {
    std::vector<ComplexMatrix> scaled_tensors = tensors;
    for (ComplexMatrix& a : scaled_tensors) a *= Complex{factor, 0.0};
    return MatrixProductState(std::move(scaled_tensors), boundary);
}

PureStateVector state_vector(const MatrixProductState& mps, std::size_t sites) {
    if (sites == 0) throw InvalidInput("state_vector: need at least one site");
    const std::size_t dim = checked_dim(mps.phys_dim, sites);

    PureStateVector psi;
    psi.sites = sites;
    psi.local_dim = mps.phys_dim;
    psi.amplitudes.assign(dim, Complex{0.0, 0.0});
    contract_rec(mps, 0, sites, mps.boundary, 0, dim / mps.phys_dim, psi.amplitudes);

    double n2 = 0.0;
    for (const Complex& a : psi.amplitudes) n2 += std::norm(a);
    const double nrm = std::sqrt(n2);
    if (nrm < 1e-12) {
        throw NumericalError("state_vector: identically zero state");
    }
    for (Complex& a : psi.amplitudes) a /= nrm;
    psi.normalized = true;
    return psi;
}

Complex expectation_local(const PureStateVector& state, const ComplexMatrix& op,
                          std::size_t site) {
    const std::size_t d = state.local_dim;
    if (op.rows() != d || op.cols() != d) {
        throw InvalidInput("expectation_local: operator dimension mismatch");
    }
    if (site >= state.sites) throw InvalidInput("expectation_local: site out of range");

    std::size_t stride = 1;
    for (std::size_t i = site + 1; i < state.sites; ++i) stride *= d;

    Complex acc = 0.0;
    const std::vector<Complex>& a = state.amplitudes;
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (a[s] == Complex{0.0, 0.0}) continue;
        const std::size_t p = digit_of(s, stride, d);
        const std::size_t base = s - p * stride;
        for (std::size_t pp = 0; pp < d; ++pp) {
            const Complex o = op(pp, p);
            if (o == Complex{0.0, 0.0}) continue;
            acc += std::conj(a[base + pp * stride]) * o * a[s];
        }
    }
    return acc;
}

Complex connected_correlator(const PureStateVector& state, const ComplexMatrix& op_a,
                             std::size_t site_i, const ComplexMatrix& op_b,
                             std::size_t site_j) {
    const std::size_t d = state.local_dim;
    if (site_i == site_j) throw InvalidInput("connected_correlator: sites must differ");
    if (op_a.rows() != d || op_a.cols() != d || op_b.rows() != d || op_b.cols() != d) {
        throw InvalidInput("connected_correlator: operator dimension mismatch");
    }
    if (site_i >= state.sites || site_j >= state.sites) {
        throw InvalidInput("connected_correlator: site out of range");
    }

    std::size_t stride_i = 1, stride_j = 1;
    for (std::size_t k = site_i + 1; k < state.sites; ++k) stride_i *= d;
    for (std::size_t k = site_j + 1; k < state.sites; ++k) stride_j *= d;

    Complex joint = 0.0;
    const std::vector<Complex>& a = state.amplitudes;
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (a[s] == Complex{0.0, 0.0}) continue;
        const std::size_t p = digit_of(s, stride_i, d);
        const std::size_t q = digit_of(s, stride_j, d);
        const std::size_t base = s - p * stride_i - q * stride_j;
        for (std::size_t pp = 0; pp < d; ++pp) {
            const Complex oa = op_a(pp, p);
            if (oa == Complex{0.0, 0.0}) continue;
            for (std::size_t qq = 0; qq < d; ++qq) {
                const Complex ob = op_b(qq, q);
                if (ob == Complex{0.0, 0.0}) continue;
                joint += std::conj(a[base + pp * stride_i + qq * stride_j]) * oa * ob * a[s];
            }
        }
    }
    return joint - expectation_local(state, op_a, site_i) * expectation_local(state, op_b, site_j);
}

SchmidtData schmidt_decompose(const PureStateVector& state, std::size_t cut) {
    if (cut == 0 || cut >= state.sites) {
        throw InvalidInput("schmidt_decompose: cut must be interior");
    }
    std::size_t rows = 1, cols = 1;
    for (std::size_t k = 0; k < cut; ++k) rows *= state.local_dim;
    for (std::size_t k = cut; k < state.sites; ++k) cols *= state.local_dim;
    if (std::min(rows, cols) > 1024) {
        throw InvalidInput("schmidt_decompose: bipartition exceeds the dense SVD cap");
    }

    const ComplexMatrix psi(rows, cols, state.amplitudes);
    const SvdResult r = svd(psi);

    SchmidtData out;
    const double smax = r.singular_values.empty() ? 0.0 : r.singular_values[0];
    double total = 0.0;
    for (double s : r.singular_values) {
        if (s >= 1e-12 * smax && s > 0.0) {
            out.coefficients.push_back(s);
            total += s * s;
        }
    }
    const double scale = 1.0 / std::sqrt(total);
    out.entropy_bits = 0.0;
    for (double& c : out.coefficients) {
        c *= scale;
        const double p = c * c;
        out.entropy_bits -= p * std::log2(p);
    }
    if (out.entropy_bits < 0.0) out.entropy_bits = 0.0;
    return out;
}

double block_entropy(const PureStateVector& state, std::size_t block_len) {
    if (block_len == 0 || block_len >= state.sites) {
        throw InvalidInput("block_entropy: block must be a proper sub-chain");
    }
    return schmidt_decompose(state, block_len).entropy_bits;
}

} // namespace mpsrg
