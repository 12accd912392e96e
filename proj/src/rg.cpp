#include "mpsrg/rg.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "mpsrg/errors.hpp"

namespace mpsrg {

namespace {

bool is_perfect_square(std::size_t n, std::size_t& root) {
    std::size_t r = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
    for (std::size_t c = (r > 0 ? r - 1 : 0); c <= r + 1; ++c) {
        if (c * c == n) {
            root = c;
            return true;
        }
    }
    return false;
}

// E divided by its leading eigenvalue, so stationary flows compare equal
// independent of a residual eigenvalue phase.
ComplexMatrix phase_aligned(const TransferMatrix& e) {
    const Complex lead = e.leading_eigenvalue();
    if (std::abs(lead) == 0.0) return e.matrix();
    ComplexMatrix m = e.matrix();
    m *= Complex{1.0, 0.0} / lead;
    return m;
}

bool unimodular_or_zero(const Spectrum& s, double tol) {
    for (const Complex& ev : s.eigenvalues) {
        const double mag = std::abs(ev);
        if (std::min(std::abs(mag - 1.0), mag) > tol) return false;
    }
    return true;
}

} // namespace

TransferMatrix::TransferMatrix(ComplexMatrix m, std::size_t bond)
    : mat_(std::move(m)), bond_(bond) {}

TransferMatrix TransferMatrix::from_mps(const MatrixProductState& mps) {
    const std::size_t d2 = mps.bond_dim * mps.bond_dim;
    ComplexMatrix e(d2, d2);
    for (const ComplexMatrix& a : mps.tensors) e += kron(a, a.conjugate());
    return TransferMatrix(std::move(e), mps.bond_dim);
}

TransferMatrix TransferMatrix::from_matrix(ComplexMatrix e) {
    if (e.rows() != e.cols() || e.empty()) {
        throw InvalidInput("TransferMatrix: matrix must be square and nonempty");
    }
    std::size_t bond = 0;
    is_perfect_square(e.rows(), bond); // bond stays 0 for non-D^2 diagnostics wrappers
    return TransferMatrix(std::move(e), bond);
}

const Spectrum& TransferMatrix::spectrum(double tol) const& {
    if (!cache_ || cache_tol_ != tol) {
        cache_ = std::make_shared<const Spectrum>(eig_general(mat_, tol));
        cache_tol_ = tol;
    }
    return *cache_;
}

double TransferMatrix::leading_magnitude() const {
    return std::abs(leading_eigenvalue());
}

TransferMatrix transfer_matrix(const MatrixProductState& mps) {
    return TransferMatrix::from_mps(mps);
}

RgStepResult coarse_grain_step(const MatrixProductState& mps, double drop_tol_rel) {
    const std::size_t d = mps.phys_dim;
    const std::size_t bond = mps.bond_dim;
    const std::size_t d2 = d * d;
    const std::size_t b2 = bond * bond;

    // Row (p*d + q) holds the flattened product A^p A^q.
    ComplexMatrix merged(d2, b2);
    for (std::size_t p = 0; p < d; ++p) {
        for (std::size_t q = 0; q < d; ++q) {
            const ComplexMatrix prod = mps.tensors[p] * mps.tensors[q];
            for (std::size_t i = 0; i < bond; ++i)
                for (std::size_t j = 0; j < bond; ++j)
                    merged.at(p * d + q, i * bond + j) = prod(i, j);
        }
    }
    if (merged.max_abs() == 0.0) {
        throw NumericalError("coarse_grain_step: all pair products vanish (degenerate MPS)");
    }

    const SvdResult r = svd(merged);
    const double s_max = r.singular_values[0];
    std::size_t keep = 0;
    double total = 0.0, kept = 0.0;
    for (double s : r.singular_values) total += s * s;
    for (double s : r.singular_values) {
        if (s > drop_tol_rel * s_max) {
            kept += s * s;
            ++keep;
        }
    }

    std::vector<ComplexMatrix> coarse(keep, ComplexMatrix(bond, bond));
    for (std::size_t l = 0; l < keep; ++l) {
        const double lambda = r.singular_values[l];
        for (std::size_t i = 0; i < bond; ++i)
            for (std::size_t j = 0; j < bond; ++j)
                coarse[l].at(i, j) = lambda * std::conj(r.right_vectors(i * bond + j, l));
    }
    ComplexMatrix isometry(keep, d2);
    for (std::size_t l = 0; l < keep; ++l)
        for (std::size_t pq = 0; pq < d2; ++pq)
            isometry.at(l, pq) = std::conj(r.left_vectors(pq, l));

    RgStepResult out{MatrixProductState(std::move(coarse), mps.boundary), std::move(isometry),
                     std::vector<double>(r.singular_values.begin(),
                                         r.singular_values.begin() + keep),
                     total > 0.0 ? 1.0 - kept / total : 0.0};
    return out;
}

MatrixProductState normalize_leading(const MatrixProductState& mps) {
    const TransferMatrix e = transfer_matrix(mps);
    const double lead = e.leading_magnitude();
    if (lead <= 1e-12 * std::max(1.0, e.matrix().frobenius_norm())) {
        throw NumericalError("normalize_leading: leading transfer eigenvalue is zero");
    }
    return mps.scaled(1.0 / std::sqrt(lead));
}

FlowTrace flow(const MatrixProductState& mps, std::size_t max_steps, double conv_tol,
               const FlowOptions& opts) {
    if (max_steps < 1) throw InvalidInput("flow: need at least one step");

    FlowTrace trace;
    MatrixProductState state = normalize_leading(mps);
    ComplexMatrix prev = phase_aligned(transfer_matrix(state));
    std::size_t stall = 0;

    for (std::size_t step = 1; step <= max_steps; ++step) {
        const RgStepResult rg = coarse_grain_step(state, opts.drop_tol_rel);
        state = normalize_leading(rg.coarse_state);
        const TransferMatrix e = transfer_matrix(state);
        const Spectrum& spec = e.spectrum(opts.spectrum_tol);
        const ComplexMatrix aligned = phase_aligned(e);

        FlowRecord rec;
        rec.step = step;
        rec.d_eff = state.phys_dim;
        for (std::size_t k = 0; k < 4 && k < spec.eigenvalues.size(); ++k) {
            rec.top_eigenvalues[k] = spec.eigenvalues[k];
        }
        rec.residual = distance(aligned, prev);

        const double l1 = std::abs(spec.eigenvalues[0]);
        const double l2 = spec.eigenvalues.size() > 1 ? std::abs(spec.eigenvalues[1]) : 0.0;
        if (l2 >= l1 * (1.0 - 1e-12)) {
            rec.correlation_length = std::numeric_limits<double>::infinity();
        } else if (l2 <= 0.0) {
            rec.correlation_length = 0.0;
        } else {
            rec.correlation_length = -1.0 / std::log(l2 / l1);
        }

        // Entropy of one coarse site, on the longest even chain under the cap.
        std::size_t sites = opts.entropy_sites - opts.entropy_sites % 2;
        rec.entropy_bits = std::numeric_limits<double>::quiet_NaN();
        rec.entropy_sites = 0;
        for (; sites >= 2; sites -= 2) {
            double cap_check = std::pow(static_cast<double>(state.phys_dim),
                                        static_cast<double>(sites));
            if (cap_check > static_cast<double>(kStateSizeCap)) continue;
            try {
                const PureStateVector psi = state_vector(state, sites);
                rec.entropy_bits = block_entropy(psi, 1);
                rec.entropy_sites = sites;
                break;
            } catch (const Error&) {
                // degenerate realization at this length; try a shorter chain
            }
        }

        trace.records.push_back(rec);

        if (rec.residual < conv_tol) {
            trace.converged = true;
            break;
        }
        if (unimodular_or_zero(spec, 1e-6)) {
            if (++stall >= opts.stall_limit) {
                trace.periodic = true;
                break;
            }
        } else {
            stall = 0;
        }
        prev = aligned;
    }
    trace.final_state = state;
    return trace;
}

FixedPointLimit fixed_point_operator(const TransferMatrix& e, std::size_t max_squarings,
                                     double tol) {
    if (std::abs(e.leading_magnitude() - 1.0) > 1e-3) {
        throw InvalidInput("fixed_point_operator: transfer matrix must be normalized");
    }
    ComplexMatrix f = e.matrix();
    for (std::size_t k = 0; k < max_squarings; ++k) {
        if (f.frobenius_norm() > 1e100) break; // Jordan growth, no limit
        const ComplexMatrix g = f * f;
        if (distance(g, f) < tol) {
            FixedPointLimit out{g, 1, std::nullopt};
            const ComplexMatrix odd = e.matrix() * g;
            if (distance(odd, g) >= tol) {
                out.period = 2;
                out.alternate = odd;
            }
            return out;
        }
        f = g;
    }
    throw NonConvergentError("fixed_point_operator: no stationary power limit");
}

ComplexMatrix renormalize_observable(const ComplexMatrix& op, const RgStepResult& step) {
    const std::size_t d2 = step.isometry.cols();
    if (op.rows() != op.cols() || op.rows() * op.rows() != d2) {
        throw InvalidInput("renormalize_observable: operator does not match the step");
    }
    const ComplexMatrix lifted = kron(op, ComplexMatrix::identity(op.rows()));
    return step.isometry * lifted * step.isometry.adjoint();
}

} // namespace mpsrg
