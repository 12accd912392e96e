#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpsrg/decomp.hpp"
#include "mpsrg/errors.hpp"

namespace mpsrg {

namespace {

constexpr double kOffDiagTol = 1e-15; // relative orthogonality threshold
constexpr int kMaxSweeps = 60;

struct CoreResult {
    ComplexMatrix work; // rotated copy of the input, columns = sigma_j * u_j
    ComplexMatrix v;    // accumulated right rotations
};

// One-sided Jacobi on the columns of a (rows >= cols assumed by the caller):
// repeatedly applies unitary 2x2 rotations from the right until all column
// pairs are numerically orthogonal.
CoreResult jacobi_orthogonalize(const ComplexMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    CoreResult res{a, ComplexMatrix::identity(n)};
    ComplexMatrix& w = res.work;
    ComplexMatrix& v = res.v;

    std::vector<double> norm2(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::norm(w(i, j));
        norm2[j] = s;
    }

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = norm2[p];
                const double aqq = norm2[q];
                // A column at round-off level relative to its partner cannot
                // influence it; rotating such pairs never converges.
                if (app == 0.0 || aqq == 0.0 ||
                    std::min(app, aqq) <= 1e-30 * std::max(app, aqq)) {
                    continue;
                }
                Complex g = 0.0;
                for (std::size_t i = 0; i < m; ++i) g += std::conj(w(i, p)) * w(i, q);
                const double mag = std::abs(g);
                if (mag <= kOffDiagTol * std::sqrt(app * aqq)) {
                    continue;
                }
                rotated = true;

                // Rotation diagonalizing the Hermitian 2x2 Gram [[app, g],[conj(g), aqq]].
                const Complex phase = g / mag;
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const Complex sp = s * std::conj(phase);

                for (std::size_t i = 0; i < m; ++i) {
                    const Complex wp = w(i, p);
                    const Complex wq = w(i, q);
                    w.at(i, p) = c * wp - sp * wq;
                    w.at(i, q) = s * wp + c * std::conj(phase) * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex vp = v(i, p);
                    const Complex vq = v(i, q);
                    v.at(i, p) = c * vp - sp * vq;
                    v.at(i, q) = s * vp + c * std::conj(phase) * vq;
                }

                double np = 0.0, nq = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    np += std::norm(w(i, p));
                    nq += std::norm(w(i, q));
                }
                norm2[p] = np;
                norm2[q] = nq;
            }
        }
        if (!rotated) return res;
    }
    throw NumericalError("svd: Jacobi sweeps did not converge");
}

// Replace (near-)zero left-singular columns by an orthonormal completion.
void complete_columns(ComplexMatrix& u, const std::vector<bool>& degenerate) {
    const std::size_t m = u.rows();
    const std::size_t k = u.cols();

    auto residual = [&](std::size_t cand, std::size_t skip) {
        std::vector<Complex> e(m, Complex{0.0, 0.0});
        e[cand] = 1.0;
        for (std::size_t l = 0; l < k; ++l) {
            if (l == skip) continue;
            Complex overlap = 0.0;
            for (std::size_t i = 0; i < m; ++i) overlap += std::conj(u(i, l)) * e[i];
            for (std::size_t i = 0; i < m; ++i) e[i] -= overlap * u(i, l);
        }
        return e;
    };

    std::size_t candidate = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (!degenerate[j]) continue;
        bool filled = false;
        for (; candidate < m && !filled; ++candidate) {
            std::vector<Complex> e = residual(candidate, j);
            const double nrm = norm(e);
            if (nrm > 0.02) {
                for (std::size_t i = 0; i < m; ++i) u.at(i, j) = e[i] / nrm;
                filled = true;
            }
        }
        if (!filled) {
            // Rescan for the best remaining direction.
            double best = 0.0;
            std::vector<Complex> best_e;
            for (std::size_t cand = 0; cand < m; ++cand) {
                std::vector<Complex> e = residual(cand, j);
                const double nrm = norm(e);
                if (nrm > best) {
                    best = nrm;
                    best_e = std::move(e);
                }
            }
            for (std::size_t i = 0; i < m; ++i) u.at(i, j) = best_e[i] / best;
        }
    }
}

// SVD of a tall (rows >= cols) matrix, columns sorted by descending sigma.
SvdResult svd_tall(const ComplexMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    CoreResult core = jacobi_orthogonalize(a);

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::norm(core.work(i, j));
        sigma[j] = std::sqrt(s);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    const double sigma_max = sigma.empty() ? 0.0 : sigma[order[0]];
    const double zero_tol = sigma_max * 1e-13;

    SvdResult out;
    out.left_vectors = ComplexMatrix(m, n);
    out.right_vectors = ComplexMatrix(n, n);
    out.singular_values.resize(n);
    std::vector<bool> degenerate(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.singular_values[j] = sigma[src];
        for (std::size_t i = 0; i < n; ++i) out.right_vectors.at(i, j) = core.v(i, src);
        if (sigma[src] > zero_tol) {
            for (std::size_t i = 0; i < m; ++i) {
                out.left_vectors.at(i, j) = core.work(i, src) / sigma[src];
            }
        } else {
            degenerate[j] = true;
        }
    }
    complete_columns(out.left_vectors, degenerate);
    return out;
}

void fix_phases(SvdResult& r) {
    const std::size_t k = r.singular_values.size();
    for (std::size_t j = 0; j < k; ++j) {
        Complex pivot = 0.0;
        for (std::size_t i = 0; i < r.right_vectors.rows(); ++i) {
            const Complex z = r.right_vectors(i, j);
            if (std::abs(z) > 1e-12) {
                pivot = z;
                break;
            }
        }
        if (pivot == Complex{0.0, 0.0}) continue;
        const Complex ph = std::conj(pivot) / std::abs(pivot);
        for (std::size_t i = 0; i < r.right_vectors.rows(); ++i) r.right_vectors.at(i, j) *= ph;
        for (std::size_t i = 0; i < r.left_vectors.rows(); ++i) r.left_vectors.at(i, j) *= ph;
    }
}

} // namespace

ComplexMatrix SvdResult::reconstruct() const {
    const std::size_t m = left_vectors.rows();
    const std::size_t n = right_vectors.rows();
    const std::size_t k = singular_values.size();
    ComplexMatrix out(m, n);
    for (std::size_t l = 0; l < k; ++l) {
        if (singular_values[l] == 0.0) continue;
        for (std::size_t i = 0; i < m; ++i) {
            const Complex ul = singular_values[l] * left_vectors(i, l);
            for (std::size_t j = 0; j < n; ++j) {
                out.at(i, j) += ul * std::conj(right_vectors(j, l));
            }
        }
    }
    return out;
}

SvdResult svd(const ComplexMatrix& m) {
    if (m.empty()) throw InvalidInput("svd: empty matrix");
    SvdResult out;
    if (m.rows() >= m.cols()) {
        out = svd_tall(m);
    } else {
        SvdResult t = svd_tall(m.adjoint());
        out.left_vectors = std::move(t.right_vectors);
        out.right_vectors = std::move(t.left_vectors);
        out.singular_values = std::move(t.singular_values);
    }
    fix_phases(out);
    return out;
}

std::size_t numeric_rank(const ComplexMatrix& m, double tol_rel) {
    const SvdResult r = svd(m);
    if (r.singular_values.empty() || r.singular_values[0] == 0.0) return 0;
    const double cut = tol_rel * r.singular_values[0];
    std::size_t rank = 0;
    for (double s : r.singular_values) {
        if (s > cut) ++rank;
    }
    return rank;
}

std::size_t numeric_rank_abs(const ComplexMatrix& m, double tol_abs) {
    const SvdResult r = svd(m);
    std::size_t rank = 0;
    for (double s : r.singular_values) {
        if (s > tol_abs) ++rank;
    }
    return rank;
}

} // namespace mpsrg
