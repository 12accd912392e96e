#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include "mpsrg/decomp.hpp"
#include "mpsrg/errors.hpp"

namespace mpsrg {

namespace {

constexpr double kMachineEps = DBL_EPSILON;

struct Givens {
    double c;  // real cosine
    Complex s; // complex sine, c^2 + |s|^2 = 1
};

// G = [[c, s],[-conj(s), c]] maps (x, y) to (r, 0) when applied from the left.
Givens make_givens(Complex x, Complex y) {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    if (ay == 0.0) return {1.0, Complex{0.0, 0.0}};
    const double r = std::hypot(ax, ay);
    if (ax == 0.0) return {0.0, std::conj(y) / ay};
    return {ax / r, (x / ax) * std::conj(y) / r};
}

// Hessenberg reduction by Householder reflectors; returns Q with H = Q^† M Q.
void hessenberg(ComplexMatrix& h, ComplexMatrix& q) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    std::vector<Complex> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double below = 0.0;
        for (std::size_t i = k + 2; i < n; ++i) below += std::norm(h(i, k));
        if (below == 0.0) continue;

        const std::size_t len = n - (k + 1);
        double xnorm2 = std::norm(h(k + 1, k)) + below;
        const double xnorm = std::sqrt(xnorm2);
        const Complex x0 = h(k + 1, k);
        const Complex alpha = (std::abs(x0) == 0.0) ? Complex{-xnorm, 0.0}
                                                    : -(x0 / std::abs(x0)) * xnorm;
        for (std::size_t i = 0; i < len; ++i) v[i] = h(k + 1 + i, k);
        v[0] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = 0; i < len; ++i) vnorm2 += std::norm(v[i]);
        if (vnorm2 == 0.0) continue;
        const double beta = 2.0 / vnorm2;

        // H <- P H (rows k+1..n-1)
        for (std::size_t j = k; j < n; ++j) {
            Complex w = 0.0;
            for (std::size_t i = 0; i < len; ++i) w += std::conj(v[i]) * h(k + 1 + i, j);
            w *= beta;
            for (std::size_t i = 0; i < len; ++i) h.at(k + 1 + i, j) -= w * v[i];
        }
        // H <- H P (columns k+1..n-1)
        for (std::size_t i = 0; i < n; ++i) {
            Complex w = 0.0;
            for (std::size_t j = 0; j < len; ++j) w += h(i, k + 1 + j) * v[j];
            w *= beta;
            for (std::size_t j = 0; j < len; ++j) h.at(i, k + 1 + j) -= w * std::conj(v[j]);
        }
        // Q <- Q P
        for (std::size_t i = 0; i < n; ++i) {
            Complex w = 0.0;
            for (std::size_t j = 0; j < len; ++j) w += q(i, k + 1 + j) * v[j];
            w *= beta;
            for (std::size_t j = 0; j < len; ++j) q.at(i, k + 1 + j) -= w * std::conj(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h.at(i, k) = 0.0;
    }
}

// Eigenvalue of the trailing 2x2 closest to its bottom-right entry.
Complex wilkinson_shift(const ComplexMatrix& h, std::size_t hi) {
    const Complex a = h(hi - 1, hi - 1);
    const Complex b = h(hi - 1, hi);
    const Complex c = h(hi, hi - 1);
    const Complex d = h(hi, hi);
    const Complex tr_half = 0.5 * (a + d);
    const Complex det = a * d - b * c;
    const Complex disc = std::sqrt(tr_half * tr_half - det);
    const Complex l1 = tr_half + disc;
    const Complex l2 = tr_half - disc;
    return (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
}

// One explicit shifted QR step on the window [lo, hi]:
// H - sI = Q_s R, then H <- R Q_s + sI, with Q_s accumulated into q.
void qr_step(ComplexMatrix& h, ComplexMatrix& q, std::size_t lo, std::size_t hi, Complex shift) {
    const std::size_t n = h.rows();
    for (std::size_t k = lo; k <= hi; ++k) h.at(k, k) -= shift;

    std::vector<Givens> rots;
    rots.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
        const Givens g = make_givens(h(k, k), h(k + 1, k));
        rots.push_back(g);
        const double cs = g.c;
        const Complex sn = g.s;
        for (std::size_t j = k; j < n; ++j) {
            const Complex hkj = h(k, j);
            const Complex hk1j = h(k + 1, j);
            h.at(k, j) = cs * hkj + sn * hk1j;
            h.at(k + 1, j) = -std::conj(sn) * hkj + cs * hk1j;
        }
        h.at(k + 1, k) = 0.0;
    }

    for (std::size_t k = lo; k < hi; ++k) {
        const double cs = rots[k - lo].c;
        const Complex sn = rots[k - lo].s;
        for (std::size_t i = 0; i <= k + 1; ++i) {
            const Complex hik = h(i, k);
            const Complex hik1 = h(i, k + 1);
            h.at(i, k) = cs * hik + std::conj(sn) * hik1;
            h.at(i, k + 1) = -sn * hik + cs * hik1;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Complex qik = q(i, k);
            const Complex qik1 = q(i, k + 1);
            q.at(i, k) = cs * qik + std::conj(sn) * qik1;
            q.at(i, k + 1) = -sn * qik + cs * qik1;
        }
    }

    for (std::size_t k = lo; k <= hi; ++k) h.at(k, k) += shift;
}

// Reduce the Hessenberg matrix to (upper-triangular) Schur form, accumulating
// the unitary similarity into q. Throws NumericalError on stagnation.
void schur_form(ComplexMatrix& h, ComplexMatrix& q) {
    const std::size_t n = h.rows();
    const double hnorm = std::max(h.frobenius_norm(), DBL_MIN);
    std::size_t hi = n - 1;
    std::size_t iters_here = 0;
    std::size_t total = 0;
    const std::size_t cap = 120 * n + 200;

    while (true) {
        // Deflate any negligible subdiagonal entries.
        for (std::size_t k = 1; k <= hi; ++k) {
            double s = std::abs(h(k - 1, k - 1)) + std::abs(h(k, k));
            if (s == 0.0) s = hnorm;
            if (std::abs(h(k, k - 1)) <= kMachineEps * s) h.at(k, k - 1) = 0.0;
        }
        // Shrink the active window past converged eigenvalues.
        while (hi > 0 && h(hi, hi - 1) == Complex{0.0, 0.0}) {
            --hi;
            iters_here = 0;
        }
        if (hi == 0) break;

        // Active block [lo, hi]: walk up until a zero subdiagonal or the top.
        std::size_t lo = hi;
        while (lo > 0 && h(lo, lo - 1) != Complex{0.0, 0.0}) --lo;

        Complex shift = wilkinson_shift(h, hi);
        ++iters_here;
        ++total;
        if (total > cap) throw NumericalError("eig_general: QR iteration cap exceeded");
        if (iters_here % 12 == 0) {
            // Exceptional shift to break stagnation cycles.
            const double extra = std::abs(h(hi, hi - 1)) +
                                 (hi > 1 ? std::abs(h(hi - 1, hi - 2)) : 0.0);
            shift = h(hi, hi) + Complex{0.75 * extra, 0.0};
        }
        qr_step(h, q, lo, hi, shift);
    }
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) h.at(i, j) = 0.0;
}

// Right eigenvector of the triangular factor for the eigenvalue at position k,
// by back substitution with perturbed near-singular denominators.
std::vector<Complex> triangular_eigenvector(const ComplexMatrix& t, std::size_t k, double tnorm) {
    const double floor_den = std::max(kMachineEps * tnorm, DBL_MIN);
    std::vector<Complex> y(t.rows(), Complex{0.0, 0.0});
    y[k] = 1.0;
    const Complex lambda = t(k, k);
    for (std::size_t jj = k; jj > 0; --jj) {
        const std::size_t j = jj - 1;
        Complex acc = 0.0;
        for (std::size_t i = j + 1; i <= k; ++i) acc += t(j, i) * y[i];
        Complex den = t(j, j) - lambda;
        if (std::abs(den) < floor_den) den = Complex{floor_den, 0.0};
        y[j] = -acc / den;
        // Keep the unnormalized solution in range for strongly defective blocks.
        const double mag = std::abs(y[j]);
        if (mag > 1e140) {
            for (std::size_t i = j; i <= k; ++i) y[i] /= mag;
        }
    }
    return y;
}

} // namespace

Spectrum eig_general(const ComplexMatrix& m, double tol) {
    if (m.empty()) throw InvalidInput("eig_general: empty matrix");
    if (m.rows() != m.cols()) throw InvalidInput("eig_general: matrix must be square");
    const std::size_t n = m.rows();

    ComplexMatrix t = m;
    ComplexMatrix q = ComplexMatrix::identity(n);
    if (n > 1) {
        hessenberg(t, q);
        schur_form(t, q);
    }
    const double tnorm = std::max(t.frobenius_norm(), DBL_MIN);

    // Unit right eigenvectors in the original basis.
    ComplexMatrix vectors(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::vector<Complex> y = triangular_eigenvector(t, k, tnorm);
        std::vector<Complex> v(n, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            Complex s = 0.0;
            for (std::size_t j = 0; j <= k; ++j) s += q(i, j) * y[j];
            v[i] = s;
        }
        const double nv = norm(v);
        Complex pivot = 0.0;
        for (const Complex& z : v) {
            if (std::abs(z) > 1e-8 * nv) {
                pivot = z;
                break;
            }
        }
        const Complex ph = (pivot == Complex{0.0, 0.0}) ? Complex{1.0, 0.0}
                                                        : std::abs(pivot) / pivot;
        for (std::size_t i = 0; i < n; ++i) vectors.at(i, k) = v[i] * ph / nv;
    }

    // Sort by descending magnitude; ties by real then imaginary part.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Complex za = t(a, a);
        const Complex zb = t(b, b);
        const double ma = std::abs(za);
        const double mb = std::abs(zb);
        if (ma != mb) return ma > mb;
        if (za.real() != zb.real()) return za.real() > zb.real();
        return za.imag() > zb.imag();
    });

    Spectrum spec;
    spec.eigenvalues.resize(n);
    spec.right_vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        spec.eigenvalues[k] = t(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) spec.right_vectors.at(i, k) = vectors(i, order[k]);
    }

    // Cluster eigenvalues at absolute tolerance tol.
    std::vector<bool> grouped(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        if (grouped[k]) continue;
        Complex sum = 0.0;
        int count = 0;
        for (std::size_t j = k; j < n; ++j) {
            if (!grouped[j] && std::abs(spec.eigenvalues[j] - spec.eigenvalues[k]) <= tol) {
                grouped[j] = true;
                sum += spec.eigenvalues[j];
                ++count;
            }
        }
        EigenGroup g;
        g.value = sum / static_cast<double>(count);
        g.algebraic = count;
        if (count == 1) {
            g.geometric = 1;
        } else {
            ComplexMatrix shifted = m;
            for (std::size_t i = 0; i < n; ++i) shifted.at(i, i) -= g.value;
            const double rank_tol = 1e-8 * std::max(m.frobenius_norm(), 1e-300);
            g.geometric = static_cast<int>(n - numeric_rank_abs(shifted, rank_tol));
            if (g.geometric < 1) g.geometric = 1;
            if (g.geometric > g.algebraic) g.geometric = g.algebraic;
        }
        spec.groups.push_back(g);
    }
    return spec;
}

} // namespace mpsrg
