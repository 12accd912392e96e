#include "mpsrg/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mpsrg/errors.hpp"

namespace mpsrg {

namespace {

constexpr double kFitTol = 1e-6;

ComplexMatrix unvec_column(const ComplexMatrix& m, std::size_t col, std::size_t bond) {
    ComplexMatrix x(bond, bond);
    for (std::size_t i = 0; i < bond; ++i)
        for (std::size_t j = 0; j < bond; ++j) x.at(i, j) = m(i * bond + j, col);
    return x;
}

Complex fro_dot(const ComplexMatrix& a, const ComplexMatrix& b) {
    Complex s = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) {
        s += std::conj(a.entries()[k]) * b.entries()[k];
    }
    return s;
}

// Least-squares coefficient and relative residual of  target ~ c * direction.
struct Proportionality {
    Complex coefficient;
    double residual;
};

Proportionality fit_proportional(const ComplexMatrix& target, const ComplexMatrix& direction,
                                 double scale) {
    const double dn2 = direction.frobenius_norm();
    if (dn2 == 0.0) return {0.0, target.frobenius_norm() / std::max(scale, 1e-300)};
    const Complex c = fro_dot(direction, target) / (dn2 * dn2);
    ComplexMatrix resid = target;
    resid -= c * direction;
    return {c, resid.frobenius_norm() / std::max(scale, 1e-300)};
}

// Tensor family recovered from the reshuffled transfer matrix
// M[(a g),(a' g')] = E[(a a'),(g g')] = sum_p vec(A^p) vec(A^p)^dagger.
struct TensorFamily {
    std::vector<ComplexMatrix> tensors; // sqrt(weight) folded in, descending weight
    std::vector<double> weights;
};

TensorFamily extract_tensors(const ComplexMatrix& e, std::size_t bond, double rel_tol) {
    const std::size_t n = bond * bond;
    ComplexMatrix m(n, n);
    for (std::size_t a = 0; a < bond; ++a)
        for (std::size_t g = 0; g < bond; ++g)
            for (std::size_t ap = 0; ap < bond; ++ap)
                for (std::size_t gp = 0; gp < bond; ++gp)
                    m.at(a * bond + g, ap * bond + gp) = e(a * bond + ap, g * bond + gp);
    // Hermitize before factoring; M is PSD for any genuine transfer matrix.
    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h.at(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));

    const SvdResult r = svd(h);
    TensorFamily fam;
    const double cut = rel_tol * (r.singular_values.empty() ? 0.0 : r.singular_values[0]);
    for (std::size_t l = 0; l < r.singular_values.size(); ++l) {
        if (r.singular_values[l] <= cut) break;
        const double root = std::sqrt(r.singular_values[l]);
        ComplexMatrix b(bond, bond);
        for (std::size_t i = 0; i < bond; ++i)
            for (std::size_t j = 0; j < bond; ++j)
                b.at(i, j) = root * r.right_vectors(i * bond + j, l);
        fam.tensors.push_back(std::move(b));
        fam.weights.push_back(r.singular_values[l]);
    }
    return fam;
}

// Phase-fix a matrix expected to be Hermitian PSD up to a global phase.
std::optional<ComplexMatrix> hermitize_psd(const ComplexMatrix& x) {
    const Complex tr = x.trace();
    const double nrm = x.frobenius_norm();
    if (nrm == 0.0 || std::abs(tr) < 1e-10 * nrm) return std::nullopt;
    ComplexMatrix fixed = x;
    fixed *= std::conj(tr) / std::abs(tr);
    ComplexMatrix herm(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            herm.at(i, j) = 0.5 * (fixed(i, j) + std::conj(fixed(j, i)));
    if (distance(fixed, herm) > 1e-6 * nrm) return std::nullopt;
    return herm;
}

// Positive square root (and its inverse) of a Hermitian positive matrix.
struct PsdRoot {
    ComplexMatrix half;
    ComplexMatrix inv_half;
};

std::optional<PsdRoot> psd_root(const ComplexMatrix& h) {
    const SvdResult r = svd(h);
    const std::size_t n = h.rows();
    const double smax = r.singular_values[0];
    PsdRoot out{ComplexMatrix(n, n), ComplexMatrix(n, n)};
    for (std::size_t l = 0; l < n; ++l) {
        const double s = r.singular_values[l];
        if (s < 1e-10 * smax) return std::nullopt; // not full rank
        // verify positivity: <v, H v> must be positive for each singular pair
        const std::vector<Complex> v = r.right_vectors.column(l);
        const Complex quad = dot(v, apply(h, v));
        if (quad.real() <= 0.0) return std::nullopt;
        const double rt = std::sqrt(s);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const Complex proj = r.right_vectors(i, l) * std::conj(r.right_vectors(j, l));
                out.half.at(i, j) += rt * proj;
                out.inv_half.at(i, j) += proj / rt;
            }
    }
    return out;
}

double unit_band(double tol) { return std::max(tol, 1e-8); }

} // namespace

std::string to_string(FixedPointClass label) {
    switch (label) {
        case FixedPointClass::Product: return "Product";
        case FixedPointClass::GenericDimer: return "GenericDimer";
        case FixedPointClass::GHZ: return "GHZ";
        case FixedPointClass::WFamily: return "WFamily";
        case FixedPointClass::DomainWallFamily: return "DomainWallFamily";
        case FixedPointClass::PeriodicOrUnknown: return "PeriodicOrUnknown";
    }
    return "PeriodicOrUnknown";
}

ComplexMatrix w_family_representative(double theta) {
    ComplexMatrix e(4, 4);
    e.at(0, 0) = 1.0;
    e.at(1, 1) = std::polar(1.0, theta);
    e.at(2, 2) = std::polar(1.0, -theta);
    e.at(3, 3) = 1.0;
    e.at(3, 0) = 1.0;
    return e;
}

DominantPair dominant_eigenvectors(const TransferMatrix& e, double tol) {
    const std::size_t bond = e.bond_dim();
    if (bond == 0) {
        throw InvalidInput("dominant_eigenvectors: needs a D^2 x D^2 transfer matrix");
    }
    const double utol = unit_band(tol);
    const Spectrum& spec = e.spectrum(utol);

    std::vector<std::size_t> unit_idx;
    for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
        if (std::abs(std::abs(spec.eigenvalues[i]) - 1.0) <= utol) unit_idx.push_back(i);
    }
    if (unit_idx.empty()) {
        throw InvalidInput("dominant_eigenvectors: no unit-magnitude eigenvalue; normalize E");
    }

    DominantPair pair;
    pair.degeneracy = unit_idx.size();
    for (const EigenGroup& g : spec.groups) {
        if (std::abs(std::abs(g.value) - 1.0) <= utol && g.geometric < g.algebraic) {
            pair.defective = true;
        }
    }

    pair.right_basis = ComplexMatrix(e.dim(), pair.degeneracy);
    for (std::size_t k = 0; k < unit_idx.size(); ++k)
        for (std::size_t i = 0; i < e.dim(); ++i)
            pair.right_basis.at(i, k) = spec.right_vectors(i, unit_idx[k]);

    // Left eigenvectors: right eigenvectors of E^dagger at conjugate eigenvalues.
    const Spectrum lspec = eig_general(e.matrix().adjoint(), utol);
    pair.left_basis = ComplexMatrix(e.dim(), pair.degeneracy);
    std::vector<bool> used(lspec.eigenvalues.size(), false);
    for (std::size_t k = 0; k < unit_idx.size(); ++k) {
        const Complex target = std::conj(spec.eigenvalues[unit_idx[k]]);
        std::size_t best = 0;
        double best_dist = 1e300;
        for (std::size_t j = 0; j < lspec.eigenvalues.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(lspec.eigenvalues[j] - target);
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        used[best] = true;
        for (std::size_t i = 0; i < e.dim(); ++i)
            pair.left_basis.at(i, k) = lspec.right_vectors(i, best);
    }

    pair.phi_right = unvec_column(pair.right_basis, 0, bond);
    pair.phi_left = unvec_column(pair.left_basis, 0, bond);
    pair.schmidt_rank_right = numeric_rank(pair.phi_right, 1e-8);
    pair.schmidt_rank_left = numeric_rank(pair.phi_left, 1e-8);
    if (pair.degeneracy == 1 && !pair.defective) {
        // normalize <phi_left | phi_right> to one
        const Complex overlap = fro_dot(pair.phi_left, pair.phi_right);
        if (std::abs(overlap) > 1e-12) pair.phi_left *= 1.0 / std::conj(overlap);
    }

    if (pair.degeneracy == 1 && !pair.defective && pair.schmidt_rank_right == bond &&
        pair.schmidt_rank_left == bond) {
        // Gauge-fix: S = W * H_R^{-1/2} sends Phi_R to the identity matrix and
        // Phi_L to a positive diagonal.
        const auto hr = hermitize_psd(pair.phi_right);
        const auto hl = hermitize_psd(pair.phi_left);
        if (hr && hl) {
            const auto root = psd_root(*hr);
            if (root) {
                const ComplexMatrix mid = root->half * (*hl) * root->half;
                const SvdResult diag = svd(mid);
                double sum = 0.0;
                for (double s : diag.singular_values) sum += s;
                if (sum > 0.0) {
                    pair.lambda.resize(bond);
                    for (std::size_t i = 0; i < bond; ++i) {
                        pair.lambda[i] = diag.singular_values[i] / sum;
                    }
                    pair.phi_right = ComplexMatrix::identity(bond);
                    ComplexMatrix left(bond, bond);
                    for (std::size_t i = 0; i < bond; ++i) left.at(i, i) = pair.lambda[i];
                    pair.phi_left = left;
                    pair.canonical = true;
                }
            }
        }
    }
    return pair;
}

JordanInfo detect_jordan(const TransferMatrix& e, Complex eigenvalue, double tol) {
    const double utol = unit_band(tol);
    const Spectrum& spec = e.spectrum(tol);
    JordanInfo info;
    info.algebraic = 0;
    double best = 1e300;
    for (const EigenGroup& g : spec.groups) {
        const double d = std::abs(g.value - eigenvalue);
        if (d < best) {
            best = d;
            info.algebraic = (d <= utol + tol) ? g.algebraic : 0;
        }
    }
    ComplexMatrix shifted = e.matrix();
    for (std::size_t i = 0; i < shifted.rows(); ++i) shifted.at(i, i) -= eigenvalue;
    const double cut = 1e-8 * std::max(e.matrix().frobenius_norm(), 1e-300);
    info.geometric = static_cast<int>(e.dim() - numeric_rank_abs(shifted, cut));
    if (info.geometric < 0) info.geometric = 0;
    return info;
}

MatrixProductState fixed_point_mps(const DominantPair& pair) {
    if (!pair.canonical || pair.lambda.empty()) {
        throw InvalidInput("fixed_point_mps: needs a nondegenerate full-rank canonical pair");
    }
    const std::size_t bond = pair.lambda.size();
    std::vector<ComplexMatrix> tensors;
    tensors.reserve(bond * bond);
    for (std::size_t p = 0; p < bond; ++p) {
        for (std::size_t q = 0; q < bond; ++q) {
            ComplexMatrix a(bond, bond);
            a.at(p, q) = std::sqrt(pair.lambda[q]);
            tensors.push_back(std::move(a));
        }
    }
    return MatrixProductState(std::move(tensors));
}

namespace {

// --- W-family matcher ----------------------------------------------------

Complex det2(const ComplexMatrix& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

Complex det2_mixed(const ComplexMatrix& x, const ComplexMatrix& y) {
    return x(0, 0) * y(1, 1) + y(0, 0) * x(1, 1) - x(0, 1) * y(1, 0) - y(0, 1) * x(1, 0);
}

struct WMatch {
    double theta;
    double residual;
};

// det(x B0 + y B1) = a x^2 + b xy + c y^2: a double root marks the W family
// (a one-dimensional singular direction, the nilpotent tensor).
std::optional<WMatch> try_w_match(const std::vector<ComplexMatrix>& b) {
    const Complex a = det2(b[0]);
    const Complex bb = det2_mixed(b[0], b[1]);
    const Complex c = det2(b[1]);
    const double scale = std::abs(a) + std::abs(bb) + std::abs(c);
    if (scale == 0.0) return std::nullopt; // fully singular span, not W
    const Complex disc = bb * bb - 4.0 * a * c;
    if (std::abs(disc) > 1e-8 * scale * scale) return std::nullopt;

    Complex x0, y0;
    if (std::abs(a) >= std::abs(c)) {
        x0 = -bb / (2.0 * a);
        y0 = 1.0;
    } else {
        x0 = 1.0;
        y0 = -bb / (2.0 * c);
    }
    ComplexMatrix nil = x0 * b[0] + y0 * b[1];
    const double nn = nil.frobenius_norm();
    if (nn == 0.0) return std::nullopt;
    nil *= Complex{1.0 / nn, 0.0};

    ComplexMatrix comp = -std::conj(y0) * b[0] + std::conj(x0) * b[1];
    const double cn = comp.frobenius_norm();
    if (cn == 0.0) return std::nullopt;

    double residual = (nil * nil).frobenius_norm();
    const Proportionality lhs = fit_proportional(comp * nil, nil, cn);
    const Proportionality rhs = fit_proportional(nil * comp, nil, cn);
    residual = std::max({residual, lhs.residual, rhs.residual});
    if (std::abs(rhs.coefficient) < kFitTol * cn) return std::nullopt;

    const Complex ratio = lhs.coefficient / rhs.coefficient;
    residual = std::max(residual, std::abs(std::abs(ratio) - 1.0));
    if (residual > kFitTol) return std::nullopt;
    return WMatch{-std::arg(ratio), residual};
}

// --- domain-wall matcher --------------------------------------------------

struct DwMatch {
    double alpha;
    double beta;
    double theta;
    double residual;
};

// Eigenvectors of a 2x2 matrix, both columns unit.
std::array<std::vector<Complex>, 2> eigvecs_2x2(const ComplexMatrix& m) {
    const Complex tr_half = 0.5 * (m(0, 0) + m(1, 1));
    const Complex disc = std::sqrt(tr_half * tr_half - det2(m));
    std::array<std::vector<Complex>, 2> out;
    int idx = 0;
    for (const Complex lambda : {tr_half + disc, tr_half - disc}) {
        // null vector of (m - lambda I), taking the better-conditioned row
        const Complex a = m(0, 0) - lambda, bb = m(0, 1);
        const Complex cc = m(1, 0), d = m(1, 1) - lambda;
        std::vector<Complex> v;
        if (std::abs(a) + std::abs(bb) >= std::abs(cc) + std::abs(d)) {
            v = {bb, -a};
        } else {
            v = {d, -cc};
        }
        double nv = norm(v);
        if (nv == 0.0) {
            v = {1.0, 0.0};
            nv = 1.0;
        }
        for (Complex& z : v) z /= nv;
        out[idx++] = std::move(v);
    }
    return out;
}

std::optional<DwMatch> try_dw_match(const std::vector<ComplexMatrix>& b) {
    const std::size_t supp = b.size();
    double tensor_scale = 0.0;
    for (const ComplexMatrix& t : b) tensor_scale = std::max(tensor_scale, t.frobenius_norm());
    if (tensor_scale == 0.0) return std::nullopt;

    // 1. common eigenvector of the family, from two generic fixed combinations
    const double phi_inv = 2.0 / (1.0 + std::sqrt(5.0));
    std::vector<Complex> best_v;
    double best_resid = 1e300;
    for (int attempt = 0; attempt < 2; ++attempt) {
        ComplexMatrix probe(2, 2);
        double coeff = 1.0;
        for (std::size_t q = 0; q < supp; ++q) {
            probe += Complex{coeff, attempt == 0 ? 0.0 : 0.31 * coeff} * b[q];
            coeff *= attempt == 0 ? phi_inv : 0.52;
        }
        for (const std::vector<Complex>& v : eigvecs_2x2(probe)) {
            double resid = 0.0;
            for (const ComplexMatrix& t : b) {
                const std::vector<Complex> tv = apply(t, v);
                const Complex mu = dot(v, tv);
                double r2 = 0.0;
                for (std::size_t i = 0; i < 2; ++i) r2 += std::norm(tv[i] - mu * v[i]);
                resid += std::sqrt(r2);
            }
            resid /= tensor_scale;
            if (resid < best_resid) {
                best_resid = resid;
                best_v = v;
            }
        }
    }
    if (best_resid > kFitTol) return std::nullopt;

    // 2. triangular gauge: common eigenvector as the second basis vector
    const std::vector<Complex>& v = best_v;
    ComplexMatrix t_basis(2, 2);
    t_basis.at(0, 0) = std::conj(v[1]);
    t_basis.at(1, 0) = -std::conj(v[0]);
    t_basis.at(0, 1) = v[0];
    t_basis.at(1, 1) = v[1];

    std::vector<ComplexMatrix> tri;
    std::vector<Complex> col_a(supp), col_c(supp), col_d(supp);
    double off = 0.0;
    for (std::size_t q = 0; q < supp; ++q) {
        tri.push_back(t_basis.adjoint() * b[q] * t_basis);
        off += std::abs(tri[q](0, 1));
        col_a[q] = tri[q](0, 0);
        col_c[q] = tri[q](1, 0);
        col_d[q] = tri[q](1, 1);
    }
    double residual = off / tensor_scale;

    const double na = norm(col_a);
    const double nd = norm(col_d);
    residual = std::max({residual, std::abs(na - 1.0), std::abs(nd - 1.0)});
    if (na == 0.0 || nd == 0.0) return std::nullopt;
    std::vector<Complex> ea = col_a, ed = col_d;
    for (Complex& z : ea) z /= na;
    for (Complex& z : ed) z /= nd;
    residual = std::max(residual, std::abs(dot(ea, ed)));

    const Complex p = dot(ea, col_c);
    const Complex r = dot(ed, col_c);
    std::vector<Complex> perp = col_c;
    for (std::size_t q = 0; q < supp; ++q) perp[q] -= p * ea[q] + r * ed[q];
    const double s = norm(perp);
    const double t = std::sqrt(std::norm(p) + std::norm(r) + s * s);
    if (t < 1e-9) return std::nullopt; // no coupling: family would be diagonalizable

    const double alpha = std::asin(std::clamp(s / t, 0.0, 1.0));
    const double beta = std::atan2(std::abs(r), std::abs(p));
    double theta = 0.0;
    if (std::abs(p) > 1e-9 * t && std::abs(r) > 1e-9 * t) {
        theta = 0.5 * (std::arg(p) - std::arg(r));
        // theta is defined modulo pi; report in (-pi/2, pi/2]
        while (theta > 0.5 * std::numbers::pi) theta -= std::numbers::pi;
        while (theta <= -0.5 * std::numbers::pi) theta += std::numbers::pi;
    }

    // 3. canonical direction products (gauge-invariant pattern validation)
    ComplexMatrix dir_a0(2, 2), dir_a2(2, 2), dir_a1(2, 2);
    for (std::size_t q = 0; q < supp; ++q) {
        dir_a0 += std::conj(col_d[q]) * tri[q];
        dir_a2 += std::conj(col_a[q]) * tri[q];
    }
    if (supp == 3) {
        // bilinear null combo of the a- and d-columns: the nilpotent direction
        const std::vector<Complex> z = {col_a[1] * col_d[2] - col_a[2] * col_d[1],
                                        col_a[2] * col_d[0] - col_a[0] * col_d[2],
                                        col_a[0] * col_d[1] - col_a[1] * col_d[0]};
        for (std::size_t q = 0; q < supp; ++q) dir_a1 += z[q] * tri[q];
    }
    const double n0 = dir_a0.frobenius_norm();
    const double n2 = dir_a2.frobenius_norm();
    const double n1 = dir_a1.frobenius_norm();
    if (n0 == 0.0 || n2 == 0.0) return std::nullopt;

    auto rel = [&](const ComplexMatrix& x, const ComplexMatrix& y) {
        return (x * y).frobenius_norm() / (x.frobenius_norm() * y.frobenius_norm());
    };
    residual = std::max(residual, rel(dir_a2, dir_a0)); // A2 A0 = 0
    if (n1 > kFitTol * tensor_scale * tensor_scale) {
        residual = std::max(residual, (dir_a1 * dir_a1).frobenius_norm() / (n1 * n1));
        residual = std::max(residual, fit_proportional(dir_a0 * dir_a1, dir_a1, n0 * n1).residual);
        residual = std::max(residual, fit_proportional(dir_a1 * dir_a2, dir_a1, n1 * n2).residual);
        residual = std::max(residual, fit_proportional(dir_a0 * dir_a2, dir_a1, n0 * n2).residual);
        residual = std::max(residual, rel(dir_a1, dir_a0)); // A1 A0 = 0
        residual = std::max(residual, rel(dir_a2, dir_a1)); // A2 A1 = 0
    } else {
        // support-2 wall: A0 A2 is nilpotent instead
        const ComplexMatrix prod = dir_a0 * dir_a2;
        const double np = prod.frobenius_norm();
        if (np > 0.0) {
            residual = std::max(residual, (prod * prod).frobenius_norm() / (np * np));
        }
    }
    if (residual > kFitTol) return std::nullopt;
    return DwMatch{alpha, beta, theta, residual};
}

// Does the two-dimensional span contain an entangled vector? Scanned on a
// 64-point grid per mixing angle and relative phase.
bool span_contains_entangled(const ComplexMatrix& b1, const ComplexMatrix& b2) {
    const std::size_t bond = b1.rows();
    double max_ratio = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double t = (k + 0.5) * std::numbers::pi / 128.0;
        for (int j = 0; j < 64; ++j) {
            const double phi = j * 2.0 * std::numbers::pi / 64.0;
            ComplexMatrix x(bond, bond);
            const Complex cb = std::polar(std::sin(t), phi);
            for (std::size_t i = 0; i < bond; ++i)
                for (std::size_t jj = 0; jj < bond; ++jj)
                    x.at(i, jj) = std::cos(t) * b1(i, jj) + cb * b2(i, jj);
            const SvdResult r = svd(x);
            if (r.singular_values[0] > 0.0) {
                max_ratio = std::max(max_ratio, r.singular_values[1] / r.singular_values[0]);
            }
        }
    }
    return max_ratio > 1e-3;
}

} // namespace

FixedPointReport classify(const TransferMatrix& e, double tol) {
    const std::size_t bond = e.bond_dim();
    if (bond == 0) {
        throw InvalidInput("classify: needs a D^2 x D^2 transfer matrix");
    }
    const double gtol = std::max(tol, 1e-6); // Jordan splitting is sqrt(backward error)
    const Spectrum& spec = e.spectrum(gtol);

    FixedPointReport rep;
    rep.jordan = {spec.groups.front().algebraic, spec.groups.front().geometric};
    for (const EigenGroup& g : spec.groups) {
        if (std::abs(std::abs(g.value) - 1.0) <= gtol) {
            rep.unit_degeneracy += static_cast<std::size_t>(g.algebraic);
            if (g.geometric < g.algebraic) rep.defective = true;
        }
    }
    if (std::abs(std::abs(spec.eigenvalues.front()) - 1.0) > 1e-3) {
        throw InvalidInput("classify: transfer matrix must be normalized to leading magnitude 1");
    }

    if (bond == 1) {
        rep.label = FixedPointClass::Product;
        rep.e_infinity_rank = 1;
        return rep;
    }

    if (!rep.defective) {
        FixedPointLimit lim;
        try {
            lim = fixed_point_operator(e, 64, 1e-10);
        } catch (const NonConvergentError&) {
            rep.label = FixedPointClass::PeriodicOrUnknown;
            rep.advisory = "no stationary power limit (non-trivial unimodular phases)";
            return rep;
        }
        if (lim.period == 2) {
            rep.label = FixedPointClass::PeriodicOrUnknown;
            rep.advisory = "period-2 power limit (eigenvalue -1): two ergodic components";
            return rep;
        }
        const ComplexMatrix& einf = lim.e_infinity;
        rep.e_infinity_rank =
            numeric_rank_abs(einf, 1e-8 * std::max(einf.frobenius_norm(), 1e-300));

        if (rep.e_infinity_rank == 1) {
            const SvdResult r = svd(einf);
            const ComplexMatrix xr = unvec_column(r.left_vectors, 0, bond);
            const ComplexMatrix xl = unvec_column(r.right_vectors, 0, bond);
            const std::size_t rank_r = numeric_rank(xr, 1e-8);
            const std::size_t rank_l = numeric_rank(xl, 1e-8);
            if (rank_r == 1 && rank_l == 1) {
                rep.label = FixedPointClass::Product;
            } else if (rank_r == bond && rank_l == bond) {
                const DominantPair pair = dominant_eigenvectors(e, tol);
                if (pair.canonical) {
                    rep.label = FixedPointClass::GenericDimer;
                    rep.schmidt_weights = pair.lambda;
                    SchmidtData sd;
                    sd.coefficients.reserve(pair.lambda.size());
                    sd.entropy_bits = 0.0;
                    for (double l : pair.lambda) {
                        sd.coefficients.push_back(std::sqrt(l));
                        if (l > 0.0) sd.entropy_bits -= l * std::log2(l);
                    }
                    rep.schmidt = std::move(sd);
                } else {
                    rep.label = FixedPointClass::PeriodicOrUnknown;
                    rep.advisory = "rank-1 limit without a canonical dominant pair";
                }
            } else {
                rep.label = FixedPointClass::PeriodicOrUnknown;
                rep.advisory = "rank-1 limit with partial Schmidt rank";
            }
        } else if (rep.e_infinity_rank == bond * bond) {
            rep.label = FixedPointClass::Product; // redundant bond carries no correlations
        } else if (rep.e_infinity_rank == 2 && bond == 2) {
            const SvdResult r = svd(einf);
            const ComplexMatrix b1 = unvec_column(r.left_vectors, 0, bond);
            const ComplexMatrix b2 = unvec_column(r.left_vectors, 1, bond);
            if (span_contains_entangled(b1, b2)) {
                rep.label = FixedPointClass::GHZ;
            } else {
                rep.label = FixedPointClass::Product;
                rep.advisory = "rank-2 limit inside the product variety";
            }
        } else {
            rep.label = FixedPointClass::PeriodicOrUnknown;
            rep.advisory = "power-limit rank outside the taxonomy";
        }
        return rep;
    }

    // Defective (Jordan) branch.
    rep.e_infinity_rank = 0;
    if (bond != 2) {
        rep.label = FixedPointClass::PeriodicOrUnknown;
        rep.advisory = "defective unit eigenvalue at D > 2: only the coarse ergodic/periodic "
                       "decomposition applies";
        return rep;
    }
    const TensorFamily fam = extract_tensors(e.matrix(), bond, 1e-8);
    if (fam.tensors.size() == 2) {
        if (const auto w = try_w_match(fam.tensors)) {
            rep.label = FixedPointClass::WFamily;
            rep.theta = w->theta;
            rep.fit_residual = w->residual;
            rep.advisory = "locally indistinguishable from the product class in the "
                           "thermodynamic limit";
            return rep;
        }
    }
    if (fam.tensors.size() == 2 || fam.tensors.size() == 3) {
        if (const auto dw = try_dw_match(fam.tensors)) {
            rep.label = FixedPointClass::DomainWallFamily;
            rep.alpha = dw->alpha;
            rep.beta = dw->beta;
            rep.theta = dw->theta;
            rep.fit_residual = dw->residual;
            rep.advisory = "locally indistinguishable from the GHZ class in the "
                           "thermodynamic limit";
            return rep;
        }
    }
    rep.label = FixedPointClass::PeriodicOrUnknown;
    rep.advisory = "defective spectrum without a recognized tensor pattern";
    return rep;
}

} // namespace mpsrg
