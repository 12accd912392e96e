#include "mpsrg/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "mpsrg/decomp.hpp"
#include "mpsrg/errors.hpp"
#include "mpsrg/special.hpp"

namespace mpsrg {

namespace {

void expect_params(const std::string& name, const std::vector<double>& params,
                   std::size_t count) {
    if (params.size() != count) {
        throw InvalidInput("make_preset: '" + name + "' expects " + std::to_string(count) +
                           " parameter(s)");
    }
}

SchmidtSpectrum build_spectrum(double epsilon, SpectrumBranch branch, std::size_t j_max) {
    SchmidtSpectrum out;
    out.epsilon = epsilon;
    out.branch = branch;
    out.j_max = j_max;

    const double log_cutoff = std::log(1e-19);
    std::vector<double> weights{1.0};
    double z_exact = 1.0;
    double entropy_nats = 0.0;
    for (std::size_t j = 0; j <= j_max; ++j) {
        const double cost = (branch == SpectrumBranch::Disordered)
                                ? static_cast<double>(2 * j + 1)
                                : static_cast<double>(2 * j);
        const double log_x = -epsilon * cost;
        const double x = std::exp(log_x);
        z_exact *= 1.0 + x;
        if (x > 0.0) {
            const double p1 = x / (1.0 + x);
            entropy_nats += std::log(1.0 + x) - p1 * log_x;
        }
        if (log_x <= log_cutoff) continue; // mode contributes nothing above the floor
        const std::size_t base = weights.size();
        for (std::size_t i = 0; i < base; ++i) {
            const double w = weights[i] * x;
            if (w > 1e-19) weights.push_back(w);
        }
        if (weights.size() > (std::size_t{1} << 21)) {
            throw InvalidInput("dimer spectrum: pattern set too large for this epsilon "
                               "and j_max");
        }
    }
    std::sort(weights.begin(), weights.end(), std::greater<double>());
    for (double& w : weights) w /= z_exact;
    out.weights = std::move(weights);
    out.entropy_bits = entropy_nats / std::numbers::ln2;
    return out;
}

} // namespace

MatrixProductState make_preset(const std::string& name, const std::vector<double>& params) {
    if (name == "product") {
        expect_params(name, params, 0);
        return MatrixProductState({ComplexMatrix::from_rows({{1.0}}),
                                   ComplexMatrix::from_rows({{0.0}})});
    }
    if (name == "ghz") {
        expect_params(name, params, 0);
        return MatrixProductState({ComplexMatrix::from_rows({{1, 0}, {0, 0}}),
                                   ComplexMatrix::from_rows({{0, 0}, {0, 1}})});
    }
    if (name == "w") {
        expect_params(name, params, 1);
        const Complex ph = std::polar(1.0, -params[0]);
        return MatrixProductState({ComplexMatrix::from_rows({{1, 0}, {0, ph}}),
                                   ComplexMatrix::from_rows({{0, 0}, {1, 0}})});
    }
    if (name == "cluster") {
        expect_params(name, params, 0);
        const double r = 1.0 / std::sqrt(2.0);
        return MatrixProductState({ComplexMatrix::from_rows({{r, r}, {0, 0}}),
                                   ComplexMatrix::from_rows({{0, 0}, {r, -r}})});
    }
    if (name == "aklt") {
        expect_params(name, params, 0);
        return MatrixProductState(
            {ComplexMatrix::from_rows({{0, 1}, {1, 0}}),
             ComplexMatrix::from_rows({{0, Complex{0, -1}}, {Complex{0, 1}, 0}}),
             ComplexMatrix::from_rows({{1, 0}, {0, -1}})});
    }
    if (name == "domain_wall") {
        expect_params(name, params, 3);
        const double alpha = params[0];
        const double beta = params[1];
        const Complex eit = std::polar(1.0, params[2]);
        return MatrixProductState(
            {ComplexMatrix::from_rows({{0, 0}, {std::cos(alpha) * std::sin(beta), eit}}),
             ComplexMatrix::from_rows({{0, 0}, {std::sin(alpha), 0}}),
             ComplexMatrix::from_rows(
                 {{std::conj(eit), 0}, {std::cos(alpha) * std::cos(beta), 0}})});
    }
    throw InvalidInput("make_preset: unknown preset '" + name + "'");
}

SchmidtSpectrum ising_dimer_spectrum(double field, std::size_t j_max) {
    if (!(field > 0.0)) throw InvalidInput("ising_dimer_spectrum: field must be positive");
    if (std::abs(field - 1.0) < 1e-12) {
        throw InvalidInput("ising_dimer_spectrum: field = 1 is the critical point");
    }
    if (j_max < 1) throw InvalidInput("ising_dimer_spectrum: j_max must be >= 1");
    const double mu = std::min(field, 1.0 / field);
    const double mu_comp = std::sqrt((1.0 - mu) * (1.0 + mu));
    const double epsilon = std::numbers::pi * elliptic_k(mu_comp) / elliptic_k(mu);
    const SpectrumBranch branch =
        field < 1.0 ? SpectrumBranch::Disordered : SpectrumBranch::Ordered;
    return build_spectrum(epsilon, branch, j_max);
}

SchmidtSpectrum xxz_dimer_spectrum(double delta, std::size_t j_max) {
    if (!(delta > 1.0)) {
        throw InvalidInput("xxz_dimer_spectrum: delta must exceed 1 (delta = 1 is critical)");
    }
    if (j_max < 1) throw InvalidInput("xxz_dimer_spectrum: j_max must be >= 1");
    return build_spectrum(std::acosh(delta), SpectrumBranch::Ordered, j_max);
}

namespace {

// H v for H = -field sum sx sx - sum sz; site i lives on bit (n-1-i).
void apply_hamiltonian(double field, std::size_t n, const std::vector<double>& diag,
                       const std::vector<double>& v, std::vector<double>& out) {
    const std::size_t dim = v.size();
    for (std::size_t s = 0; s < dim; ++s) out[s] = diag[s] * v[s];
    if (field == 0.0) return;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t mask = (std::size_t{1} << (n - 1 - i)) | (std::size_t{1} << (n - 2 - i));
        for (std::size_t s = 0; s < dim; ++s) {
            out[s ^ mask] -= field * v[s];
        }
    }
}

double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

PureStateVector ising_ground_state_ed(double field, std::size_t n_sites) {
    if (n_sites < 2 || n_sites > 16) {
        throw InvalidInput("ising_ground_state_ed: n_sites must lie in [2, 16]");
    }
    const std::size_t dim = std::size_t{1} << n_sites;

    std::vector<double> diag(dim);
    for (std::size_t s = 0; s < dim; ++s) {
        const int ones = std::popcount(s);
        diag[s] = -(static_cast<double>(n_sites) - 2.0 * ones); // -sum z_i
    }

    const std::size_t max_krylov = std::min<std::size_t>(80, dim);
    std::vector<double> v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    std::vector<double> w(dim), ritz(dim);
    double energy = 0.0;

    for (int restart = 0; restart < 60; ++restart) {
        std::vector<std::vector<double>> basis;
        std::vector<double> alpha, beta;
        basis.push_back(v);
        for (std::size_t j = 0; j < max_krylov; ++j) {
            apply_hamiltonian(field, n_sites, diag, basis[j], w);
            alpha.push_back(vec_dot(w, basis[j]));
            // full reorthogonalization, two passes
            for (int pass = 0; pass < 2; ++pass) {
                for (const std::vector<double>& q : basis) {
                    const double ov = vec_dot(w, q);
                    for (std::size_t i = 0; i < dim; ++i) w[i] -= ov * q[i];
                }
            }
            const double b = std::sqrt(vec_dot(w, w));
            if (b < 1e-13 || j + 1 == max_krylov) break;
            beta.push_back(b);
            std::vector<double> q(dim);
            for (std::size_t i = 0; i < dim; ++i) q[i] = w[i] / b;
            basis.push_back(std::move(q));
        }

        const std::size_t k = basis.size();
        ComplexMatrix tri(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            tri.at(i, i) = alpha[i];
            if (i + 1 < k) {
                tri.at(i, i + 1) = beta[i];
                tri.at(i + 1, i) = beta[i];
            }
        }
        const Spectrum spec = eig_general(tri);
        std::size_t ground = 0;
        for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i) {
            if (spec.eigenvalues[i].real() < spec.eigenvalues[ground].real()) ground = i;
        }
        energy = spec.eigenvalues[ground].real();

        std::fill(ritz.begin(), ritz.end(), 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            const double y = spec.right_vectors(j, ground).real();
            for (std::size_t i = 0; i < dim; ++i) ritz[i] += y * basis[j][i];
        }
        const double rn = std::sqrt(vec_dot(ritz, ritz));
        for (std::size_t i = 0; i < dim; ++i) ritz[i] /= rn;

        apply_hamiltonian(field, n_sites, diag, ritz, w);
        double resid = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double r = w[i] - energy * ritz[i];
            resid += r * r;
        }
        if (std::sqrt(resid) < 1e-10) {
            PureStateVector psi;
            psi.sites = n_sites;
            psi.local_dim = 2;
            psi.amplitudes.resize(dim);
            for (std::size_t i = 0; i < dim; ++i) psi.amplitudes[i] = Complex{ritz[i], 0.0};
            psi.normalized = true;
            return psi;
        }
        v = ritz;
    }
    throw NumericalError("ising_ground_state_ed: Lanczos did not reach the residual target");
}

SchmidtData half_chain_spectrum(const PureStateVector& state) {
    if (state.sites % 2 != 0) {
        throw InvalidInput("half_chain_spectrum: chain length must be even");
    }
    return schmidt_decompose(state, state.sites / 2);
}

} // namespace mpsrg
