#pragma once

#include <string>
#include <vector>

#include "mpsrg/mps.hpp"

namespace mpsrg {

enum class SpectrumBranch { Disordered, Ordered };

/// Half-chain entanglement spectrum of a non-critical chain: weights
/// proportional to exp(-epsilon * cost(n)) over occupation patterns
/// n_j in {0,1}, j = 0..j_max, with cost sum (2j+1) n_j on the disordered
/// branch and sum 2j n_j on the ordered branch (whose leading weight is
/// exactly doubly degenerate). Weights are normalized over the truncated
/// pattern set; entries below 1e-19 of the leading weight are not stored.
struct SchmidtSpectrum {
    double epsilon = 0.0;
    SpectrumBranch branch = SpectrumBranch::Disordered;
    std::size_t j_max = 0;
    std::vector<double> weights; // normalized, descending
    double entropy_bits = 0.0;   // exact mode-wise value for the truncated set
};

/// Canonical states: "product", "ghz", "w" (theta), "cluster", "aklt",
/// "domain_wall" (alpha, beta, theta). Cluster tensors carry the 1/sqrt(2)
/// that makes the transfer matrix come out in its standard closed form; the
/// AKLT preset is the raw Pauli construction (transfer eigenvalues
/// {3,-1,-1,-1}), normalize_leading supplies the 1/sqrt(3).
MatrixProductState make_preset(const std::string& name, const std::vector<double>& params = {});

/// Transverse-field Ising chain spectrum; epsilon = pi K(sqrt(1-mu^2))/K(mu)
/// with mu = min(field, 1/field). field = 1 (critical) is rejected.
SchmidtSpectrum ising_dimer_spectrum(double field, std::size_t j_max = 20);

/// XXZ chain for delta > 1: ordered branch with epsilon = arccosh(delta).
SchmidtSpectrum xxz_dimer_spectrum(double delta, std::size_t j_max = 20);

/// Ground state of H = -field * sum sx_i sx_{i+1} - sum sz_i on an open
/// chain of n_sites <= 16, by restarted Lanczos iteration with an all-equal
/// deterministic start vector; converged when ||Hv - E0 v|| < 1e-10.
PureStateVector ising_ground_state_ed(double field, std::size_t n_sites);

/// Schmidt data across the middle cut; the chain length must be even.
SchmidtData half_chain_spectrum(const PureStateVector& state);

} // namespace mpsrg
