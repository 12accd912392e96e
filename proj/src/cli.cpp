#include "mpsrg/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpsrg/classify.hpp"
#include "mpsrg/errors.hpp"
#include "mpsrg/json_io.hpp"
#include "mpsrg/models.hpp"
#include "mpsrg/mps.hpp"
#include "mpsrg/rg.hpp"

namespace mpsrg {

namespace {

using nlohmann::ordered_json;

constexpr const char* kArtifactVersion = "mpsrg 1.0.0";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Wall-clock duration plus the reproducible invocation facts.
class Manifest {
  public:
    Manifest(std::string command) : command_(std::move(command)), start_(clock::now()) {}

    void parameter(const std::string& key, const ordered_json& value) { params_[key] = value; }
    void input_digest(const std::string& data) { digest_ = hex64(fnv1a(data)); }

    ordered_json finish() const {
        ordered_json j;
        j["command"] = command_;
        j["parameters"] = params_;
        j["input_digest"] = digest_;
        j["artifact_version"] = kArtifactVersion;
        j["duration_ms"] =
            std::chrono::duration<double, std::milli>(clock::now() - start_).count();
        return j;
    }

    void write_sidecar(const std::string& out_path) const {
        if (out_path.empty() || out_path == "-") return;
        std::ofstream out(out_path + ".manifest.json", std::ios::binary);
        out << finish().dump(2) << "\n";
    }

  private:
    using clock = std::chrono::steady_clock;
    std::string command_;
    ordered_json params_ = ordered_json::object();
    std::string digest_ = hex64(fnv1a(""));
    clock::time_point start_;
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open output file: " + path);
    out << text;
}

// --- input state selection ------------------------------------------------

struct StateSource {
    std::string preset;
    std::vector<double> params;
    std::string in_file;
    std::string random_dims; // "d,D"
    std::uint64_t seed = 0;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--preset", preset,
                        "preset name: product | ghz | w | cluster | aklt | domain_wall");
        cmd->add_option("--params", params,
                        "preset parameters (w: theta; domain_wall: alpha beta theta)");
        cmd->add_option("--in", in_file, "MPS JSON file (schema in the README)");
        cmd->add_option("--random", random_dims,
                        "random test state with dimensions d,D (e.g. --random 2,3)");
        cmd->add_option("--seed", seed, "seed for --random test-state generation");
    }

    MatrixProductState load(Manifest& manifest) const {
        int given = (!preset.empty()) + (!in_file.empty()) + (!random_dims.empty());
        if (given != 1) {
            throw InvalidInput("choose exactly one of --preset, --in, --random");
        }
        if (!preset.empty()) {
            std::string key = preset;
            for (double p : params) key += ";" + fmt_double(p);
            manifest.input_digest(key);
            manifest.parameter("preset", preset);
            manifest.parameter("params", params);
            return make_preset(preset, params);
        }
        if (!in_file.empty()) {
            std::ifstream in(in_file, std::ios::binary);
            if (!in) throw InvalidInput("cannot open MPS file: " + in_file);
            std::ostringstream buf;
            buf << in.rdbuf();
            manifest.input_digest(buf.str());
            manifest.parameter("in", in_file);
            return mps_from_json(buf.str());
        }
        std::size_t d = 0, bond = 0;
        if (std::sscanf(random_dims.c_str(), "%zu,%zu", &d, &bond) != 2 || d == 0 || bond == 0) {
            throw InvalidInput("--random expects d,D with positive integers");
        }
        manifest.parameter("random", random_dims);
        manifest.parameter("seed", seed);
        manifest.input_digest("random;" + random_dims + ";" + std::to_string(seed));
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<ComplexMatrix> tensors;
        for (std::size_t p = 0; p < d; ++p) {
            ComplexMatrix t(bond, bond);
            for (std::size_t i = 0; i < bond; ++i)
                for (std::size_t j = 0; j < bond; ++j) t.at(i, j) = Complex{u(rng), u(rng)};
            tensors.push_back(std::move(t));
        }
        return MatrixProductState(std::move(tensors));
    }
};

std::string basis_string(std::size_t index, std::size_t local_dim, std::size_t sites) {
    std::string s(sites, '0');
    for (std::size_t k = sites; k-- > 0;) {
        s[k] = static_cast<char>('0' + index % local_dim);
        index /= local_dim;
    }
    return s;
}

ComplexMatrix named_operator(const std::string& name, std::size_t local_dim) {
    if (name == "sx" || name == "sy" || name == "sz") {
        if (local_dim != 2) {
            throw InvalidInput("operator '" + name + "' needs local dimension 2; use diag:...");
        }
        if (name == "sx") return ComplexMatrix::from_rows({{0, 1}, {1, 0}});
        if (name == "sy")
            return ComplexMatrix::from_rows({{0, Complex{0, -1}}, {Complex{0, 1}, 0}});
        return ComplexMatrix::from_rows({{1, 0}, {0, -1}});
    }
    if (name.rfind("diag:", 0) == 0) {
        std::vector<double> vals;
        std::stringstream ss(name.substr(5));
        std::string item;
        while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
        if (vals.size() != local_dim) {
            throw InvalidInput("diag: operator needs exactly d entries");
        }
        ComplexMatrix m(local_dim, local_dim);
        for (std::size_t i = 0; i < local_dim; ++i) m.at(i, i) = vals[i];
        return m;
    }
    throw InvalidInput("unknown operator '" + name + "' (use sx, sy, sz or diag:v1,v2,...)");
}

// --- subcommand payloads ----------------------------------------------------

int cmd_state(const StateSource& src, std::size_t sites, bool summary,
              const std::string& out) {
    Manifest manifest("state");
    const MatrixProductState mps = src.load(manifest);
    manifest.parameter("m", sites);
    manifest.parameter("summary", summary);
    const PureStateVector psi = state_vector(mps, sites);

    if (summary) {
        ordered_json j;
        j["sites"] = psi.sites;
        j["local_dim"] = psi.local_dim;
        j["dim"] = psi.amplitudes.size();
        ordered_json ent = ordered_json::array();
        for (std::size_t len = 1; len < sites; ++len) ent.push_back(block_entropy(psi, len));
        j["block_entropy_bits"] = std::move(ent);
        write_text(out, j.dump(2) + "\n");
    } else {
        std::string csv = "index,basis,re,im\n";
        for (std::size_t i = 0; i < psi.amplitudes.size(); ++i) {
            csv += std::to_string(i) + "," + basis_string(i, psi.local_dim, sites) + "," +
                   fmt_double(psi.amplitudes[i].real()) + "," +
                   fmt_double(psi.amplitudes[i].imag()) + "\n";
        }
        write_text(out, csv);
    }
    manifest.write_sidecar(out);
    return 0;
}

std::string flow_trace_csv(const FlowTrace& trace) {
    std::string csv = "step,d_eff,abs_lambda_1,abs_lambda_2,abs_lambda_3,abs_lambda_4,"
                      "entropy_bits,residual,xi\n";
    for (const FlowRecord& r : trace.records) {
        csv += std::to_string(r.step) + "," + std::to_string(r.d_eff);
        for (const Complex& ev : r.top_eigenvalues) csv += "," + fmt_double(std::abs(ev));
        csv += "," + fmt_double(r.entropy_bits) + "," + fmt_double(r.residual) + "," +
               fmt_double(r.correlation_length) + "\n";
    }
    return csv;
}

ordered_json flow_summary(const FlowTrace& trace) {
    ordered_json j;
    j["steps"] = trace.records.size();
    j["converged"] = trace.converged;
    j["periodic"] = trace.periodic;
    if (!trace.records.empty()) {
        const FlowRecord& last = trace.records.back();
        ordered_json fin;
        fin["d_eff"] = last.d_eff;
        ordered_json evs = ordered_json::array();
        for (const Complex& ev : last.top_eigenvalues) evs.push_back(std::abs(ev));
        fin["abs_eigenvalues"] = std::move(evs);
        fin["entropy_bits"] = last.entropy_bits;
        fin["residual"] = last.residual;
        fin["xi"] = last.correlation_length;
        j["final"] = std::move(fin);
    }
    return j;
}

int cmd_flow(const StateSource& src, std::size_t steps, double tol, double drop_tol,
             std::size_t entropy_sites, const std::string& out,
             std::string summary_out) {
    Manifest manifest("flow");
    const MatrixProductState mps = src.load(manifest);
    manifest.parameter("steps", steps);
    manifest.parameter("tol", tol);
    manifest.parameter("drop_tol", drop_tol);
    manifest.parameter("entropy_sites", entropy_sites);

    FlowOptions opts;
    opts.drop_tol_rel = drop_tol;
    opts.entropy_sites = entropy_sites;
    const FlowTrace trace = flow(mps, steps, tol, opts);

    write_text(out, flow_trace_csv(trace));
    manifest.write_sidecar(out);
    if (summary_out.empty() && !out.empty() && out != "-") summary_out = out + ".summary.json";
    if (!summary_out.empty()) {
        write_text(summary_out, flow_summary(trace).dump(2) + "\n");
    }
    return trace.periodic ? 3 : 0;
}

ordered_json report_to_json(const FixedPointReport& rep) {
    ordered_json j;
    j["label"] = to_string(rep.label);
    if (!rep.schmidt_weights.empty()) {
        j["schmidt_lambda"] = rep.schmidt_weights;
        j["pair_entropy_bits"] = rep.schmidt ? rep.schmidt->entropy_bits : 0.0;
    }
    if (rep.theta) j["theta"] = *rep.theta;
    if (rep.alpha) j["alpha"] = *rep.alpha;
    if (rep.beta) j["beta"] = *rep.beta;
    j["e_infinity_rank"] = rep.e_infinity_rank;
    j["jordan"] = {{"algebraic", rep.jordan.algebraic}, {"geometric", rep.jordan.geometric}};
    j["defective"] = rep.defective;
    j["unit_degeneracy"] = rep.unit_degeneracy;
    j["fit_residual"] = rep.fit_residual;
    j["advisory"] = rep.advisory;
    return j;
}

int cmd_classify(const StateSource& src, std::size_t steps, double tol,
                 const std::string& out) {
    Manifest manifest("classify");
    const MatrixProductState mps = src.load(manifest);
    manifest.parameter("steps", steps);
    manifest.parameter("tol", tol);

    const FlowTrace trace = flow(mps, steps, 1e-10);
    const MatrixProductState& fixed = trace.final_state ? *trace.final_state : mps;
    const FixedPointReport rep = classify(transfer_matrix(fixed), tol);

    ordered_json j = report_to_json(rep);
    j["flow_steps"] = trace.records.size();
    j["flow_converged"] = trace.converged;
    write_text(out, j.dump(2) + "\n");
    manifest.write_sidecar(out);
    return rep.label == FixedPointClass::PeriodicOrUnknown ? 3 : 0;
}

int cmd_observe(const StateSource& src, std::size_t sites, const std::string& op_name,
                long site, const std::string& op_b_name, long site_b, long block_len,
                const std::string& out) {
    Manifest manifest("observe");
    const MatrixProductState mps = src.load(manifest);
    manifest.parameter("m", sites);
    const PureStateVector psi = state_vector(mps, sites);

    ordered_json j;
    j["sites"] = sites;
    if (!op_name.empty()) {
        manifest.parameter("op", op_name);
        const ComplexMatrix op = named_operator(op_name, psi.local_dim);
        if (site < 0) throw InvalidInput("--site is required with --op");
        manifest.parameter("site", site);
        if (!op_b_name.empty() || site_b >= 0) {
            if (op_b_name.empty() || site_b < 0) {
                throw InvalidInput("correlator needs both --op-b and --site-b");
            }
            manifest.parameter("op_b", op_b_name);
            manifest.parameter("site_b", site_b);
            const ComplexMatrix op_b = named_operator(op_b_name, psi.local_dim);
            const Complex c = connected_correlator(psi, op, static_cast<std::size_t>(site),
                                                   op_b, static_cast<std::size_t>(site_b));
            j["connected_correlator"] = {{"re", c.real()}, {"im", c.imag()}};
        } else {
            const Complex v = expectation_local(psi, op, static_cast<std::size_t>(site));
            j["expectation"] = {{"re", v.real()}, {"im", v.imag()}};
        }
    }
    if (block_len > 0) {
        manifest.parameter("block", block_len);
        j["block_entropy_bits"] = block_entropy(psi, static_cast<std::size_t>(block_len));
    }
    if (!j.contains("expectation") && !j.contains("connected_correlator") &&
        !j.contains("block_entropy_bits")) {
        throw InvalidInput("observe: request --op/--site and/or --block");
    }
    write_text(out, j.dump(2) + "\n");
    manifest.write_sidecar(out);
    return 0;
}

int cmd_spectrum(const std::string& model, double coupling, std::size_t j_max,
                 const std::string& sweep, const std::string& out) {
    Manifest manifest("spectrum");
    manifest.parameter("model", model);
    manifest.parameter("jmax", j_max);
    manifest.input_digest(model + ";" + fmt_double(coupling) + ";" + sweep);

    auto compute = [&](double value) {
        return model == "ising" ? ising_dimer_spectrum(value, j_max)
                                : xxz_dimer_spectrum(value, j_max);
    };
    if (model != "ising" && model != "xxz") {
        throw InvalidInput("spectrum: --model must be ising or xxz");
    }

    std::string csv;
    if (!sweep.empty()) {
        double lo = 0.0, hi = 0.0;
        std::size_t count = 0;
        if (std::sscanf(sweep.c_str(), "%lf:%lf:%zu", &lo, &hi, &count) != 3 || count < 2) {
            throw InvalidInput("--sweep expects start:stop:count with count >= 2");
        }
        manifest.parameter("sweep", sweep);
        csv = "param,epsilon,entropy_bits,leading_weight\n";
        for (std::size_t i = 0; i < count; ++i) {
            const double v = lo + (hi - lo) * static_cast<double>(i) /
                                      static_cast<double>(count - 1);
            const SchmidtSpectrum s = compute(v);
            csv += fmt_double(v) + "," + fmt_double(s.epsilon) + "," +
                   fmt_double(s.entropy_bits) + "," + fmt_double(s.weights.front()) + "\n";
        }
    } else {
        manifest.parameter("coupling", coupling);
        const SchmidtSpectrum s = compute(coupling);
        csv = "index,weight\n";
        for (std::size_t i = 0; i < s.weights.size(); ++i) {
            csv += std::to_string(i) + "," + fmt_double(s.weights[i]) + "\n";
        }
    }
    write_text(out, csv);
    manifest.write_sidecar(out);
    return 0;
}

int cmd_ed_crosscheck(double coupling, std::size_t sites, std::size_t j_max,
                      const std::string& out) {
    Manifest manifest("ed-crosscheck");
    manifest.parameter("lambda", coupling);
    manifest.parameter("sites", sites);
    manifest.parameter("jmax", j_max);
    manifest.input_digest("ed;" + fmt_double(coupling) + ";" + std::to_string(sites));

    const PureStateVector psi = ising_ground_state_ed(coupling, sites);
    const SchmidtData sd = half_chain_spectrum(psi);
    if (sd.coefficients.size() < 2) {
        throw NumericalError("ed-crosscheck: fewer than two Schmidt coefficients");
    }
    const double measured = (sd.coefficients[1] * sd.coefficients[1]) /
                            (sd.coefficients[0] * sd.coefficients[0]);
    const double predicted = std::exp(-ising_dimer_spectrum(coupling, j_max).epsilon);
    const double rel_err = std::abs(measured - predicted) / predicted;

    ordered_json j;
    j["lambda"] = coupling;
    j["sites"] = sites;
    j["epsilon"] = ising_dimer_spectrum(coupling, j_max).epsilon;
    j["predicted_ratio"] = predicted;
    j["measured_ratio"] = measured;
    j["relative_error"] = rel_err;
    j["within_10_percent"] = rel_err <= 0.1;
    j["half_chain_entropy_bits"] = sd.entropy_bits;
    write_text(out, j.dump(2) + "\n");
    manifest.write_sidecar(out);
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"mpsrg: exact renormalization-group flows on translationally invariant "
                 "matrix product states"};
    app.require_subcommand(1);

    // state
    auto* state_cmd = app.add_subcommand(
        "state", "Materialize a state on m sites; writes an amplitude CSV "
                 "(columns: index = basis rank, basis = site digits, re, im) or a JSON summary");
    StateSource state_src;
    state_src.add_options(state_cmd);
    std::size_t state_m = 6;
    bool state_summary = false;
    std::string state_out = "-";
    state_cmd->add_option("--m", state_m, "number of sites");
    state_cmd->add_flag("--summary", state_summary, "write a JSON summary instead of amplitudes");
    state_cmd->add_option("--out", state_out, "output path ('-' for stdout)");

    // flow
    auto* flow_cmd = app.add_subcommand(
        "flow", "Run the coarse-graining flow; writes a CSV trace (columns: step = RG step, "
                "d_eff = coarse physical dimension, abs_lambda_1..4 = leading transfer "
                "eigenvalue magnitudes, entropy_bits = one-coarse-site entropy, residual = "
                "||E_{n+1}-E_n||_F, xi = correlation length) plus a JSON summary");
    StateSource flow_src;
    flow_src.add_options(flow_cmd);
    std::size_t flow_steps = 8;
    double flow_tol = 1e-10;
    double flow_drop = 1e-12;
    std::size_t flow_entropy_sites = 6;
    std::string flow_out = "-";
    std::string flow_summary_out;
    flow_cmd->add_option("--steps", flow_steps, "maximum coarse-graining steps");
    flow_cmd->add_option("--tol", flow_tol, "convergence tolerance on the transfer residual");
    flow_cmd->add_option("--drop-tol", flow_drop,
                         "relative singular-value drop tolerance (numerical zero)");
    flow_cmd->add_option("--entropy-sites", flow_entropy_sites,
                         "coarse chain length for the entropy column");
    flow_cmd->add_option("--out", flow_out, "trace CSV path ('-' for stdout)");
    flow_cmd->add_option("--summary-out", flow_summary_out,
                         "summary JSON path (default: <out>.summary.json)");

    // classify
    auto* cls_cmd = app.add_subcommand(
        "classify", "Flow to convergence, then classify the fixed point (JSON report)");
    StateSource cls_src;
    cls_src.add_options(cls_cmd);
    std::size_t cls_steps = 24;
    double cls_tol = 1e-8;
    std::string cls_out = "-";
    cls_cmd->add_option("--steps", cls_steps, "maximum flow steps before classification");
    cls_cmd->add_option("--tol", cls_tol, "classification tolerance");
    cls_cmd->add_option("--out", cls_out, "report JSON path ('-' for stdout)");

    // observe
    auto* obs_cmd = app.add_subcommand(
        "observe", "Expectation, connected correlator or block entropy on a realized state");
    StateSource obs_src;
    obs_src.add_options(obs_cmd);
    std::size_t obs_m = 8;
    std::string obs_op, obs_op_b;
    long obs_site = -1, obs_site_b = -1, obs_block = -1;
    std::string obs_out = "-";
    obs_cmd->add_option("--m", obs_m, "number of sites");
    obs_cmd->add_option("--op", obs_op, "operator: sx | sy | sz | diag:v1,v2,...");
    obs_cmd->add_option("--site", obs_site, "site for --op");
    obs_cmd->add_option("--op-b", obs_op_b, "second operator (connected correlator)");
    obs_cmd->add_option("--site-b", obs_site_b, "site for --op-b");
    obs_cmd->add_option("--block", obs_block, "block length for the entropy");
    obs_cmd->add_option("--out", obs_out, "output JSON path ('-' for stdout)");

    // spectrum
    auto* spec_cmd = app.add_subcommand(
        "spectrum", "Ising/XXZ dimer Schmidt spectrum as CSV (columns: index = weight rank, "
                    "weight = normalized probability; sweep mode: param = coupling, epsilon, "
                    "entropy_bits, leading_weight)");
    std::string spec_model = "ising";
    double spec_coupling = 0.5;
    std::size_t spec_jmax = 20;
    std::string spec_sweep;
    std::string spec_out = "-";
    spec_cmd->add_option("--model", spec_model, "ising | xxz");
    spec_cmd->add_option("--lambda,--delta,--coupling", spec_coupling,
                         "transverse field (ising) or anisotropy (xxz)");
    spec_cmd->add_option("--jmax", spec_jmax, "mode truncation level");
    spec_cmd->add_option("--sweep", spec_sweep, "coupling sweep start:stop:count");
    spec_cmd->add_option("--out", spec_out, "output CSV path ('-' for stdout)");

    // ed-crosscheck
    auto* ed_cmd = app.add_subcommand(
        "ed-crosscheck", "Exact-diagonalization oracle vs the dimer spectrum (JSON comparison)");
    double ed_lambda = 0.25;
    std::size_t ed_sites = 16;
    std::size_t ed_jmax = 20;
    std::string ed_out = "-";
    ed_cmd->add_option("--lambda", ed_lambda, "transverse-field coupling");
    ed_cmd->add_option("--sites", ed_sites, "chain length (even, <= 16)");
    ed_cmd->add_option("--jmax", ed_jmax, "dimer spectrum truncation");
    ed_cmd->add_option("--out", ed_out, "output JSON path ('-' for stdout)");

    std::vector<const char*> argv;
    argv.push_back("mpsrg");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (state_cmd->parsed()) return cmd_state(state_src, state_m, state_summary, state_out);
        if (flow_cmd->parsed()) {
            return cmd_flow(flow_src, flow_steps, flow_tol, flow_drop, flow_entropy_sites,
                            flow_out, flow_summary_out);
        }
        if (cls_cmd->parsed()) return cmd_classify(cls_src, cls_steps, cls_tol, cls_out);
        if (obs_cmd->parsed()) {
            return cmd_observe(obs_src, obs_m, obs_op, obs_site, obs_op_b, obs_site_b,
                               obs_block, obs_out);
        }
        if (spec_cmd->parsed()) {
            return cmd_spectrum(spec_model, spec_coupling, spec_jmax, spec_sweep, spec_out);
        }
        if (ed_cmd->parsed()) return cmd_ed_crosscheck(ed_lambda, ed_sites, ed_jmax, ed_out);
        std::cerr << "mpsrg: no subcommand selected\n";
        return 2;
    } catch (const InvalidInput& e) {
        std::cerr << "mpsrg: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergentError& e) {
        std::cerr << "mpsrg: non-convergent: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "mpsrg: numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "mpsrg: error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace mpsrg
