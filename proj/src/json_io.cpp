#include "mpsrg/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mpsrg/errors.hpp"

namespace mpsrg {

namespace {

using nlohmann::ordered_json;

Complex parse_complex(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InvalidInput("mps json: complex entries must be [re, im] number pairs");
    }
    return Complex{j[0].get<double>(), j[1].get<double>()};
}

ComplexMatrix parse_matrix(const nlohmann::json& j, std::size_t bond, const char* what) {
    if (!j.is_array() || j.size() != bond) {
        throw InvalidInput(std::string("mps json: ") + what + " must be a DxD matrix");
    }
    std::vector<Complex> entries;
    entries.reserve(bond * bond);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != bond) {
            throw InvalidInput(std::string("mps json: ") + what + " must be a DxD matrix");
        }
        for (const auto& cell : row) entries.push_back(parse_complex(cell));
    }
    return ComplexMatrix(bond, bond, std::move(entries));
}

ordered_json dump_matrix(const ComplexMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

MatrixProductState mps_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw InvalidInput(std::string("mps json: parse error: ") + err.what());
    }
    if (!j.is_object() || !j.contains("d") || !j.contains("D") || !j.contains("tensors")) {
        throw InvalidInput("mps json: expected an object with d, D and tensors");
    }
    if (!j["d"].is_number_unsigned() || !j["D"].is_number_unsigned()) {
        throw InvalidInput("mps json: d and D must be positive integers");
    }
    const std::size_t d = j["d"].get<std::size_t>();
    const std::size_t bond = j["D"].get<std::size_t>();
    if (d == 0 || bond == 0) throw InvalidInput("mps json: d and D must be positive");
    if (!j["tensors"].is_array() || j["tensors"].size() != d) {
        throw InvalidInput("mps json: tensors must hold exactly d matrices");
    }
    std::vector<ComplexMatrix> tensors;
    tensors.reserve(d);
    for (const auto& t : j["tensors"]) tensors.push_back(parse_matrix(t, bond, "tensor"));

    try {
        if (j.contains("boundary")) {
            return MatrixProductState(std::move(tensors),
                                      parse_matrix(j["boundary"], bond, "boundary"));
        }
        return MatrixProductState(std::move(tensors));
    } catch (const InvalidInput&) {
        throw;
    }
}

MatrixProductState mps_from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open MPS file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return mps_from_json(buf.str());
}

std::string mps_to_json(const MatrixProductState& mps) {
    ordered_json j;
    j["d"] = mps.phys_dim;
    j["D"] = mps.bond_dim;
    ordered_json tensors = ordered_json::array();
    for (const ComplexMatrix& t : mps.tensors) tensors.push_back(dump_matrix(t));
    j["tensors"] = std::move(tensors);
    j["boundary"] = dump_matrix(mps.boundary);
    return j.dump(2);
}

} // namespace mpsrg
