#pragma once

#include <string>

#include "mpsrg/mps.hpp"

namespace mpsrg {

/// MPS file schema: {"d": int, "D": int, "tensors": [p][row][col] = [re, im],
/// "boundary": optional [row][col] = [re, im]}.
/// Throws InvalidInput on malformed JSON or schema violations.
MatrixProductState mps_from_json(const std::string& text);

/// Read and parse an MPS file; throws InvalidInput when unreadable.
MatrixProductState mps_from_json_file(const std::string& path);

/// Serialize to the same schema (deterministic field order).
std::string mps_to_json(const MatrixProductState& mps);

} // namespace mpsrg
