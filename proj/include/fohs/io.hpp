#pragma once

#include "fohs/simulate.hpp"
#include "fohs/stability.hpp"
#include "fohs/systems.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

namespace fohs::io {

/// Malformed or out-of-contract input file.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using SystemDescription = std::variant<SwitchingSystem, ResetClosedLoop, PseudoPolynomial>;

/// Loads one of the three JSON system descriptions, keyed by "kind".
/// Unknown fields are rejected; matrices are row-major arrays of arrays.
SystemDescription load_system(const std::filesystem::path& path);

SwitchingSystem switching_from_json(const nlohmann::json& j);
ResetClosedLoop reset_from_json(const nlohmann::json& j);
PseudoPolynomial pseudo_poly_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RealMatrix& m);
nlohmann::json to_json(const FractionalLTI& sys);
nlohmann::json to_json(const RationalTF& tf);

/// Writes content to path atomically (temp file + rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Fixed formatting used by every CSV artifact: 12 significant digits.
std::string format_number(double v);

std::string sweep_csv(const PhaseSweepReport& report);
std::string hbeta_csv(const SprResult& result);
std::string trajectory_csv(const Trajectory& traj);
std::string events_csv(const Trajectory& traj);

/// FNV-1a content hash used for input digests in run reports.
std::uint64_t fnv1a(const std::string& data);
std::string digest_hex(const std::string& data);

}  // namespace fohs::io
