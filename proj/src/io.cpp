#include "fohs/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace fohs::io {

namespace {

void check_fields(const nlohmann::json& j, const std::vector<std::string>& allowed,
                  const char* kind) {
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ParseError(std::string(kind) + ": unknown field '" + item.key() + "'");
    }
  }
  for (const auto& field : allowed) {
    if (!j.contains(field)) {
      throw ParseError(std::string(kind) + ": missing field '" + field + "'");
    }
  }
}

RealMatrix matrix_from_json(const nlohmann::json& j, const char* name) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ParseError(std::string(name) + ": expected a non-empty array of arrays");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  RealMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (!row.is_array() || row.size() != cols) {
      throw ParseError(std::string(name) + ": ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row.at(c).is_number()) {
        throw ParseError(std::string(name) + ": non-numeric entry");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row.at(c).get<double>();
    }
  }
  if (!m.allFinite()) {
    throw ParseError(std::string(name) + ": non-finite entry");
  }
  return m;
}

int int_from_json(const nlohmann::json& j, const char* name) {
  if (!j.is_number_integer()) {
    throw ParseError(std::string(name) + ": expected an integer");
  }
  return j.get<int>();
}

}  // namespace

SwitchingSystem switching_from_json(const nlohmann::json& j) {
  check_fields(j, {"kind", "alpha", "subsystems"}, "switching system");
  SwitchingSystem sys;
  if (!j.at("alpha").is_number()) {
    throw ParseError("switching system: alpha must be a number");
  }
  sys.alpha = j.at("alpha").get<double>();
  if (!j.at("subsystems").is_array() || j.at("subsystems").empty()) {
    throw ParseError("switching system: subsystems must be a non-empty array");
  }
  for (const auto& sub : j.at("subsystems")) {
    check_fields(sub, {"label", "A"}, "subsystem");
    if (!sub.at("label").is_string()) {
      throw ParseError("subsystem: label must be a string");
    }
    sys.subsystems.push_back(
        {sub.at("label").get<std::string>(), matrix_from_json(sub.at("A"), "subsystem A")});
  }
  sys.validate();
  return sys;
}

ResetClosedLoop reset_from_json(const nlohmann::json& j) {
  check_fields(j,
               {"kind", "alpha", "A_cl", "B_cl", "C_cl", "n_plant", "n_controller",
                "n_reset_controller", "n_reset_states", "C_p"},
               "reset system");
  ResetClosedLoop rcl;
  rcl.alpha = j.at("alpha").get<double>();
  rcl.A_cl = matrix_from_json(j.at("A_cl"), "A_cl");
  const RealMatrix b = matrix_from_json(j.at("B_cl"), "B_cl");
  if (b.cols() != 1) {
    throw ParseError("B_cl: expected a column (array of single-entry rows)");
  }
  rcl.B_cl = b.col(0);
  const RealMatrix c = matrix_from_json(j.at("C_cl"), "C_cl");
  if (c.rows() != 1) {
    throw ParseError("C_cl: expected a single row");
  }
  rcl.C_cl = c.row(0);
  rcl.n_plant = int_from_json(j.at("n_plant"), "n_plant");
  rcl.n_controller = int_from_json(j.at("n_controller"), "n_controller");
  rcl.n_reset_controller = int_from_json(j.at("n_reset_controller"), "n_reset_controller");
  rcl.n_reset_states = int_from_json(j.at("n_reset_states"), "n_reset_states");
  if (rcl.n_plant > 0) {
    const RealMatrix cp = matrix_from_json(j.at("C_p"), "C_p");
    if (cp.rows() != 1) {
      throw ParseError("C_p: expected a single row");
    }
    rcl.C_p = cp.row(0);
  } else {
    rcl.C_p = Eigen::RowVectorXd(0);
  }
  try {
    rcl.validate();
  } catch (const std::invalid_argument& err) {
    throw ParseError(std::string("reset system: ") + err.what());
  }
  return rcl;
}

PseudoPolynomial pseudo_poly_from_json(const nlohmann::json& j) {
  check_fields(j, {"kind", "base_order", "coeffs"}, "pseudo-polynomial");
  PseudoPolynomial poly;
  poly.base_order = j.at("base_order").get<double>();
  if (!j.at("coeffs").is_array()) {
    throw ParseError("pseudo-polynomial: coeffs must be an array");
  }
  for (const auto& c : j.at("coeffs")) {
    if (!c.is_number()) {
      throw ParseError("pseudo-polynomial: non-numeric coefficient");
    }
    poly.coeffs.push_back(c.get<double>());
  }
  try {
    poly.validate();
  } catch (const std::invalid_argument& err) {
    throw ParseError(std::string("pseudo-polynomial: ") + err.what());
  }
  return poly;
}

SystemDescription load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError("'" + path.string() + "': " + err.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ParseError("'" + path.string() + "': missing string field 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "switching") {
    return switching_from_json(j);
  }
  if (kind == "reset") {
    return reset_from_json(j);
  }
  if (kind == "pseudo_poly") {
    return pseudo_poly_from_json(j);
  }
  throw ParseError("'" + path.string() + "': unknown kind '" + kind + "'");
}

nlohmann::json to_json(const RealMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const FractionalLTI& sys) {
  return {{"kind", "realization"},
          {"alpha", sys.alpha},
          {"A", to_json(sys.A)},
          {"B", to_json(sys.B)},
          {"C", to_json(sys.C)},
          {"D", to_json(sys.D)}};
}

nlohmann::json to_json(const RationalTF& tf) {
  return {{"kind", "rational_tf"}, {"num", tf.num}, {"den", tf.den}};
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::random_device rd;
  const auto tmp = path.parent_path() /
                   (path.filename().string() + ".tmp" + std::to_string(rd() % 1000000));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string sweep_csv(const PhaseSweepReport& report) {
  std::ostringstream out;
  out << "omega,arg1_rad,arg2_rad,delta_rad,threshold_rad\n";
  const std::string threshold = format_number(std::numbers::pi / 2.0);
  for (std::size_t k = 0; k < report.omega.size(); ++k) {
    out << format_number(report.omega[k]) << ',' << format_number(report.phase_a[k]) << ','
        << format_number(report.phase_b[k]) << ',' << format_number(report.delta[k]) << ','
        << threshold << '\n';
  }
  return out.str();
}

std::string hbeta_csv(const SprResult& result) {
  std::ostringstream out;
  out << "omega,phase_rad,magnitude\n";
  for (std::size_t k = 0; k < result.omega.size(); ++k) {
    out << format_number(result.omega[k]) << ',' << format_number(result.phase[k]) << ','
        << format_number(result.magnitude[k]) << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t,y,mode";
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  for (Eigen::Index i = 1; i <= n; ++i) {
    out << ",x" << i;
  }
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_number(traj.times[k]) << ',' << format_number(traj.outputs[k]) << ','
        << traj.modes[k];
    for (Eigen::Index i = 0; i < n; ++i) {
      out << ',' << format_number(traj.states[k](i));
    }
    out << '\n';
  }
  return out.str();
}

std::string events_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t,kind,mode_before,mode_after\n";
  for (const Event& ev : traj.events) {
    out << format_number(ev.time) << ','
        << (ev.kind == Event::Kind::Switch ? "switch" : "reset") << ',' << ev.mode_before << ','
        << ev.mode_after << '\n';
  }
  return out.str();
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char byte : data) {
    hash ^= byte;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string digest_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(data));
  return buf;
}

}  // namespace fohs::io
