#include "crosstwin/sim/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

#include "crosstwin/errors.hpp"

namespace crosstwin::sim {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string& cell, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || *end != '\0') {
    throw ConfigError("trajectory csv line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

TrajectorySource parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trajectory csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "slot") throw ConfigError("trajectory csv header must be slot,tau_1,...");
  for (std::size_t k = 1; k < header.size(); ++k) {
    if (header[k] != "tau_" + std::to_string(k)) {
      throw ConfigError("trajectory csv header column " + std::to_string(k + 1) + " must be tau_" +
                        std::to_string(k));
    }
  }
  const std::size_t joints = header.size() - 1;
  TrajectorySource src;
  src.kind = TrajectorySource::Kind::csv_playback;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != joints + 1) {
      throw ConfigError("trajectory csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(joints + 1) + " columns");
    }
    const double slot = number(cells[0], lineno);
    if (slot != static_cast<double>(static_cast<long>(slot))) {
      throw ConfigError("trajectory csv line " + std::to_string(lineno) + ": slot must be an integer");
    }
    Eigen::VectorXd row(static_cast<Eigen::Index>(joints));
    for (std::size_t k = 0; k < joints; ++k) row[static_cast<Eigen::Index>(k)] = number(cells[k + 1], lineno);
    if (!src.slots.empty() && static_cast<long>(slot) <= src.slots.back()) {
      throw ConfigError("trajectory csv line " + std::to_string(lineno) + ": slots must be strictly increasing");
    }
    src.slots.push_back(static_cast<long>(slot));
    src.samples.push_back(row);
  }
  if (src.slots.size() < 2) throw ConfigError("trajectory csv needs at least two rows");
  return src;
}

std::string trajectory_csv(const TrajectorySource& source, const SimConfig& config, long first_slot,
                           std::size_t slots) {
  std::ostringstream os;
  os << "slot";
  for (std::size_t i = 1; i <= source.joint_count(); ++i) os << ",tau_" << i;
  os << '\n';
  for (std::size_t k = 0; k < slots; ++k) {
    const long s = first_slot + static_cast<long>(k);
    const Eigen::VectorXd a = source.angles(s, config.slot_seconds());
    os << s;
    for (Eigen::Index i = 0; i < a.size(); ++i) os << ',' << format_double(a[i]);
    os << '\n';
  }
  return os.str();
}

std::string metrics_csv(const Metrics& metrics) {
  std::ostringstream os;
  os << "slot,packets,reward,cost,error\n";
  for (const auto& r : metrics.rows) {
    os << r.slot << ',' << r.packets << ',' << format_double(r.reward) << ',' << format_double(r.cost) << ','
       << format_double(r.error) << '\n';
  }
  return os.str();
}

}  // namespace crosstwin::sim
