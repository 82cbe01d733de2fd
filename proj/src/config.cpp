#include "gyro/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gyro {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  }
}

}  // namespace

void ScenarioConfig::set(const std::string& key, const std::string& value) {
  if (key == "initial.kind") initial_kind = value;
  else if (key == "initial.sigma") initial_sigma = parse_double(key, value);
  else if (key == "initial.trunc") initial_trunc = parse_double(key, value);
  else if (key == "initial.a") initial_a = parse_double(key, value);
  else if (key == "initial.box_half") initial_box_half = parse_double(key, value);
  else if (key == "initial.offset") initial_offset = parse_double(key, value);
  else if (key == "initial.r0") initial_r0 = parse_double(key, value);
  else if (key == "initial.r1") initial_r1 = parse_double(key, value);
  else if (key == "perturb.kind") perturb_kind = value;
  else if (key == "perturb.shift") perturb_shift = parse_double(key, value);
  else if (key == "gamma") gamma = parse_double(key, value);
  else if (key == "epsilon") epsilon = parse_double(key, value);
  else if (key == "epsilon.sweep") epsilon_sweep = parse_list(key, value);
  else if (key == "particles") particles = parse_u64(key, value);
  else if (key == "horizon") horizon = parse_double(key, value);
  else if (key == "dt") dt = parse_double(key, value);
  else if (key == "grid.half_width") grid_half_width = parse_double(key, value);
  else if (key == "grid.cells") grid_cells = static_cast<int>(parse_u64(key, value));
  else if (key == "norm_grid.cells") norm_grid_cells = static_cast<int>(parse_u64(key, value));
  else if (key == "snapshot.stride") snapshot_stride = parse_u64(key, value);
  else if (key == "norm.time_step") norm_time_step = parse_double(key, value);
  else if (key == "semilag.times") semilag_times = parse_list(key, value);
  else if (key == "reverse.dt") reverse_dt = parse_double(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "threads") threads = static_cast<int>(parse_u64(key, value));
  else if (key == "mollifier.order") mollifier_order = static_cast<int>(parse_u64(key, value));
  else if (key == "flow.guard_cells") flow_guard_cells = static_cast<int>(parse_u64(key, value));
  else if (key == "constants.stability") stability_constant = value;
  else if (key == "constants.propagation_factor") propagation_factor = static_cast<int>(parse_u64(key, value));
  else if (key == "out") out_dir = value;
  else throw std::invalid_argument("config: unknown key: " + key);
}

ScenarioConfig ScenarioConfig::from_string(const std::string& text) {
  ScenarioConfig cfg;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value: " + line);
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

void ScenarioConfig::validate() const {
  if (!(gamma > 2.0)) throw std::invalid_argument("config: gamma must exceed 2");
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("config: epsilon must lie in (0, 1]");
  for (double e : epsilon_sweep)
    if (!(e > 0.0) || e > 1.0)
      throw std::invalid_argument("config: sweep epsilon must lie in (0, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
  if (particles < 1) throw std::invalid_argument("config: need at least one particle");
  if (!(horizon > 0.0)) throw std::invalid_argument("config: horizon must be positive");
  if (grid_cells < 2 || norm_grid_cells < 2)
    throw std::invalid_argument("config: grids need at least 2 cells per axis");
  if (snapshot_stride < 1) throw std::invalid_argument("config: stride >= 1");
  if (perturb_kind != "none" && perturb_kind != "shift")
    throw std::invalid_argument("config: perturb.kind is none or shift");
  if (stability_constant != "6" && stability_constant != "6sqrt2")
    throw std::invalid_argument("config: constants.stability is 6 or 6sqrt2");
  if (propagation_factor != 1 && propagation_factor != 2)
    throw std::invalid_argument("config: propagation factor is 1 or 2");
  initial_condition();  // throws on an unknown kind / bad parameters
}

InitialCondition ScenarioConfig::initial_condition() const {
  if (initial_kind == "gaussian")
    return InitialCondition::gaussian(initial_sigma, initial_trunc);
  if (initial_kind == "polynomial") return InitialCondition::polynomial(initial_a);
  if (initial_kind == "uniform_box")
    return InitialCondition::uniform_box(initial_box_half);
  if (initial_kind == "two_bump")
    return InitialCondition::two_bump(initial_offset, initial_r0, initial_r1);
  throw std::invalid_argument("config: unknown initial.kind: " + initial_kind);
}

StabilityConstant ScenarioConfig::stability_variant() const {
  return stability_constant == "6" ? StabilityConstant::six
                                   : StabilityConstant::six_sqrt2;
}

std::string ScenarioConfig::canonical() const {
  char buf[64];
  auto fmt = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  std::string s;
  s += "constants.propagation_factor = " + std::to_string(propagation_factor) + "\n";
  s += "constants.stability = " + stability_constant + "\n";
  s += "dt = " + fmt(dt) + "\n";
  s += "epsilon = " + fmt(epsilon) + "\n";
  s += "epsilon.sweep =";
  for (double e : epsilon_sweep) s += " " + fmt(e);
  s += "\n";
  s += "flow.guard_cells = " + std::to_string(flow_guard_cells) + "\n";
  s += "gamma = " + fmt(gamma) + "\n";
  s += "grid.cells = " + std::to_string(grid_cells) + "\n";
  s += "grid.half_width = " + fmt(grid_half_width) + "\n";
  s += "horizon = " + fmt(horizon) + "\n";
  s += "initial.a = " + fmt(initial_a) + "\n";
  s += "initial.box_half = " + fmt(initial_box_half) + "\n";
  s += "initial.kind = " + initial_kind + "\n";
  s += "initial.offset = " + fmt(initial_offset) + "\n";
  s += "initial.r0 = " + fmt(initial_r0) + "\n";
  s += "initial.r1 = " + fmt(initial_r1) + "\n";
  s += "initial.sigma = " + fmt(initial_sigma) + "\n";
  s += "initial.trunc = " + fmt(initial_trunc) + "\n";
  s += "mollifier.order = " + std::to_string(mollifier_order) + "\n";
  s += "norm.time_step = " + fmt(norm_time_step) + "\n";
  s += "norm_grid.cells = " + std::to_string(norm_grid_cells) + "\n";
  s += "particles = " + std::to_string(particles) + "\n";
  s += "perturb.kind = " + perturb_kind + "\n";
  s += "perturb.shift = " + fmt(perturb_shift) + "\n";
  s += "reverse.dt = " + fmt(reverse_dt) + "\n";
  s += "seed = " + std::to_string(seed) + "\n";
  s += "semilag.times =";
  for (double t : semilag_times) s += " " + fmt(t);
  s += "\n";
  s += "snapshot.stride = " + std::to_string(snapshot_stride) + "\n";
  return s;
}

std::string ScenarioConfig::hash() const {
  // FNV-1a over the canonical form
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gyro
