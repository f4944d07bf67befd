#include "dodcut/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dodcut {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw InvalidConfig(key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw InvalidConfig(key + ": not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidConfig(key + ": not a boolean: '" + v + "'");
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(to_int("n_list", item)));
  }
  if (out.empty()) throw InvalidConfig("n_list is empty");
  return out;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot read config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "problem.kind") {
      if (v != "ramp_paper") throw InvalidConfig("problem.kind: only ramp_paper is available, got '" + v + "'");
    }
    else if (k == "problem.gamma_deg") cfg.gamma_deg = to_double(k, v);
    else if (k == "problem.x0") cfg.x0 = to_double(k, v);
    else if (k == "problem.t_final") cfg.t_final = to_double(k, v);
    else if (k == "mesh.n") cfg.n = static_cast<int>(to_int(k, v));
    else if (k == "mesh.n_list") cfg.n_list = parse_int_list(v);
    else if (k == "scheme.cfl_epsilon") cfg.cfl_epsilon = to_double(k, v);
    else if (k == "scheme.cfl_kappa") cfg.cfl_kappa = to_double(k, v);
    else if (k == "scheme.tau") cfg.tau = to_double(k, v);
    else if (k == "quad.face_order") cfg.quad_face_order = static_cast<int>(to_int(k, v));
    else if (k == "quad.cell_degree") cfg.quad_cell_degree = static_cast<int>(to_int(k, v));
    else if (k == "output.dir") cfg.out = v;
    else if (k == "verify.seed") cfg.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "verify.samples") cfg.samples = static_cast<int>(to_int(k, v));
    else if (k == "converge.accumulate") cfg.accumulate = to_bool(k, v);
    else throw InvalidConfig("unknown config key '" + k + "'");
  }
}

SchemeConfig RunConfig::scheme() const {
  SchemeConfig s;
  s.tau = tau;
  s.epsilon = cfl_epsilon;
  s.kappa = cfl_kappa;
  s.t_final = t_final;
  s.quad.face_order = quad_face_order;
  s.quad.cell_degree = quad_cell_degree;
  return s;
}

RampDomain RunConfig::ramp() const { return RampDomain{gamma_deg * std::acos(-1.0) / 180.0, x0}; }

StudyConfig RunConfig::study() const {
  StudyConfig s;
  s.gamma_deg = gamma_deg;
  s.x0 = x0;
  s.ns = n_list;
  s.scheme = scheme();
  s.accumulate = accumulate;
  return s;
}

void RunConfig::validate() const {
  if (!(gamma_deg > 0.0 && gamma_deg < 90.0)) throw InvalidConfig("gamma must lie in (0, 90) degrees");
  try {
    ramp().validate();
  } catch (const DegenerateGeometry& e) {
    throw InvalidConfig(e.what());
  }
  if (n < 4) throw InvalidConfig("n must be >= 4");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 4) throw InvalidConfig("n_list entries must be >= 4");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw InvalidConfig("n_list must be strictly increasing");
  }
  if (samples < 1) throw InvalidConfig("samples must be >= 1");
  scheme().validate();
}

}  // namespace dodcut
