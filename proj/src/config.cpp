#include "sbe/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sbe::cli {

hermite::NonlinearitySpec RunConfig::nonlinearity() const {
  if (family == "polynomial") return hermite::NonlinearitySpec::polynomial(poly, kappa);
  if (family == "sqrt_shift") return hermite::NonlinearitySpec::sqrt_shift(param_a, kappa);
  if (family == "exp_real")
    return hermite::NonlinearitySpec::exp_real({omega_re, omega_im}, kappa);
  if (family == "abs") return hermite::NonlinearitySpec::abs_value(kappa);
  throw std::invalid_argument("unknown family: " + family);
}

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

const std::set<std::string> kKnownKeys = {
    "subcommand", "L",        "N",       "dt",       "k_cut",    "tau",
    "family",     "poly",     "param",   "omega_re", "omega_im", "kappa",
    "coupling",   "ensemble", "horizon", "records",  "seed",     "threads",
    "out_dir",    "m_max",    "n_quad",  "fock_K",   "fock_dp",  "n_max",
    "K_terms",    "pi_c",     "ansatz_M", "c2",      "tol"};

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!kKnownKeys.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "'");
    if (kv.count(key)) throw std::invalid_argument("config: duplicate key '" + key + "'");
    kv[key] = val;
  }

  auto get = [&](const char* k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("subcommand")) cfg.subcommand = *v;
  if (auto v = get("L")) cfg.grid.L = std::stod(*v);
  if (auto v = get("N")) cfg.grid.N = std::stoi(*v);
  if (auto v = get("dt")) cfg.grid.dt = std::stod(*v);
  if (auto v = get("k_cut")) cfg.grid.k_cut = std::stod(*v);
  if (auto v = get("tau")) cfg.tau_list = parse_list(*v);
  if (auto v = get("family")) cfg.family = *v;
  if (auto v = get("poly")) cfg.poly = parse_list(*v);
  if (auto v = get("param")) cfg.param_a = std::stod(*v);
  if (auto v = get("omega_re")) cfg.omega_re = std::stod(*v);
  if (auto v = get("omega_im")) cfg.omega_im = std::stod(*v);
  if (auto v = get("kappa")) cfg.kappa = std::stod(*v);
  if (auto v = get("coupling")) cfg.coupling = std::stod(*v);
  if (auto v = get("ensemble")) cfg.ensemble = std::stoi(*v);
  if (auto v = get("horizon")) cfg.horizon = std::stod(*v);
  if (auto v = get("records")) cfg.records = std::stoi(*v);
  if (auto v = get("seed")) cfg.seed = std::stoull(*v);
  if (auto v = get("threads")) cfg.threads = std::stoi(*v);
  if (auto v = get("out_dir")) cfg.out_dir = *v;
  if (auto v = get("m_max")) cfg.m_max = std::stoi(*v);
  if (auto v = get("n_quad")) cfg.n_quad = std::stoi(*v);
  if (auto v = get("fock_K")) cfg.fock_K = std::stoi(*v);
  if (auto v = get("fock_dp")) cfg.fock_dp = std::stod(*v);
  if (auto v = get("n_max")) cfg.n_max = std::stoi(*v);
  if (auto v = get("K_terms")) cfg.K_terms = std::stoi(*v);
  if (auto v = get("pi_c")) cfg.pi_c = std::stod(*v);
  if (auto v = get("ansatz_M")) cfg.ansatz_M = std::stod(*v);
  if (auto v = get("c2")) cfg.c2 = std::stod(*v);
  if (auto v = get("tol")) cfg.tol = std::stod(*v);

  if (!(cfg.kappa > 0.0 && cfg.kappa < 0.25))
    throw std::invalid_argument("config: kappa must lie strictly inside (0, 1/4)");
  cfg.grid.validate();
  if (cfg.tau_list.empty()) throw std::invalid_argument("config: tau list empty");
  for (double t : cfg.tau_list)
    if (!(t >= 1.0)) throw std::invalid_argument("config: tau values must be >= 1");

  // record the fully resolved configuration
  auto put = [&](const std::string& k, const std::string& v) { cfg.resolved[k] = v; };
  auto putd = [&](const std::string& k, double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    put(k, o.str());
  };
  put("subcommand", cfg.subcommand);
  putd("L", cfg.grid.L);
  put("N", std::to_string(cfg.grid.N));
  putd("dt", cfg.grid.dt);
  putd("k_cut", cfg.grid.k_cut);
  {
    std::ostringstream o;
    o.precision(17);
    for (size_t i = 0; i < cfg.tau_list.size(); ++i)
      o << (i ? "," : "") << cfg.tau_list[i];
    put("tau", o.str());
  }
  put("family", cfg.family);
  {
    std::ostringstream o;
    o.precision(17);
    for (size_t i = 0; i < cfg.poly.size(); ++i) o << (i ? "," : "") << cfg.poly[i];
    put("poly", o.str());
  }
  putd("param", cfg.param_a);
  putd("omega_re", cfg.omega_re);
  putd("omega_im", cfg.omega_im);
  putd("kappa", cfg.kappa);
  putd("coupling", cfg.coupling);
  put("ensemble", std::to_string(cfg.ensemble));
  putd("horizon", cfg.horizon);
  put("records", std::to_string(cfg.records));
  put("seed", std::to_string(cfg.seed));
  put("threads", std::to_string(cfg.threads));
  put("out_dir", cfg.out_dir);
  put("m_max", std::to_string(cfg.m_max));
  put("n_quad", std::to_string(cfg.n_quad));
  put("fock_K", std::to_string(cfg.fock_K));
  putd("fock_dp", cfg.fock_dp);
  put("n_max", std::to_string(cfg.n_max));
  put("K_terms", std::to_string(cfg.K_terms));
  putd("pi_c", cfg.pi_c);
  putd("ansatz_M", cfg.ansatz_M);
  putd("c2", cfg.c2);
  putd("tol", cfg.tol);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config file not found: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void write_manifest(const std::string& path, const RunConfig& cfg) {
  nlohmann::json j;
  j["version"] = kVersion;
  for (const auto& [k, v] : cfg.resolved) j["config"][k] = v;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_manifest: cannot open " + path);
  f << j.dump(2) << "\n";
}

}  // namespace sbe::cli
