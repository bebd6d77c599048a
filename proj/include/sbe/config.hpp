#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbe/field.hpp"
#include "sbe/hermite.hpp"

namespace sbe::cli {

inline constexpr const char* kVersion = "sbe2d 0.1.0";

// Resolved run configuration; parse_config fills defaults and records them.
struct RunConfig {
  std::string subcommand;

  GridSpec grid;
  std::vector<double> tau_list{100.0};
  std::string family = "polynomial";
  std::vector<double> poly{0.0, 0.0, 0.25};  // x^2/4: c2 = 0.5
  double param_a = 1.0;
  double omega_re = 1.0, omega_im = 0.0;
  double kappa = 0.125;
  double coupling = 1.0;
  int ensemble = 64;
  double horizon = 10.0;
  int records = 40;
  uint64_t seed = 1;
  int threads = 2;
  std::string out_dir = "out";

  // hermite
  int m_max = 64;
  int n_quad = 192;

  // fock truncation
  int fock_K = 3;
  double fock_dp = 1.0;
  int n_max = 3;
  int K_terms = 2;
  double pi_c = 0.3;
  double ansatz_M = 8.0;
  double c2 = 1.0;
  double tol = 1e-9;

  hermite::NonlinearitySpec nonlinearity() const;
  std::map<std::string, std::string> resolved;  // every key after defaulting
};

// Strict key=value parsing: unknown keys and duplicates are rejected, kappa
// must satisfy the (0, 1/4) assumption bound.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

void write_manifest(const std::string& path, const RunConfig& cfg);

}  // namespace sbe::cli
