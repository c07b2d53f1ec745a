#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaplabel/duality.hpp"
#include "gaplabel/model.hpp"
#include "gaplabel/perturb.hpp"

namespace gaplabel::cli {

struct ScanSpec {
  double e_min = -3.0;
  double e_max = 3.0;
  int points = 200;
  int n = 1000;
};

struct PerturbSpec {
  std::vector<double> support;
  int realizations = 200;
  double merge_radius = -1.0;
};

struct RunConfig {
  nlohmann::json raw;
  std::uint64_t hash = 0;
  std::optional<OperatorModel> model;
  std::optional<TrigPolynomial> dual_of;  ///< scalar potential whose dual was requested
  ScanSpec scan;
  BasePoint theta0;
  std::uint64_t seed = 0;
  ToleranceProfile tol;
  std::optional<PerturbSpec> perturb;
  std::optional<std::pair<SpectralSet, SpectralSet>> star_sets;
};

/// Thrown for anything wrong with the configuration itself; maps to exit code 2.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Validates the whole document before anything is computed.
RunConfig parse_config(const std::string& text);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace gaplabel::cli
