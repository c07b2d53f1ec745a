#include "cli/config.hpp"

#include <cmath>
#include <set>
#include <variant>

#include "gaplabel/error.hpp"

namespace gaplabel::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw SchemaError(where + ": " + what); }

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "expected a finite number");
  return x;
}

int integer(const json& v, const std::string& where, int lo) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > 1'000'000'000) fail(where, "out of range");
  return static_cast<int>(x);
}

cd complex_number(const json& v, const std::string& where) {
  if (v.is_number()) return {number(v, where), 0.0};
  if (v.is_array() && v.size() == 2) return {number(v[0], where), number(v[1], where)};
  fail(where, "expected a number or [re, im]");
}

ComplexMatrix complex_matrix(const json& v, int m, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != m) fail(where, "expected " + std::to_string(m) + " rows");
  ComplexMatrix out(m, m);
  for (int i = 0; i < m; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != m) fail(where, "expected square matrix");
    for (int j = 0; j < m; ++j) out(i, j) = complex_number(row[static_cast<std::size_t>(j)], where);
  }
  return out;
}

std::vector<double> real_list(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, where));
  return out;
}

SpectralSet interval_list(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of [lo, hi]");
  std::vector<Interval> out;
  for (const auto& x : v) {
    if (!x.is_array() || x.size() != 2) fail(where, "expected [lo, hi]");
    const double lo = number(x[0], where), hi = number(x[1], where);
    if (hi < lo) fail(where, "interval with hi < lo");
    out.push_back({lo, hi});
  }
  return SpectralSet(std::move(out));
}

BaseDynamics parse_base(const json& v) {
  allow_keys(v, "base", {"type", "alpha"});
  if (!v.contains("type") || !v["type"].is_string()) fail("base.type", "missing");
  const std::string type = v["type"];
  if (type == "torus") {
    if (!v.contains("alpha")) fail("base.alpha", "missing");
    return BaseDynamics::torus_rotation(real_list(v["alpha"], "base.alpha"));
  }
  if (v.contains("alpha")) fail("base.alpha", "only valid for a torus rotation");
  if (type == "cat_map") return BaseDynamics::cat_map();
  if (type == "doubling") return BaseDynamics::doubling_map();
  fail("base.type", "unknown base '" + type + "'");
}

Potential parse_potential(const json& v, int m, const ToleranceProfile& tol) {
  if (!v.is_object() || !v.contains("type") || !v["type"].is_string()) fail("potential.type", "missing");
  const std::string type = v["type"];
  if (type == "free") {
    allow_keys(v, "potential", {"type"});
    return Potential::free(m);
  }
  if (type == "constant") {
    allow_keys(v, "potential", {"type", "value"});
    if (!v.contains("value")) fail("potential.value", "missing");
    return Potential::constant(HermitianMatrix(complex_matrix(v["value"], m, "potential.value"), tol));
  }
  if (type == "amo_dual") {
    allow_keys(v, "potential", {"type", "amplitude"});
    return Potential::amo_dual(m, v.contains("amplitude") ? number(v["amplitude"], "potential.amplitude") : 1.0);
  }
  if (type == "trig_blocks") {
    allow_keys(v, "potential", {"type", "blocks"});
    if (!v.contains("blocks") || !v["blocks"].is_array()) fail("potential.blocks", "expected an array");
    std::vector<FourierBlock> blocks;
    for (const auto& b : v["blocks"]) {
      allow_keys(b, "potential.blocks[]", {"k", "coeff"});
      if (!b.contains("k") || !b["k"].is_array() || b["k"].empty()) fail("potential.blocks[].k", "expected an array");
      FourierBlock block;
      for (const auto& k : b["k"]) {
        if (!k.is_number_integer()) fail("potential.blocks[].k", "expected integers");
        block.k.push_back(k.get<int>());
      }
      if (!b.contains("coeff")) fail("potential.blocks[].coeff", "missing");
      block.coeff = complex_matrix(b["coeff"], m, "potential.blocks[].coeff");
      blocks.push_back(std::move(block));
    }
    return Potential::trig_blocks(m, std::move(blocks), tol);
  }
  fail("potential.type", "unknown potential '" + type + "'");
}

void parse_tol(const json& v, ToleranceProfile& tol) {
  using Field = std::variant<double ToleranceProfile::*, int ToleranceProfile::*>;
  const std::pair<const char*, Field> fields[] = {
      {"hermitian_asymmetry", &ToleranceProfile::hermitian_asymmetry},
      {"unitary", &ToleranceProfile::unitary},
      {"singular_rel", &ToleranceProfile::singular_rel},
      {"lagrangian", &ToleranceProfile::lagrangian},
      {"frame_rank", &ToleranceProfile::frame_rank},
      {"unitary_point", &ToleranceProfile::unitary_point},
      {"degenerate", &ToleranceProfile::degenerate},
      {"kernel_cutoff", &ToleranceProfile::kernel_cutoff},
      {"eigen_tie", &ToleranceProfile::eigen_tie},
      {"max_turn_increment", &ToleranceProfile::max_turn_increment},
      {"max_relative_step", &ToleranceProfile::max_relative_step},
      {"initial_substeps", &ToleranceProfile::initial_substeps},
      {"max_substeps", &ToleranceProfile::max_substeps},
      {"max_grid_refinements", &ToleranceProfile::max_grid_refinements},
      {"uh_gap_threshold", &ToleranceProfile::uh_gap_threshold},
      {"uh_iterations", &ToleranceProfile::uh_iterations},
      {"uh_samples", &ToleranceProfile::uh_samples},
      {"uh_max_samples", &ToleranceProfile::uh_max_samples},
      {"uh_angle", &ToleranceProfile::uh_angle},
      {"uh_continuity", &ToleranceProfile::uh_continuity},
      {"flat_tol", &ToleranceProfile::flat_tol},
      {"label_tol", &ToleranceProfile::label_tol},
      {"k_max", &ToleranceProfile::k_max},
      {"edge_bisections", &ToleranceProfile::edge_bisections},
  };
  if (!v.is_object()) fail("tol", "expected an object");
  for (const auto& [key, value] : v.items()) {
    const auto it = std::find_if(std::begin(fields), std::end(fields), [&](const auto& f) { return key == f.first; });
    if (it == std::end(fields)) fail("tol", "unknown key '" + key + "'");
    const std::string where = "tol." + key;
    std::visit(
        [&](auto member) {
          if constexpr (std::is_same_v<decltype(member), double ToleranceProfile::*>) {
            const double x = number(value, where);
            if (!(x > 0.0)) fail(where, "must be positive");
            tol.*member = x;
          } else {
            tol.*member = integer(value, where, 1);
          }
        },
        it->second);
  }
  if (!(tol.uh_gap_threshold > 1.0)) fail("tol.uh_gap_threshold", "must exceed 1");
}

TrigPolynomial parse_dual_of(const json& v) {
  allow_keys(v, "dual_of", {"coeffs", "alpha"});
  if (!v.contains("coeffs") || !v["coeffs"].is_array() || v["coeffs"].size() < 2)
    fail("dual_of.coeffs", "expected [v_0, v_1, ..., v_d] with d >= 1");
  if (!v.contains("alpha")) fail("dual_of.alpha", "missing");
  std::vector<cd> coeffs;
  for (const auto& c : v["coeffs"]) coeffs.push_back(complex_number(c, "dual_of.coeffs"));
  return TrigPolynomial(std::move(coeffs), number(v["alpha"], "dual_of.alpha"));
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  try {
    cfg.raw = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  const json& j = cfg.raw;
  allow_keys(j, "config", {"m", "C", "potential", "base", "dual_of", "scan", "seed", "tol", "theta0", "perturb", "star"});
  cfg.hash = fnv1a(j.dump());

  try {
    if (j.contains("tol")) parse_tol(j["tol"], cfg.tol);
    if (j.contains("seed")) {
      if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) fail("seed", "expected a non-negative integer");
      cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("scan")) {
      const json& s = j["scan"];
      allow_keys(s, "scan", {"E_min", "E_max", "points", "N"});
      if (s.contains("E_min")) cfg.scan.e_min = number(s["E_min"], "scan.E_min");
      if (s.contains("E_max")) cfg.scan.e_max = number(s["E_max"], "scan.E_max");
      if (s.contains("points")) cfg.scan.points = integer(s["points"], "scan.points", 1);
      if (s.contains("N")) cfg.scan.n = integer(s["N"], "scan.N", 1);
      if (!(cfg.scan.e_max > cfg.scan.e_min)) fail("scan", "empty energy range");
    }

    if (j.contains("dual_of")) {
      for (const char* key : {"m", "C", "potential", "base"})
        if (j.contains(key)) fail(key, "cannot be combined with dual_of");
      cfg.dual_of = parse_dual_of(j["dual_of"]);
      cfg.model = build_dual(*cfg.dual_of);
    } else if (j.contains("m") || j.contains("potential") || j.contains("base") || j.contains("C")) {
      if (!j.contains("m")) fail("m", "missing");
      const int m = integer(j["m"], "m", 1);
      if (m > 8) fail("m", "at most 8 supported");
      const ComplexMatrix c = j.contains("C") ? complex_matrix(j["C"], m, "C") : ComplexMatrix::Identity(m, m);
      const Potential f = j.contains("potential") ? parse_potential(j["potential"], m, cfg.tol) : Potential::free(m);
      if (!j.contains("base")) fail("base", "missing");
      cfg.model.emplace(c, f, parse_base(j["base"]), cfg.tol);
    }

    if (j.contains("theta0")) {
      if (!cfg.model) fail("theta0", "requires a model");
      const auto t = real_list(j["theta0"], "theta0");
      if (static_cast<int>(t.size()) != cfg.model->base().dimension()) fail("theta0", "dimension mismatch");
      cfg.theta0 = cfg.model->base().reduce(Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size())));
    } else if (cfg.model) {
      cfg.theta0 = cfg.model->base().origin();
    }

    if (j.contains("perturb")) {
      const json& p = j["perturb"];
      allow_keys(p, "perturb", {"support", "realizations", "merge_radius"});
      PerturbSpec spec;
      if (!p.contains("support")) fail("perturb.support", "missing");
      spec.support = real_list(p["support"], "perturb.support");
      if (p.contains("realizations")) spec.realizations = integer(p["realizations"], "perturb.realizations", 1);
      if (p.contains("merge_radius")) spec.merge_radius = number(p["merge_radius"], "perturb.merge_radius");
      RandomDiagonalLaw(spec.support, cfg.seed);  // validates the support
      cfg.perturb = std::move(spec);
    }
    if (j.contains("star")) {
      allow_keys(j["star"], "star", {"A", "B"});
      if (!j["star"].contains("A") || !j["star"].contains("B")) fail("star", "needs both A and B");
      cfg.star_sets.emplace(interval_list(j["star"]["A"], "star.A"), interval_list(j["star"]["B"], "star.B"));
    }
  } catch (const Error& e) {
    throw SchemaError(e.what());
  } catch (const json::exception& e) {
    throw SchemaError(e.what());
  }
  return cfg;
}

}  // namespace gaplabel::cli
