#include "cli/commands.hpp"

#include <fmt/format.h>

#include "cli/svg.hpp"
#include "gaplabel/error.hpp"
#include "gaplabel/gaps.hpp"
#include "gaplabel/hyperbolicity.hpp"
#include "gaplabel/rotation.hpp"
#include "gaplabel/scanengine.hpp"

namespace gaplabel::cli {

using nlohmann::json;

namespace {

const OperatorModel& need_model(const RunConfig& cfg) {
  if (!cfg.model) throw SchemaError("config: this command needs a model (m/C/potential/base or dual_of)");
  return *cfg.model;
}

std::vector<double> grid(const ScanSpec& s) {
  std::vector<double> out(static_cast<std::size_t>(s.points));
  for (int i = 0; i < s.points; ++i)
    out[static_cast<std::size_t>(i)] = s.points == 1 ? s.e_min : s.e_min + (s.e_max - s.e_min) * i / (s.points - 1);
  return out;
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string csv_header(const RunConfig& cfg, const char* columns) {
  return fmt::format("# {}\n{}\n", provenance(cfg), columns);
}

json meta(const RunConfig& cfg) {
  return {{"version", GAPLABEL_VERSION}, {"config_hash", fmt::format("{:016x}", cfg.hash)}};
}

json intervals(const SpectralSet& s) {
  json out = json::array();
  for (const Interval& i : s.intervals()) out.push_back({i.lo, i.hi});
  return out;
}

std::string int_list(const std::vector<int>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(1, sep) : std::string()) + std::to_string(v[i]);
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string provenance(const RunConfig& config) {
  return fmt::format("gaplabel {} config={:016x}", GAPLABEL_VERSION, config.hash);
}

std::vector<OutputFile> cmd_ids(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const OperatorModel& model = need_model(cfg);
  const auto energies = grid(cfg.scan);
  IdsOptions io;
  io.workers = ctx.workers;
  io.tol = cfg.tol;
  const auto values = ids(model, cfg.theta0, cfg.scan.n, energies, io);
  std::string csv = csv_header(cfg, "E,ids");
  for (std::size_t i = 0; i < energies.size(); ++i) csv += num(energies[i]) + "," + num(values[i]) + "\n";
  return {{"ids.csv", std::move(csv)}};
}

std::vector<OutputFile> cmd_rot(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const OperatorModel& model = need_model(cfg);
  const auto energies = grid(cfg.scan);
  RotOptions ro;
  ro.workers = ctx.workers;
  ro.tol = cfg.tol;
  const auto results = rot_scan(model, cfg.theta0, cfg.scan.n, energies, ro);
  std::string csv = csv_header(cfg, "E,rot_turns,ledger_N");
  for (std::size_t i = 0; i < energies.size(); ++i)
    csv += num(energies[i]) + "," + num(results[i].estimate) + "," + std::to_string(results[i].n) + "\n";
  return {{"rot.csv", std::move(csv)}};
}

std::vector<OutputFile> cmd_gaps(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const OperatorModel& model = need_model(cfg);
  GapScanOptions opts;
  opts.workers = ctx.workers;
  opts.theta0 = cfg.theta0;
  opts.tol = cfg.tol;
  opts.uh = UhParams::from(cfg.tol);
  opts.with_rot = true;
  opts.with_degree = model.base().kind() == BaseKind::TorusRotation;
  const GapScan scan = scan_gaps(model, cfg.scan.e_min, cfg.scan.e_max, cfg.scan.points, cfg.scan.n, opts);

  std::string csv = csv_header(cfg, "E_lo,E_hi,ids,kind,label_k,label_j,label_distance,matched,rot,dist_mod_group,degree");
  std::vector<Band> bands;
  for (const GapRecord& g : scan.gaps) {
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", num(g.e_lo), num(g.e_hi), num(g.ids_value),
                       to_string(g.kind), int_list(g.best.k, ' '), g.best.j, num(g.best.distance),
                       g.label ? 1 : 0, g.rot_value ? num(*g.rot_value) : "", g.dist_mod_group ? num(*g.dist_mod_group) : "",
                       g.degree ? int_list(g.degree->r, ' ') : "");
    std::string label;
    if (g.label) label = g.best.k.empty() ? fmt::format("{}", g.best.j) : fmt::format("({}; {})", int_list(g.best.k, ','), g.best.j);
    bands.push_back({g.e_lo, g.e_hi, std::move(label)});
  }
  std::string svg = svg_plot(scan.energies, scan.ids, bands, provenance(cfg), "E", "IDS");
  return {{"gaps.csv", std::move(csv)}, {"gaps.svg", std::move(svg)}};
}

std::vector<OutputFile> cmd_uh(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const OperatorModel& model = need_model(cfg);
  const auto energies = grid(cfg.scan);
  const UhParams params = UhParams::from(cfg.tol);
  const bool torus = model.base().kind() == BaseKind::TorusRotation;
  struct Row {
    UhVerdict verdict;
    double gap;
    std::string degree;
  };
  auto scan = scan_indexed<Row>(
      energies.size(),
      [&](std::size_t i) {
        const UhResult r = uh_test(model, energies[i], params, cfg.tol);
        Row row{r.verdict, r.lyapunov_gap, ""};
        if (r.is_uh && torus) {
          try {
            row.degree = int_list(section_degree(*r.splitting, cfg.tol).r, ' ');
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::RefineGrid) throw;
          }
        }
        return row;
      },
      ctx.workers);
  if (!scan.ok()) throw Error(ErrorKind::InvalidInput, "uh scan failed: " + scan.failures.front().second);
  std::string csv = csv_header(cfg, "E,verdict,lyapunov_gap,degree");
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const Row& r = *scan.results[i];
    csv += fmt::format("{},{},{},{}\n", num(energies[i]), to_string(r.verdict), num(r.gap), r.degree);
  }
  return {{"uh.csv", std::move(csv)}};
}

std::vector<OutputFile> cmd_duality(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  if (!cfg.dual_of) throw SchemaError("config: duality needs dual_of");
  const TrigPolynomial& v = *cfg.dual_of;
  constexpr int kSamples = 100;
  auto residuals = scan_indexed<double>(
      kSamples,
      [&](std::size_t i) {
        CounterRng rng(cfg.seed, i);
        const double e = cfg.scan.e_min + (cfg.scan.e_max - cfg.scan.e_min) * rng.uniform();
        return check_factorization(v, e, rng.uniform());
      },
      ctx.workers);
  if (!residuals.ok()) throw Error(ErrorKind::InvalidInput, "factorization check failed: " + residuals.failures.front().second);
  double max_residual = 0.0;
  for (const auto& r : residuals.results) max_residual = std::max(max_residual, *r);

  const auto energies = grid(cfg.scan);
  const IdsDualityReport rep = check_ids_duality(v, energies, cfg.scan.n, ctx.workers);
  json out;
  out["_meta"] = meta(cfg);
  out["degree"] = v.degree();
  out["factorization_samples"] = kSamples;
  out["max_factorization_residual"] = max_residual;
  out["N"] = cfg.scan.n;
  out["energies"] = rep.energies;
  out["ids_dual"] = rep.ids_dual;
  out["ids_scalar"] = rep.ids_scalar;
  out["max_ids_difference"] = rep.max_difference;
  return {{"duality.json", dump(out)}};
}

std::vector<OutputFile> cmd_perturb(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const OperatorModel& model = need_model(cfg);
  if (!cfg.perturb) throw SchemaError("config: perturb needs a perturb section");
  const RandomDiagonalLaw law(cfg.perturb->support, cfg.seed);
  MonteCarloOptions mc;
  mc.workers = ctx.workers;
  mc.merge_radius = cfg.perturb->merge_radius;
  const BigstarReport rep = check_bigstar(model, law, cfg.scan.n, cfg.perturb->realizations, mc);
  json out;
  out["_meta"] = meta(cfg);
  out["N"] = cfg.scan.n;
  out["realizations"] = cfg.perturb->realizations;
  out["support"] = cfg.perturb->support;
  out["merge_radius"] = rep.merge_radius;
  out["sigma0"] = intervals(rep.sigma0);
  out["sigma1"] = intervals(rep.sigma1);
  out["sigma0_star_S"] = intervals(rep.predicted);
  out["subset_violation"] = rep.subset_violation;
  out["coverage_gap"] = rep.coverage_gap;
  return {{"perturb.json", dump(out)}};
}

std::vector<OutputFile> cmd_star(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  SpectralSet a, b;
  if (cfg.star_sets) {
    std::tie(a, b) = *cfg.star_sets;
  } else {
    const OperatorModel& model = need_model(cfg);
    if (!cfg.perturb) throw SchemaError("config: star needs either a star section or a model with perturb.support");
    a = estimate_sigma0(model, cfg.scan.n, ctx.workers, cfg.tol);
    b = SpectralSet::from_points(cfg.perturb->support);
  }
  json out;
  out["_meta"] = meta(cfg);
  out["A"] = intervals(a);
  out["B"] = intervals(b);
  out["star"] = intervals(star(a, b));
  return {{"star.json", dump(out)}};
}

}  // namespace gaplabel::cli
