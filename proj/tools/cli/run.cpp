#include "cli/run.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "gaplabel/error.hpp"

namespace gaplabel::cli {

namespace {

using Command = std::vector<OutputFile> (*)(const CommandContext&);

const std::map<std::string, std::pair<Command, const char*>>& commands() {
  static const std::map<std::string, std::pair<Command, const char*>> table{
      {"ids", {cmd_ids, "integrated density of states on the scan grid -> ids.csv"}},
      {"rot", {cmd_rot, "fibered rotation number on the scan grid -> rot.csv"}},
      {"gaps", {cmd_gaps, "detect and label spectral gaps -> gaps.csv, gaps.svg"}},
      {"uh", {cmd_uh, "uniform hyperbolicity test on the scan grid -> uh.csv"}},
      {"duality", {cmd_duality, "check the Aubry dual factorization and IDS duality -> duality.json"}},
      {"perturb", {cmd_perturb, "Monte Carlo spectrum of random diagonal perturbations -> perturb.json"}},
      {"star", {cmd_star, "star product of two spectral sets -> star.json"}},
  };
  return table;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Spectral gaps, rotation numbers and gap labels of quasi-periodic block Jacobi operators"};
  app.require_subcommand(1);
  int workers = 1;
  bool quiet = false;
  std::string config_path, out_dir = ".";
  app.add_option("-j,--workers", workers, "worker threads")->check(CLI::Range(1, 256));
  app.add_flag("-q,--quiet", quiet, "do not list written files");
  for (const auto& [name, entry] : commands()) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("config", config_path, "JSON run configuration")->required();
    sub->add_option("-o,--out", out_dir, "output directory");
    sub->add_option("-j,--workers", workers, "worker threads")->check(CLI::Range(1, 256));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();

  std::vector<OutputFile> files;
  try {
    const RunConfig cfg = parse_config(text.str());
    files = commands().at(name).first(CommandContext{cfg, workers});
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  for (const OutputFile& f : files) {
    const auto path = std::filesystem::path(out_dir) / f.name;
    std::ofstream out(path, std::ios::binary);
    out << f.content;
    if (!out) {
      std::cerr << "error: cannot write " << path.string() << "\n";
      return 1;
    }
    if (!quiet) std::cout << path.string() << "\n";
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"gaplabel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace gaplabel::cli
