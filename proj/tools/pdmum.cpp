// Command line driver: runs configured cases, convergence studies, and mesh checks.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "pdm/cases.hpp"
#include "pdm/errors.hpp"
#include "pdm/mesh_io.hpp"

namespace {

struct CommonOptions {
  std::string output_dir;
  std::optional<int> vtk_stride;
  std::optional<std::string> method;
  std::optional<unsigned> seed;  // reserved: every run is deterministic
};

pdm::CaseConfig load(const std::string& path, const CommonOptions& opt) {
  auto cfg = pdm::load_case_config(path);
  if (!opt.output_dir.empty()) cfg.output.directory = opt.output_dir;
  if (opt.vtk_stride) cfg.output.vtk_stride = *opt.vtk_stride;
  if (opt.method) cfg.method = pdm::update_method_from_string(*opt.method);
  cfg.check();
  return cfg;
}

int run(const std::string& path, const CommonOptions& opt) {
  const auto cfg = load(path, opt);
  const auto res = pdm::try_run_case(cfg);
  const double avg = res.probe.time_average(cfg.average_after);
  std::cout << "slabs completed: " << res.slabs.size() << "\n";
  if (cfg.kind == pdm::CaseKind::poiseuille) std::cout << "time-averaged relative error: " << avg << "\n";
  std::cout << "activated: " << res.activated << "  deactivated: " << res.deactivated
            << "  ring shifts: " << res.ring_shifts << "\n";
  std::cout << "minimum active element quality: " << res.min_quality << "\n";
  if (res.halted) {
    spdlog::error("{}", *res.halted);
    return 1;
  }
  return 0;
}

int converge(const std::string& path, int levels, const CommonOptions& opt) {
  const auto cfg = load(path, opt);
  const auto table = pdm::convergence_study(cfg, levels);
  pdm::write_convergence_csv(table, std::cout);
  if (!cfg.output.directory.empty()) {
    std::ofstream out(cfg.output.directory / "convergence.csv");
    pdm::write_convergence_csv(table, out);
  }
  if (table.halted) {
    spdlog::error("{}", *table.halted);
    return 1;
  }
  return 0;
}

int validate_mesh(const std::string& path) {
  const auto mesh = pdm::load_mesh(path);
  const auto report = pdm::validate(mesh);
  std::cout << mesh.nodes.size() << " nodes, " << mesh.elements.size() << " elements, "
            << mesh.boundary_edges.size() << " boundary edges, " << mesh.ring_links.size() << " ring links\n";
  if (!report.empty()) {
    std::cout << report.summary() << "\n";
    return 1;
  }
  std::cout << "mesh is valid\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phantom-domain mesh update and space-time flow solver"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions opt;
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output-dir", opt.output_dir, "Directory for CSV and VTK outputs");
    sub->add_option("--vtk-stride", opt.vtk_stride, "Write a VTK snapshot every K slabs (0: none)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--method", opt.method, "Mesh update method")->check(CLI::IsMember({"pd_dmum", "emum_only"}));
    sub->add_option("--seed", opt.seed, "Reserved; runs are deterministic");
  };

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run the case described by a configuration file");
  run_cmd->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  add_common(run_cmd);

  int levels = 3;
  auto* conv_cmd = app.add_subcommand("converge", "Mesh refinement study of a channel configuration");
  conv_cmd->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  conv_cmd->add_option("--levels", levels, "Number of refinement levels")->check(CLI::Range(3, 8));
  add_common(conv_cmd);

  std::string mesh_path;
  auto* mesh_cmd = app.add_subcommand("validate-mesh", "Check a mesh file for inverted or non-manifold elements");
  mesh_cmd->add_option("mesh", mesh_path, "Mesh file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run_cmd) return run(config_path, opt);
    if (*conv_cmd) return converge(config_path, levels, opt);
    if (*mesh_cmd) return validate_mesh(mesh_path);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
