#include "pdm/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>

#include "pdm/errors.hpp"

namespace pdm {

std::string_view to_string(CaseKind k) { return k == CaseKind::poiseuille ? "poiseuille" : "moving_disk"; }

CaseKind case_kind_from_string(std::string_view name) {
  if (name == "poiseuille") return CaseKind::poiseuille;
  if (name == "moving_disk") return CaseKind::moving_disk;
  throw InvalidArgument("unknown case type '" + std::string(name) + "'");
}

CaseConfig default_config(CaseKind kind) {
  CaseConfig c;
  c.kind = kind;
  if (kind == CaseKind::moving_disk) {
    c.name = "moving_disk";
    c.fluid.nu = 0.01;
    c.end_time = 2.0 * c.disk.descent / c.disk.speed;
    c.probe = {0.25, 1.0};
  }
  return c;
}

void CaseConfig::check() const {
  fluid.check();
  if (!(dt > 0.0) || !(end_time > 0.0)) throw InvalidArgument("dt and end_time must be positive");
  const double slabs = end_time / dt;
  if (std::abs(slabs - std::round(slabs)) > 1e-12 * std::max(1.0, slabs)) {
    throw InvalidArgument("dt does not divide end_time");
  }
  if (!(activation_depth >= 0.0 && activation_depth < 1.0)) throw InvalidArgument("activation_depth must be in [0, 1)");
  if (!(stiffening_exponent >= 0.0)) throw InvalidArgument("stiffening_exponent must be >= 0");
  if (output.vtk_stride < 0) throw InvalidArgument("vtk_stride must be >= 0");
  if (kind == CaseKind::poiseuille) {
    const auto& ch = channel;
    if (!(ch.length > 0.0) || !(ch.height > 0.0) || ch.nx < 2 || ch.ny < 2) throw InvalidArgument("invalid channel");
    if (method == UpdateMethod::pd_dmum && ch.phantom_layers < 1) throw InvalidArgument("pd_dmum needs phantom layers");
    if (!(ch.period > 0.0)) throw InvalidArgument("motion period must be positive");
    if (!(probe.x >= 0.0 && probe.x <= ch.length && probe.y > 0.0 && probe.y < ch.height)) {
      throw InvalidArgument("probe lies outside the channel");
    }
  } else {
    const auto& g = disk.geometry;
    if (!(disk.speed > 0.0) || !(disk.descent >= 0.0)) throw InvalidArgument("invalid disk script");
    if (!(probe.x > 0.0 && probe.x < g.width && probe.y > 0.0 && probe.y < g.height) ||
        distance(probe, g.disk_center) <= g.disk_radius) {
      throw InvalidArgument("probe lies outside the fluid");
    }
    if (g.disk_center.y - disk.descent - g.disk_radius <= g.height / g.ny) {
      throw InvalidArgument("disk descent leaves less than one element row above the container bottom");
    }
  }
}

namespace {

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InvalidArgument("key '" + key + "': not a number: '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidArgument("key '" + key + "': not an integer: '" + text + "'");
  return static_cast<int>(v);
}

using Setter = std::function<void(CaseConfig&, const std::string& key, const std::string& value)>;

Setter real(double CaseConfig::*field) {
  return [field](CaseConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); };
}
template <class F>
Setter real(F&& access) {
  return [access](CaseConfig& c, const std::string& k, const std::string& v) { access(c) = to_double(k, v); };
}
template <class F>
Setter integer(F&& access) {
  return [access](CaseConfig& c, const std::string& k, const std::string& v) { access(c) = to_int(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"case.type", [](CaseConfig&, const std::string&, const std::string&) {}},
      {"case.name", [](CaseConfig& c, const std::string&, const std::string& v) { c.name = v; }},
      {"case.method",
       [](CaseConfig& c, const std::string&, const std::string& v) { c.method = update_method_from_string(v); }},
      {"channel.length", real([](CaseConfig& c) -> double& { return c.channel.length; })},
      {"channel.height", real([](CaseConfig& c) -> double& { return c.channel.height; })},
      {"channel.nx", integer([](CaseConfig& c) -> int& { return c.channel.nx; })},
      {"channel.ny", integer([](CaseConfig& c) -> int& { return c.channel.ny; })},
      {"channel.phantom_layers", integer([](CaseConfig& c) -> int& { return c.channel.phantom_layers; })},
      {"channel.inflow_velocity", real([](CaseConfig& c) -> double& { return c.channel.inflow_velocity; })},
      {"channel.amplitude", real([](CaseConfig& c) -> double& { return c.channel.amplitude; })},
      {"channel.period", real([](CaseConfig& c) -> double& { return c.channel.period; })},
      {"container.width", real([](CaseConfig& c) -> double& { return c.disk.geometry.width; })},
      {"container.height", real([](CaseConfig& c) -> double& { return c.disk.geometry.height; })},
      {"container.nx", integer([](CaseConfig& c) -> int& { return c.disk.geometry.nx; })},
      {"container.ny", integer([](CaseConfig& c) -> int& { return c.disk.geometry.ny; })},
      {"container.phantom_layers", integer([](CaseConfig& c) -> int& { return c.disk.geometry.phantom_layers; })},
      {"container.disk_radius", real([](CaseConfig& c) -> double& { return c.disk.geometry.disk_radius; })},
      {"container.disk_x", real([](CaseConfig& c) -> double& { return c.disk.geometry.disk_center.x; })},
      {"container.disk_y", real([](CaseConfig& c) -> double& { return c.disk.geometry.disk_center.y; })},
      {"container.block_half_cells", integer([](CaseConfig& c) -> int& { return c.disk.geometry.block_half_cells; })},
      {"container.ogrid_layers", integer([](CaseConfig& c) -> int& { return c.disk.geometry.ogrid_layers; })},
      {"container.speed", real([](CaseConfig& c) -> double& { return c.disk.speed; })},
      {"container.descent", real([](CaseConfig& c) -> double& { return c.disk.descent; })},
      {"fluid.rho", real([](CaseConfig& c) -> double& { return c.fluid.rho; })},
      {"fluid.nu", real([](CaseConfig& c) -> double& { return c.fluid.nu; })},
      {"time.dt", real(&CaseConfig::dt)},
      {"time.end_time", real(&CaseConfig::end_time)},
      {"time.average_after", real(&CaseConfig::average_after)},
      {"probe.x", real([](CaseConfig& c) -> double& { return c.probe.x; })},
      {"probe.y", real([](CaseConfig& c) -> double& { return c.probe.y; })},
      {"numerics.activation_depth", real(&CaseConfig::activation_depth)},
      {"numerics.stiffening_exponent", real(&CaseConfig::stiffening_exponent)},
      {"numerics.linear_solver",
       [](CaseConfig& c, const std::string&, const std::string& v) {
         c.newton.linear.method = solver_method_from_string(v);
       }},
      {"numerics.newton_rtol", real([](CaseConfig& c) -> double& { return c.newton.rtol; })},
      {"numerics.newton_atol", real([](CaseConfig& c) -> double& { return c.newton.atol; })},
      {"numerics.newton_max_iterations", integer([](CaseConfig& c) -> int& { return c.newton.max_iterations; })},
      {"output.directory", [](CaseConfig& c, const std::string&, const std::string& v) { c.output.directory = v; }},
      {"output.vtk_stride", integer([](CaseConfig& c) -> int& { return c.output.vtk_stride; })},
  };
  return table;
}

}  // namespace

CaseConfig parse_case_config(std::istream& is) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(is);
  } catch (const CLI::Error& e) {
    throw InvalidArgument(std::string("malformed configuration: ") + e.what());
  }
  CaseConfig cfg;
  bool first = true;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key;
    for (const auto& p : item.parents) key += p + ".";
    key += item.name;
    const auto it = setters().find(key);
    if (it == setters().end()) throw InvalidArgument("unknown configuration key '" + key + "'");
    if (item.inputs.size() != 1) throw InvalidArgument("key '" + key + "' needs exactly one value");
    if (key == "case.type") {
      if (!first) throw InvalidArgument("[case] type must be the first key");
      cfg = default_config(case_kind_from_string(item.inputs[0]));
    }
    first = false;
    it->second(cfg, key, item.inputs[0]);
  }
  cfg.check();
  return cfg;
}

CaseConfig load_case_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open configuration " + path.string());
  return parse_case_config(in);
}

void write_case_config(const CaseConfig& c, std::ostream& os) {
  os << std::setprecision(17);
  os << "[case]\ntype = " << to_string(c.kind) << "\nname = " << c.name << "\nmethod = " << to_string(c.method)
     << "\n\n";
  if (c.kind == CaseKind::poiseuille) {
    const auto& ch = c.channel;
    os << "[channel]\nlength = " << ch.length << "\nheight = " << ch.height << "\nnx = " << ch.nx
       << "\nny = " << ch.ny << "\nphantom_layers = " << ch.phantom_layers << "\ninflow_velocity = "
       << ch.inflow_velocity << "\namplitude = " << ch.amplitude << "\nperiod = " << ch.period << "\n\n";
  } else {
    const auto& g = c.disk.geometry;
    os << "[container]\nwidth = " << g.width << "\nheight = " << g.height << "\nnx = " << g.nx << "\nny = " << g.ny
       << "\nphantom_layers = " << g.phantom_layers << "\ndisk_radius = " << g.disk_radius
       << "\ndisk_x = " << g.disk_center.x << "\ndisk_y = " << g.disk_center.y
       << "\nblock_half_cells = " << g.block_half_cells << "\nogrid_layers = " << g.ogrid_layers
       << "\nspeed = " << c.disk.speed << "\ndescent = " << c.disk.descent << "\n\n";
  }
  os << "[fluid]\nrho = " << c.fluid.rho << "\nnu = " << c.fluid.nu << "\n\n";
  os << "[time]\ndt = " << c.dt << "\nend_time = " << c.end_time << "\naverage_after = " << c.average_after
     << "\n\n";
  os << "[probe]\nx = " << c.probe.x << "\ny = " << c.probe.y << "\n\n";
  os << "[numerics]\nactivation_depth = " << c.activation_depth << "\nstiffening_exponent = "
     << c.stiffening_exponent << "\nlinear_solver = " << to_string(c.newton.linear.method)
     << "\nnewton_rtol = " << c.newton.rtol << "\nnewton_atol = " << c.newton.atol
     << "\nnewton_max_iterations = " << c.newton.max_iterations << "\n";
  if (!c.output.directory.empty() || c.output.vtk_stride > 0) {
    os << "\n[output]\n";
    if (!c.output.directory.empty()) os << "directory = " << c.output.directory.string() << "\n";
    os << "vtk_stride = " << c.output.vtk_stride << "\n";
  }
}

}  // namespace pdm
