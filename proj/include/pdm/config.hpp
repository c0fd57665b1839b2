#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pdm/flow.hpp"
#include "pdm/mesh.hpp"
#include "pdm/pd_dmum.hpp"

namespace pdm {

enum class CaseKind { poiseuille, moving_disk };

std::string_view to_string(CaseKind k);
CaseKind case_kind_from_string(std::string_view name);

struct ChannelSetup {
  double length = 2.2;
  double height = 0.4;
  int nx = 44;
  int ny = 8;
  int phantom_layers = 3;
  double inflow_velocity = 2.5;  // centreline value of the parabolic profile
  double amplitude = 0.1;        // vertical amplitude of the driving section
  double period = 8.0;
};

struct DiskSetup {
  ContainerDiskGeometry geometry;
  double speed = 0.5;    // descent speed, the return runs at the same speed
  double descent = 1.0;  // distance travelled before the reversal
};

struct OutputSetup {
  std::filesystem::path directory;  // empty: no files
  int vtk_stride = 0;               // 0: no snapshots
};

struct CaseConfig {
  CaseKind kind = CaseKind::poiseuille;
  std::string name = "poiseuille";
  UpdateMethod method = UpdateMethod::pd_dmum;
  ChannelSetup channel;
  DiskSetup disk;
  FluidProperties fluid;
  double dt = 0.02;
  double end_time = 8.0;
  double average_after = 0.5;  // probe errors before this time are startup transient
  Vec2 probe{1.1, 0.2};
  double activation_depth = 0.5;
  double stiffening_exponent = 0.0;
  NewtonConfig newton;
  OutputSetup output;

  /// dt must divide end_time and the probe must lie inside the fluid at t = 0.
  void check() const;
};

CaseConfig default_config(CaseKind kind);

/// Sectioned key = value text. Unknown sections or keys are errors. The [case] type key, if
/// present, must come first since it selects the defaults the other keys override.
CaseConfig parse_case_config(std::istream& is);
CaseConfig load_case_config(const std::filesystem::path& path);
void write_case_config(const CaseConfig& cfg, std::ostream& os);

}  // namespace pdm
