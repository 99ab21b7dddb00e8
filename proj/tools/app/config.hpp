#pragma once

#include "qtoa/classical.hpp"
#include "qtoa/scattering.hpp"
#include "qtoa/toa.hpp"
#include "qtoa/wavepacket.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtoa::app {

// Bad or inconsistent configuration. `field` is the section.key path.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field(std::move(field)) {}
  std::string field;
};

enum class BarrierType { none, square, sech2 };

struct PacketConfig {
  double q0 = -50.0;
  double p0 = 2.0;
  double delta = 10.0;
  double mass = 1.0;
};

struct BarrierConfig {
  BarrierType type = BarrierType::square;
  double height = 0.0;      // V
  double width = 0.0;       // a (square)
  double smooth_width = 1.0; // d (sech2)
  double offset = 0.0;
  int steps = 400;          // staircase resolution of a sech2 barrier
  double extent_widths = 8.0;
};

struct DetectorConfig {
  std::optional<double> x;
  std::optional<double> y;
  std::optional<double> path_length;
};

struct GridConfig {
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::size_t time_points = kDefaultTimePoints;
  std::size_t momentum_nodes = 4096;
  double width_sigmas = 8.0;
};

struct FlagsConfig {
  bool two_term_amplitudes = false;
  bool emit_phase_time = true;
  bool emit_approx_profile = false;
};

struct SweepConfig {
  std::vector<double> heights{0.5, 1.125, 3.125, 4.5};
  double a_min = 0.0;
  double a_max = 10.0;
  std::size_t a_points = 11;
};

struct PortraitConfig {
  std::vector<double> energies{0.25, 0.5, 0.75, 1.25, 1.5, 2.0};
  std::size_t samples = 201;
  double extent_widths = 5.0;
};

struct ExperimentConfig {
  PacketConfig packet;
  BarrierConfig barrier;
  DetectorConfig detector;
  GridConfig grid;
  std::optional<Channel> channel;
  FlagsConfig flags;
  SweepConfig sweep;
  PortraitConfig portrait;
};

// Reads an INI file. Unknown sections or keys, unparsable values and
// non-finite numbers raise ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

// Checks physical preconditions that do not depend on the subcommand.
void validate(const ExperimentConfig& config);

// The fully resolved configuration, defaults included.
nlohmann::ordered_json echo(const ExperimentConfig& config);

GaussianPacket make_packet(const ExperimentConfig& config);
PiecewiseBarrier make_barrier(const ExperimentConfig& config);
SmoothBarrier make_smooth_barrier(const ExperimentConfig& config);
EngineSettings make_settings(const ExperimentConfig& config, unsigned threads);

// Detector position for a channel. Reflection accepts a total path length
// instead of y: y = s_l - (path - (s_l - q0)), s_l the left barrier edge.
double resolve_detector(const ExperimentConfig& config,
                        const PiecewiseBarrier& barrier, Channel channel);

TimeGrid resolve_time_grid(const ExperimentConfig& config, const Packet& packet,
                           const PiecewiseBarrier& barrier, double detector,
                           Channel channel);

} // namespace qtoa::app
