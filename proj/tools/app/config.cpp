#include "config.hpp"

#include "qtoa/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qtoa::app {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"packet", {"q0", "p0", "delta", "mass"}},
      {"barrier", {"type", "V", "a", "d", "offset", "steps", "extent_widths"}},
      {"detector", {"x", "y", "path_length"}},
      {"grid", {"t_min", "t_max", "time_points", "momentum_nodes", "width_sigmas"}},
      {"channel", {"name"}},
      {"flags", {"two_term_amplitudes", "emit_phase_time", "emit_approx_profile"}},
      {"sweep", {"heights", "a_min", "a_max", "a_points"}},
      {"portrait", {"energies", "samples", "extent_widths"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, const std::string& raw) {
  const std::string text = trim(raw);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError(field, "expected a number, got '" + raw + "'");
  if (!std::isfinite(v))
    throw ConfigError(field, "must be finite");
  return v;
}

std::size_t parse_count(const std::string& field, const std::string& raw) {
  const std::string text = trim(raw);
  unsigned long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError(field, "expected a non-negative integer, got '" + raw + "'");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& field, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "true" || text == "1" || text == "yes" || text == "on")
    return true;
  if (text == "false" || text == "0" || text == "no" || text == "off")
    return false;
  throw ConfigError(field, "expected true or false, got '" + raw + "'");
}

std::vector<double> parse_list(const std::string& field, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_double(field, item));
  if (out.empty())
    throw ConfigError(field, "expected a comma-separated list of numbers");
  return out;
}

// Boost's INI reader only knows whole-line ';' comments. Drop '#' lines and
// cut trailing comments that follow whitespace.
std::string strip_comments(const std::string& text) {
  std::stringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    if (trim(line).starts_with('#'))
      continue;
    for (std::size_t i = 1; i < line.size(); ++i)
      if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.erase(i);
        break;
      }
    out += line;
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string barrier_type_name(BarrierType t) {
  switch (t) {
  case BarrierType::none: return "none";
  case BarrierType::square: return "square";
  case BarrierType::sech2: return "sech2";
  }
  return "none";
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::stringstream ss(strip_comments(text));
    pt::read_ini(ss, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }

  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      if (body.empty())
        throw ConfigError(section, "keys must appear inside a [section]");
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, node] : body) {
      const std::string field = section + "." + key;
      if (!known->second.contains(key))
        throw ConfigError(field, "unknown key");
      const std::string v = node.data();
      if (section == "packet") {
        const double d = parse_double(field, v);
        if (key == "q0") c.packet.q0 = d;
        else if (key == "p0") c.packet.p0 = d;
        else if (key == "delta") c.packet.delta = d;
        else c.packet.mass = d;
      } else if (section == "barrier") {
        if (key == "type") {
          const std::string t = trim(v);
          if (t == "none") c.barrier.type = BarrierType::none;
          else if (t == "square") c.barrier.type = BarrierType::square;
          else if (t == "sech2") c.barrier.type = BarrierType::sech2;
          else throw ConfigError(field, "expected none, square or sech2");
        } else if (key == "steps") {
          c.barrier.steps = static_cast<int>(parse_count(field, v));
        } else {
          const double d = parse_double(field, v);
          if (key == "V") c.barrier.height = d;
          else if (key == "a") c.barrier.width = d;
          else if (key == "d") c.barrier.smooth_width = d;
          else if (key == "offset") c.barrier.offset = d;
          else c.barrier.extent_widths = d;
        }
      } else if (section == "detector") {
        const double d = parse_double(field, v);
        if (key == "x") c.detector.x = d;
        else if (key == "y") c.detector.y = d;
        else c.detector.path_length = d;
      } else if (section == "grid") {
        if (key == "t_min") c.grid.t_min = parse_double(field, v);
        else if (key == "t_max") c.grid.t_max = parse_double(field, v);
        else if (key == "time_points") c.grid.time_points = parse_count(field, v);
        else if (key == "momentum_nodes") c.grid.momentum_nodes = parse_count(field, v);
        else c.grid.width_sigmas = parse_double(field, v);
      } else if (section == "channel") {
        const auto ch = parse_channel(trim(v));
        if (!ch)
          throw ConfigError(field, "expected one of r+, l+, r-, l-");
        c.channel = *ch;
      } else if (section == "flags") {
        const bool b = parse_bool(field, v);
        if (key == "two_term_amplitudes") c.flags.two_term_amplitudes = b;
        else if (key == "emit_phase_time") c.flags.emit_phase_time = b;
        else c.flags.emit_approx_profile = b;
      } else if (section == "sweep") {
        if (key == "heights") c.sweep.heights = parse_list(field, v);
        else if (key == "a_points") c.sweep.a_points = parse_count(field, v);
        else if (key == "a_min") c.sweep.a_min = parse_double(field, v);
        else c.sweep.a_max = parse_double(field, v);
      } else {
        if (key == "energies") c.portrait.energies = parse_list(field, v);
        else if (key == "samples") c.portrait.samples = parse_count(field, v);
        else c.portrait.extent_widths = parse_double(field, v);
      }
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("--config", "cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  if (!(c.packet.mass > 0.0)) throw ConfigError("packet.mass", "must be positive");
  if (!(c.packet.delta > 0.0)) throw ConfigError("packet.delta", "must be positive");
  if (c.barrier.height < 0.0) throw ConfigError("barrier.V", "must be non-negative");
  if (c.barrier.width < 0.0) throw ConfigError("barrier.a", "must be non-negative");
  if (!(c.barrier.smooth_width > 0.0)) throw ConfigError("barrier.d", "must be positive");
  if (c.barrier.steps < 1) throw ConfigError("barrier.steps", "must be at least 1");
  if (!(c.barrier.extent_widths > 0.0))
    throw ConfigError("barrier.extent_widths", "must be positive");
  if (c.detector.y && c.detector.path_length)
    throw ConfigError("detector.path_length", "give either y or path_length, not both");
  if (c.grid.time_points < 3) throw ConfigError("grid.time_points", "must be at least 3");
  if (c.grid.momentum_nodes < 2)
    throw ConfigError("grid.momentum_nodes", "must be at least 2");
  if (!(c.grid.width_sigmas > 0.0))
    throw ConfigError("grid.width_sigmas", "must be positive");
  if (c.grid.t_min.has_value() != c.grid.t_max.has_value())
    throw ConfigError("grid.t_max", "t_min and t_max must be given together");
  if (c.grid.t_min && !(*c.grid.t_max > *c.grid.t_min))
    throw ConfigError("grid.t_max", "must exceed t_min");
  if (!(c.sweep.a_max >= c.sweep.a_min) || c.sweep.a_min < 0.0)
    throw ConfigError("sweep.a_max", "need 0 <= a_min <= a_max");
  if (c.sweep.a_points < 1) throw ConfigError("sweep.a_points", "must be at least 1");
  for (double h : c.sweep.heights)
    if (h < 0.0) throw ConfigError("sweep.heights", "heights must be non-negative");
  if (c.portrait.samples < 3) throw ConfigError("portrait.samples", "must be at least 3");
  for (double e : c.portrait.energies)
    if (!(e > 0.0)) throw ConfigError("portrait.energies", "energies must be positive");
  if (!(c.portrait.extent_widths > 0.0))
    throw ConfigError("portrait.extent_widths", "must be positive");
}

nlohmann::ordered_json echo(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["packet"] = {{"q0", c.packet.q0}, {"p0", c.packet.p0},
                 {"delta", c.packet.delta}, {"mass", c.packet.mass}};
  j["barrier"] = {{"type", barrier_type_name(c.barrier.type)},
                  {"V", c.barrier.height},
                  {"a", c.barrier.width},
                  {"d", c.barrier.smooth_width},
                  {"offset", c.barrier.offset},
                  {"steps", c.barrier.steps},
                  {"extent_widths", c.barrier.extent_widths}};
  j["detector"] = {{"x", optional_number(c.detector.x)},
                   {"y", optional_number(c.detector.y)},
                   {"path_length", optional_number(c.detector.path_length)}};
  j["grid"] = {{"t_min", optional_number(c.grid.t_min)},
               {"t_max", optional_number(c.grid.t_max)},
               {"time_points", c.grid.time_points},
               {"momentum_nodes", c.grid.momentum_nodes},
               {"width_sigmas", c.grid.width_sigmas}};
  j["channel"] = {{"name", c.channel ? nlohmann::ordered_json(to_string(*c.channel))
                                     : nlohmann::ordered_json(nullptr)}};
  j["flags"] = {{"two_term_amplitudes", c.flags.two_term_amplitudes},
                {"emit_phase_time", c.flags.emit_phase_time},
                {"emit_approx_profile", c.flags.emit_approx_profile}};
  j["sweep"] = {{"heights", c.sweep.heights},
                {"a_min", c.sweep.a_min},
                {"a_max", c.sweep.a_max},
                {"a_points", c.sweep.a_points}};
  j["portrait"] = {{"energies", c.portrait.energies},
                   {"samples", c.portrait.samples},
                   {"extent_widths", c.portrait.extent_widths}};
  return j;
}

GaussianPacket make_packet(const ExperimentConfig& c) {
  return GaussianPacket(c.packet.q0, c.packet.p0, c.packet.delta, c.packet.mass);
}

PiecewiseBarrier make_barrier(const ExperimentConfig& c) {
  const double m = c.packet.mass;
  switch (c.barrier.type) {
  case BarrierType::none:
    return PiecewiseBarrier::free(m);
  case BarrierType::square:
    return PiecewiseBarrier::square(c.barrier.height, c.barrier.width, m,
                                    c.barrier.offset);
  case BarrierType::sech2: {
    const SmoothBarrier smooth = make_smooth_barrier(c);
    const double half = c.barrier.extent_widths * smooth.width;
    const double centre = c.barrier.offset;
    return PiecewiseBarrier::staircase(
        [&](double q) { return smooth.potential(q - centre); }, centre - half,
        centre + half, c.barrier.steps, m);
  }
  }
  return PiecewiseBarrier::free(m);
}

SmoothBarrier make_smooth_barrier(const ExperimentConfig& c) {
  if (c.barrier.type != BarrierType::sech2)
    throw ConfigError("barrier.type", "this command needs type = sech2");
  if (!(c.barrier.height > 0.0))
    throw ConfigError("barrier.V", "a sech2 barrier needs V > 0");
  return SmoothBarrier(c.barrier.height, c.barrier.smooth_width, c.packet.mass);
}

EngineSettings make_settings(const ExperimentConfig& c, unsigned threads) {
  EngineSettings s;
  s.width_sigmas = c.grid.width_sigmas;
  s.momentum_nodes = c.grid.momentum_nodes;
  s.two_term = c.flags.two_term_amplitudes;
  s.threads = threads;
  return s;
}

double resolve_detector(const ExperimentConfig& c, const PiecewiseBarrier& barrier,
                        Channel channel) {
  if (detector_side_for(channel) == DetectorSide::right_of_barrier) {
    if (!c.detector.x)
      throw ConfigError("detector.x", "required for channel " + to_string(channel));
    return *c.detector.x;
  }
  if (c.detector.y)
    return *c.detector.y;
  if (c.detector.path_length) {
    const double sl = barrier.support_left();
    return sl - (*c.detector.path_length - (sl - c.packet.q0));
  }
  throw ConfigError("detector.y",
                    "required (or detector.path_length) for channel " +
                        to_string(channel));
}

TimeGrid resolve_time_grid(const ExperimentConfig& c, const Packet& packet,
                           const PiecewiseBarrier& barrier, double detector,
                           Channel channel) {
  if (c.grid.t_min)
    return {*c.grid.t_min, *c.grid.t_max, c.grid.time_points};
  return default_time_grid(packet, barrier, detector, channel, c.grid.time_points);
}

} // namespace qtoa::app
