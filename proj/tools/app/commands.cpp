#include "commands.hpp"

#include "output.hpp"

#include "qtoa/analysis.hpp"
#include "qtoa/classical.hpp"
#include "qtoa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>

namespace qtoa::app {

namespace {

using json = nlohmann::ordered_json;

json nullable(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

void prepare_out_dir(const RunOptions& options) {
  std::filesystem::create_directories(options.out_dir);
}

// Writes table + summary according to the requested format.
void emit(const RunOptions& options, const std::string& stem,
          const CsvTable& table, const std::vector<std::string>& columns,
          const std::vector<std::vector<double>>& data, json document) {
  prepare_out_dir(options);
  if (options.format == OutputFormat::csv) {
    write_text(options.out_dir / (stem + ".csv"), table.str());
  } else {
    json cols = json::object();
    for (std::size_t i = 0; i < columns.size() && i < data.size(); ++i)
      cols[columns[i]] = data[i];
    document["data"] = std::move(cols);
  }
  write_json(options.out_dir / (stem + ".json"), document);
}

json distribution_summary(const ToaDistribution& d) {
  return {{"channel", to_string(d.channel)},
          {"detector", d.detector.position},
          {"N2", d.normalization_sq},
          {"mean_toa", d.mean_toa},
          {"most_probable_toa", d.most_probable_toa},
          {"captured_mass", d.captured_mass},
          {"t_min", d.times.front()},
          {"t_max", d.times.back()},
          {"time_points", d.times.size()}};
}

void add_preparation(json& summary, const GaussianPacket& packet) {
  const auto q = preparation_quality(packet);
  summary["preparation"] = {{"p0_delta", q.p0_delta},
                            {"delta_over_q0", nullable(q.delta_over_q0)},
                            {"negative_tail_weight", q.negative_tail_weight},
                            {"acceptable", q.acceptable},
                            {"issues", q.issues}};
}

void add_phase_time(json& summary, const GaussianPacket& packet,
                    const PiecewiseBarrier& barrier, double detector,
                    ScatteringChannel channel, const EngineSettings& settings) {
  try {
    const auto report =
        phase_time_prediction(packet, barrier, detector, channel, settings);
    summary["wigner_delay"] = report.wigner_delay;
    summary["predicted_toa"] = report.predicted_toa;
    summary["reference_free_toa"] = report.reference_free_toa;
  } catch (const SingularPhase& e) {
    summary["wigner_delay"] = nullptr;
    summary["predicted_toa"] = nullptr;
    summary["phase_time_error"] = e.what();
  }
}

struct DistributionRun {
  GaussianPacket packet;
  PiecewiseBarrier barrier;
  double detector;
  ToaDistribution dist;
};

DistributionRun compute_distribution(const ExperimentConfig& config,
                                     const RunOptions& options, Channel channel) {
  const auto packet = make_packet(config);
  const auto barrier = make_barrier(config);
  const double detector = resolve_detector(config, barrier, channel);
  make_detector(barrier, detector, detector_side_for(channel));
  const auto grid = resolve_time_grid(config, packet, barrier, detector, channel);
  const auto settings = make_settings(config, options.threads);
  auto dist = toa_distribution(packet, barrier, detector, channel, grid, settings);
  return {packet, barrier, detector, std::move(dist)};
}

void write_distribution(const std::string& command, const ExperimentConfig& config,
                        const RunOptions& options, const ToaDistribution& dist,
                        json summary,
                        const std::vector<std::optional<double>>* approx) {
  std::vector<std::string> header{"t", "P"};
  if (approx)
    header.push_back("approx_profile");
  CsvTable table(header);
  std::vector<std::vector<double>> data{dist.times, dist.density};
  std::vector<double> approx_json;
  for (std::size_t i = 0; i < dist.times.size(); ++i) {
    std::vector<std::string> row{csv_cell(dist.times[i]), csv_cell(dist.density[i])};
    if (approx) {
      row.push_back(csv_cell((*approx)[i]));
      approx_json.push_back((*approx)[i] ? *(*approx)[i] : std::nan(""));
    }
    table.add_row(std::move(row));
  }
  if (approx)
    data.push_back(approx_json);

  json document;
  document["command"] = command;
  document["config"] = echo(config);
  document["summary"] = std::move(summary);
  emit(options, command, table, header, data, std::move(document));
}

std::vector<std::optional<double>>
approx_profile_column(const DistributionRun& run, double path) {
  std::vector<std::optional<double>> raw(run.dist.times.size());
  std::vector<double> valid(run.dist.times.size(), 0.0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double t = run.dist.times[i];
    if (!(t > 0.0))
      continue;
    try {
      raw[i] = approx_reflection_profile(t, path, run.packet, run.barrier);
      valid[i] = *raw[i];
    } catch (const EvanescentWindow&) {
    } catch (const NoStationaryPoint&) {
    }
  }
  // Scaled to unit area over the window so it overlays the exact density.
  const double area = integrate_density(valid, run.dist.times);
  if (area > 0.0)
    for (auto& v : raw)
      if (v)
        *v /= area;
  return raw;
}

} // namespace

void run_transmit(const ExperimentConfig& config, const RunOptions& options) {
  const Channel channel = Channel::r_minus();
  const auto run = compute_distribution(config, options, channel);
  json summary = distribution_summary(run.dist);
  if (config.flags.emit_phase_time)
    add_phase_time(summary, run.packet, run.barrier, run.detector,
                   ScatteringChannel::transmission, make_settings(config, options.threads));
  add_preparation(summary, run.packet);
  write_distribution("transmit", config, options, run.dist, std::move(summary), nullptr);
}

void run_reflect(const ExperimentConfig& config, const RunOptions& options) {
  const Channel channel = Channel::l_minus();
  const auto run = compute_distribution(config, options, channel);
  const double wall = run.barrier.support_left();
  const double path = (wall - run.packet.q0()) + (wall - run.detector);

  json summary = distribution_summary(run.dist);
  summary["path_length"] = path;
  if (config.flags.emit_phase_time)
    add_phase_time(summary, run.packet, run.barrier, run.detector,
                   ScatteringChannel::reflection, make_settings(config, options.threads));
  if (run.barrier.is_single_square()) {
    try {
      const auto tb = two_bump_condition(run.barrier, run.packet.p0());
      summary["two_bump"] = {{"n_nearest", tb.n_nearest},
                             {"residual", tb.residual},
                             {"V_star", nullable(tb.v_star)},
                             {"interior_momentum", tb.interior_momentum},
                             {"dip_time", stationary_phase_time(
                                              run.packet.p0(), path, run.barrier,
                                              ScatteringChannel::reflection)}};
    } catch (const NotApplicable&) {
    }
  }
  add_preparation(summary, run.packet);

  if (config.flags.emit_approx_profile) {
    const auto approx = approx_profile_column(run, path);
    write_distribution("reflect", config, options, run.dist, std::move(summary), &approx);
  } else {
    write_distribution("reflect", config, options, run.dist, std::move(summary), nullptr);
  }
}

void run_incoming(const ExperimentConfig& config, const RunOptions& options) {
  const Channel channel = config.channel.value_or(Channel::r_plus());
  if (channel.selection != Selection::plus)
    throw ConfigError("channel.name", "incoming needs r+ or l+");
  const auto run = compute_distribution(config, options, channel);
  json summary = distribution_summary(run.dist);
  summary["classical_toa"] =
      run.packet.mass() * (run.detector - run.packet.q0()) / run.packet.p0();
  summary["two_term_amplitudes"] = config.flags.two_term_amplitudes;
  add_preparation(summary, run.packet);
  write_distribution("incoming", config, options, run.dist, std::move(summary), nullptr);
}

void run_sweep(const ExperimentConfig& config, const RunOptions& options) {
  const auto packet = make_packet(config);
  if (!config.detector.x)
    throw ConfigError("detector.x", "required for the transmission sweep");
  const double x = *config.detector.x;
  const double m = config.packet.mass;

  struct Point {
    double height;
    double width;
    std::optional<double> peak;
    std::optional<double> predicted;
    std::optional<double> n2;
    std::string error;
  };
  std::vector<Point> points;
  for (const double v : config.sweep.heights)
    for (std::size_t j = 0; j < config.sweep.a_points; ++j) {
      const double a = config.sweep.a_points == 1
                           ? config.sweep.a_min
                           : config.sweep.a_min + (config.sweep.a_max - config.sweep.a_min) *
                                                      static_cast<double>(j) /
                                                      static_cast<double>(config.sweep.a_points - 1);
      points.push_back({v, a, {}, {}, {}, {}});
    }

  EngineSettings settings = make_settings(config, 1);
  const auto free_barrier = PiecewiseBarrier::free(m);
  const auto free_grid =
      resolve_time_grid(config, packet, free_barrier, x, Channel::r_minus());
  // A failed reference only removes the prediction column; the barrier rows still run.
  std::optional<double> free_peak;
  std::string free_error;
  try {
    free_peak =
        toa_distribution(packet, free_barrier, x, Channel::r_minus(), free_grid, settings)
            .most_probable_toa;
  } catch (const Error& e) {
    free_error = e.what();
  }

  auto evaluate = [&](Point& pt) {
    try {
      const auto barrier = PiecewiseBarrier::square(pt.height, pt.width, m,
                                                    config.barrier.offset);
      const auto grid =
          resolve_time_grid(config, packet, barrier, x, Channel::r_minus());
      const auto dist =
          toa_distribution(packet, barrier, x, Channel::r_minus(), grid, settings);
      pt.peak = dist.most_probable_toa;
      pt.n2 = dist.normalization_sq;
      if (free_peak)
        pt.predicted =
            *free_peak + wigner_delay(barrier, packet.p0(), ScatteringChannel::transmission);
    } catch (const Error& e) {
      pt.error = e.what();
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(points.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < points.size(); i += workers)
          evaluate(points[i]);
      });
  }

  const std::vector<std::string> header{"V", "a", "most_probable_toa",
                                        "predicted_toa", "N2", "error"};
  CsvTable table(header);
  json rows = json::array();
  for (const auto& pt : points) {
    table.add_row({csv_cell(pt.height), csv_cell(pt.width), csv_cell(pt.peak),
                   csv_cell(pt.predicted), csv_cell(pt.n2), csv_text(pt.error)});
    rows.push_back({{"V", pt.height},
                    {"a", pt.width},
                    {"most_probable_toa", nullable(pt.peak)},
                    {"predicted_toa", nullable(pt.predicted)},
                    {"N2", nullable(pt.n2)},
                    {"error", pt.error.empty() ? json(nullptr) : json(pt.error)}});
  }

  json document;
  document["command"] = "sweep";
  document["config"] = echo(config);
  document["summary"] = {{"free_most_probable_toa", nullable(free_peak)},
                         {"points", points.size()}};
  if (!free_error.empty())
    document["summary"]["free_reference_error"] = free_error;
  prepare_out_dir(options);
  if (options.format == OutputFormat::csv)
    write_text(options.out_dir / "sweep.csv", table.str());
  else
    document["rows"] = std::move(rows);
  write_json(options.out_dir / "sweep.json", document);
}

void run_portrait(const ExperimentConfig& config, const RunOptions& options) {
  const auto barrier = make_smooth_barrier(config);
  const auto portrait = phase_portrait(barrier, config.portrait.energies,
                                       config.portrait.samples,
                                       config.portrait.extent_widths);

  const std::vector<std::string> header{"trajectory_id", "kind", "channel_label",
                                        "energy", "q", "p"};
  CsvTable table(header);
  json trajectories = json::array();
  for (std::size_t id = 0; id < portrait.trajectories.size(); ++id) {
    const auto& tr = portrait.trajectories[id];
    const std::string label = to_string(tr.incoming) + ">" + to_string(tr.outgoing);
    json qs = json::array(), ps = json::array();
    for (const auto& pt : tr.samples) {
      table.add_row({std::to_string(id), "trajectory", label, csv_cell(tr.energy),
                     csv_cell(pt.q), csv_cell(pt.p)});
      qs.push_back(pt.q);
      ps.push_back(pt.p);
    }
    trajectories.push_back({{"id", id},
                            {"channel_label", label},
                            {"energy", tr.energy},
                            {"reflected", tr.reflected},
                            {"q", qs},
                            {"p", ps}});
  }
  const std::size_t sep_plus = portrait.trajectories.size();
  json separatrix = json::object();
  for (const auto& [id, name, pts] :
       {std::tuple{sep_plus, std::string("+p_V"), &portrait.separatrix_plus},
        std::tuple{sep_plus + 1, std::string("-p_V"), &portrait.separatrix_minus}}) {
    json qs = json::array(), ps = json::array();
    for (const auto& pt : *pts) {
      table.add_row({std::to_string(id), "separatrix", name, csv_cell(barrier.height),
                     csv_cell(pt.q), csv_cell(pt.p)});
      qs.push_back(pt.q);
      ps.push_back(pt.p);
    }
    separatrix[name] = {{"q", qs}, {"p", ps}};
  }

  json document;
  document["command"] = "portrait";
  document["config"] = echo(config);
  document["summary"] = {{"trajectories", portrait.trajectories.size()},
                         {"V", barrier.height},
                         {"d", barrier.width}};
  prepare_out_dir(options);
  if (options.format == OutputFormat::csv) {
    write_text(options.out_dir / "portrait.csv", table.str());
  } else {
    document["trajectories"] = std::move(trajectories);
    document["separatrix"] = std::move(separatrix);
  }
  write_json(options.out_dir / "portrait.json", document);
}

int run_selfcheck(const RunOptions& options, std::ostream& log) {
  int failures = 0;
  json results = json::array();
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    log << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    results.push_back({{"check", name}, {"pass", ok}, {"detail", detail}});
    if (!ok)
      ++failures;
  };
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      report(name, false, std::string("threw: ") + e.what());
    }
  };

  guarded("flux-unitarity", [&] {
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> hv(0.01, 10.0), ha(0.01, 20.0), hp(0.01, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const auto b = PiecewiseBarrier::square(hv(rng), ha(rng), 1.0);
      const auto sc = scattering_coefficients(b, hp(rng));
      worst = std::max(worst, std::abs(std::norm(sc.T) + std::norm(sc.R) - 1.0));
    }
    report("flux-unitarity", worst < 1e-10, "max |T|^2+|R|^2-1 = " + format_double(worst));
  });

  guarded("reflection-zeros", [&] {
    const double v = 1.0, a = 3.0;
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n) {
      const double kp = n * std::numbers::pi / a;
      const double p = std::sqrt(kp * kp + 2.0 * v);
      worst = std::max(worst, std::abs(
          scattering_coefficients(PiecewiseBarrier::square(v, a, 1.0), p).R));
    }
    report("reflection-zeros", worst < 1e-8, "max |R| = " + format_double(worst));
  });

  guarded("eigenstate-continuity", [&] {
    const auto b = PiecewiseBarrier::square(1.5, 4.0, 1.0);
    double worst = 0.0;
    for (double e : {0.4, 1.5 + 1e-3, 3.0})
      for (Channel c : {Channel::r_plus(), Channel::l_plus(), Channel::r_minus(),
                        Channel::l_minus()})
        worst = std::max(worst, wavefunction_continuity_check(b, e, c));
    report("eigenstate-continuity", worst < 1e-9, "max mismatch = " + format_double(worst));
  });

  const GaussianPacket packet(-50.0, 2.0, 10.0, 1.0);
  EngineSettings settings;
  settings.threads = options.threads;

  guarded("free-peak", [&] {
    const auto free = PiecewiseBarrier::free(1.0);
    const auto grid = default_time_grid(packet, free, 50.0, Channel::r_minus());
    const auto d = toa_distribution(packet, free, 50.0, Channel::r_minus(), grid, settings);
    report("free-peak", std::abs(d.most_probable_toa - 49.9377) <= 0.005,
           "most probable toa = " + format_double(d.most_probable_toa));
    report("free-normalization", std::abs(d.captured_mass - 1.0) <= 1e-3,
           "integral = " + format_double(d.captured_mass));
  });

  guarded("channel-budget", [&] {
    const auto b = PiecewiseBarrier::square(1.125, 4.0, 1.0);
    const double total = normalization_sq(packet, b, Channel::r_minus(), settings).exact +
                         normalization_sq(packet, b, Channel::l_minus(), settings).exact;
    report("channel-budget", std::abs(total - 1.0) <= 1e-8,
           "N2(r-) + N2(l-) = " + format_double(total));
  });

  guarded("classical-toa", [&] {
    const auto b = PiecewiseBarrier::square(0.5, 10.0, 1.0);
    const double t = classical_toa(b, -50.0, 2.0, 50.0);
    const double closed = 45.0 + 10.0 / std::sqrt(3.0);
    report("classical-toa", std::abs(t - closed) <= 1e-9, "t = " + format_double(t));
  });

  if (!options.out_dir.empty()) {
    prepare_out_dir(options);
    write_json(options.out_dir / "selfcheck.json",
               json{{"command", "selfcheck"}, {"failures", failures}, {"checks", results}});
  }
  return failures;
}

} // namespace qtoa::app
