#include <cmath>
#include <doctest.h>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/output.hpp"

#include "qtoa/errors.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qtoa;
using namespace qtoa::app;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qtoa_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const char* kTransmit = R"(
# reference packet, thin barrier
[packet]
q0 = -50
p0 = 2
delta = 10
mass = 1
[barrier]
type = square
V = 0.5
a = 4
[detector]
x = 50
[grid]
time_points = 801
)";

} // namespace

TEST_CASE("config defaults and echo") {
  const auto c = parse_config("[detector]\nx = 50\n");
  CHECK(c.packet.q0 == -50.0);
  CHECK(c.grid.momentum_nodes == 4096);
  const auto j = echo(c);
  CHECK(j["packet"]["delta"] == 10.0);
  CHECK(j["detector"]["x"] == 50.0);
  CHECK(j["detector"]["y"].is_null());
  CHECK(j["sweep"]["heights"].size() == 4);
  CHECK(j["flags"]["two_term_amplitudes"] == false);
}

TEST_CASE("trailing comments are ignored") {
  const auto c = parse_config("# header\n[packet]\nq0 = -40   ; centre\np0 = 3 # mean\n");
  CHECK(c.packet.q0 == -40.0);
  CHECK(c.packet.p0 == 3.0);
}

TEST_CASE("config errors name the offending field") {
  auto field_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.field;
    }
    return std::string("<none>");
  };
  CHECK(field_of("[packet]\ndelta = 0\n") == "packet.delta");
  CHECK(field_of("[packet]\ndelta = abc\n") == "packet.delta");
  CHECK(field_of("[packet]\nspin = 1\n") == "packet.spin");
  CHECK(field_of("[widget]\nx = 1\n") == "widget");
  CHECK(field_of("[packet]\nq0 = inf\n") == "packet.q0");
  CHECK(field_of("[barrier]\ntype = gaussian\n") == "barrier.type");
  CHECK(field_of("[channel]\nname = up\n") == "channel.name");
  CHECK(field_of("[grid]\nt_min = 5\n") == "grid.t_max");
  CHECK(field_of("[detector]\ny = 1\npath_length = 100\n") == "detector.path_length");
  CHECK_THROWS_AS(load_config("/nonexistent/qtoa.ini"), ConfigError);
}

TEST_CASE("reflection detector from a total path length") {
  const auto c = parse_config("[barrier]\nV = 1\na = 10\n[detector]\npath_length = 100\n");
  const auto b = make_barrier(c);
  CHECK(resolve_detector(c, b, Channel::l_minus()) == -50.0);
  const auto shifted =
      parse_config("[barrier]\nV = 1\na = 10\noffset = 5\n[detector]\npath_length = 100\n");
  CHECK(resolve_detector(shifted, make_barrier(shifted), Channel::l_minus()) == -40.0);
  CHECK_THROWS_AS(resolve_detector(c, b, Channel::r_minus()), ConfigError);
}

TEST_CASE("sech2 barriers become staircases for the quantum engine") {
  const auto c = parse_config("[barrier]\ntype = sech2\nV = 2\nd = 1.5\nsteps = 100\n");
  const auto b = make_barrier(c);
  CHECK(b.segments().size() == 100);
  // Even step count: the sample nearest the peak sits half a step off centre.
  const double h = 2.0 * 8.0 * 1.5 / 100.0;
  const double nearest = 2.0 / std::pow(std::cosh(0.5 * h / 1.5), 2);
  CHECK(b.max_height() == doctest::Approx(nearest).epsilon(1e-12));
  CHECK_THROWS_AS(make_smooth_barrier(parse_config("[barrier]\ntype = square\n")), ConfigError);
}

TEST_CASE("csv formatting is shortest round-trip with LF endings") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(49.93756505233695) == "49.93756505233695");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CsvTable t({"a", "b"});
  t.add_row({csv_cell(1.5), csv_text("x,y")});
  t.add_row({csv_cell(std::optional<double>{}), "z"});
  CHECK(t.str() == "a,b\n1.5,\"x,y\"\n,z\n");
  CHECK_THROWS(t.add_row({"only one"}));
}

TEST_CASE("transmit output is byte-identical across runs and thread counts") {
  const auto c = parse_config(kTransmit);
  const auto d1 = scratch("a"), d2 = scratch("b");
  run_transmit(c, {d1, OutputFormat::csv, 1});
  run_transmit(c, {d2, OutputFormat::csv, 3});
  const std::string csv = slurp(d1 / "transmit.csv");
  CHECK(csv == slurp(d2 / "transmit.csv"));
  CHECK(slurp(d1 / "transmit.json") == slurp(d2 / "transmit.json"));
  CHECK(csv.rfind("t,P\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);

  const auto j = nlohmann::json::parse(slurp(d1 / "transmit.json"));
  CHECK(j["config"]["barrier"]["V"] == 0.5);
  CHECK(j["summary"]["most_probable_toa"].get<double>() > 49.9377);
  CHECK(j["summary"]["predicted_toa"].is_number());
  CHECK(std::abs(j["summary"]["captured_mass"].get<double>() - 1.0) < 1e-3);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("json format carries the data columns") {
  const auto c = parse_config(kTransmit);
  const auto d = scratch("json");
  run_transmit(c, {d, OutputFormat::json, 1});
  CHECK_FALSE(fs::exists(d / "transmit.csv"));
  const auto j = nlohmann::json::parse(slurp(d / "transmit.json"));
  CHECK(j["data"]["t"].size() == 801);
  CHECK(j["data"]["P"].size() == 801);
  fs::remove_all(d);
}

TEST_CASE("reflect with nothing to reflect surfaces the engine error") {
  const auto c = parse_config("[barrier]\ntype = none\n[detector]\ny = -50\n");
  CHECK_THROWS_AS(run_reflect(c, {scratch("empty"), OutputFormat::csv, 1}), EmptyChannel);
}

TEST_CASE("sweep records per-point failures and keeps going") {
  const auto c = parse_config(
      "[detector]\nx = 50\n[sweep]\nheights = 0.5\na_min = 0\na_max = 2\na_points = 2\n"
      "[grid]\nmomentum_nodes = 512\n");
  const auto d = scratch("sweep");
  run_sweep(c, {d, OutputFormat::csv, 2});
  const std::string csv = slurp(d / "sweep.csv");
  CHECK(csv.rfind("V,a,most_probable_toa,predicted_toa,N2,error\n", 0) == 0);
  // 512 nodes cannot resolve the default window: each row carries the error.
  CHECK(csv.find("momentum grid too coarse") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("sweep a = 0 rows reproduce the free peak") {
  const auto c = parse_config(
      "[detector]\nx = 50\n[sweep]\nheights = 0.5, 4.5\na_min = 0\na_max = 0\na_points = 1\n");
  const auto d = scratch("sweep0");
  run_sweep(c, {d, OutputFormat::json, 1});
  const auto j = nlohmann::json::parse(slurp(d / "sweep.json"));
  const double free_peak = j["summary"]["free_most_probable_toa"];
  for (const auto& row : j["rows"])
    CHECK(row["most_probable_toa"].get<double>() == free_peak);
  fs::remove_all(d);
}

TEST_CASE("portrait rows carry channel labels and separatrix") {
  const auto c = parse_config(
      "[barrier]\ntype = sech2\nV = 1\nd = 1\n[portrait]\nenergies = 0.5, 2\nsamples = 11\n");
  const auto d = scratch("portrait");
  run_portrait(c, {d, OutputFormat::csv, 1});
  const std::string csv = slurp(d / "portrait.csv");
  CHECK(csv.rfind("trajectory_id,kind,channel_label,energy,q,p\n", 0) == 0);
  CHECK(csv.find(",trajectory,r+>l-,") != std::string::npos);
  CHECK(csv.find(",trajectory,r+>r-,") != std::string::npos);
  CHECK(csv.find(",separatrix,+p_V,1,0,0\n") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("selfcheck passes") {
  std::stringstream log;
  CHECK(run_selfcheck({scratch("self"), OutputFormat::csv, 2}, log) == 0);
  CHECK(log.str().find("FAIL") == std::string::npos);
}
