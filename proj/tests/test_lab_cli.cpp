#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "magnls/config.hpp"
#include "magnls/experiments.hpp"
#include "magnls/report.hpp"
#include "magnls/snapshot.hpp"
#include "test_support.hpp"

using namespace magnls;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("magnls_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("empty config gives limit-model defaults") {
  const LabConfig c = parse_config("");
  CHECK(c.sim.model == ModelKind::limit_nls);
  CHECK(c.sim.dt == 1e-3);
  CHECK(c.sim.sigma == 1);
  CHECK(c.sim.cutoff_degree == 8);
  CHECK(c.sim.axial_points == 64);
  CHECK(c.epsilons.size() == 4);
}

TEST_CASE("eps model default step follows epsilon") {
  const LabConfig c = parse_config("epsilon=0.1 model=eps_nls");
  CHECK(c.sim.model == ModelKind::eps_nls);
  CHECK(c.sim.dt == doctest::Approx(5e-4).epsilon(1e-14));
  const LabConfig d = parse_config("model = eps_nls\nepsilon = 0.1\ndt = 1e-4\n");
  CHECK(d.sim.dt == 1e-4);
}

TEST_CASE("config rejects bad input with the key named") {
  CHECK_THROWS_WITH_AS(parse_config("sigma=5"), doctest::Contains("sigma"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("colour = red"), doctest::Contains("colour"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("lambda = 2"), doctest::Contains("lambda"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_config("model = eps_nls"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("N_z = abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("just words"), std::invalid_argument);
}

TEST_CASE("config sections, comments and lists") {
  const LabConfig c = parse_config(
      "# header\n[grid]\ncutoff = 4  # trailing\nN_z = 32\n[sweep]\nepsilons = 0.2, 0.1\n"
      "potential = cosine\nkappa = 2\npotential_amplitude = 0.5\ndata = g3 seed = 9\n");
  CHECK(c.sim.cutoff_degree == 4);
  CHECK(c.sim.axial_points == 32);
  CHECK(c.epsilons == std::vector<double>{0.2, 0.1});
  CHECK(c.sim.potential.kind == PotentialSpec::Kind::cosine);
  CHECK(c.sim.potential.kappa == 2.0);
  CHECK(c.sim.potential.amplitude == 0.5);
  CHECK(c.sim.initial.kind == InitialDataSpec::Kind::g3);
  CHECK(c.sim.initial.seed == 9);
  CHECK(canonical_config(c) == canonical_config(parse_config(
                                   "cutoff=4 N_z=32 epsilons=0.2,0.1 potential=cosine kappa=2 "
                                   "potential_amplitude=0.5 data=g3 seed=9")));
  CHECK(canonical_config(c) != canonical_config(parse_config("")));
}

TEST_CASE("snapshot round trip is bit exact") {
  const fs::path dir = scratch("snap");
  const auto disc = make_discretization(3, 8, 10.0, 16, PotentialSpec::zero());
  SpectralField u = testing::random_field(disc, 17);
  u.set_time(0.125);
  const std::string path = (dir / "u.mnls").string();
  write_snapshot(u, path);
  const SpectralField v = read_snapshot(path, disc);
  CHECK(v.data() == u.data());
  CHECK(v.time() == 0.125);
  const SpectralField w = read_snapshot(path);
  CHECK(w.data() == u.data());
  CHECK(w.disc().cutoff() == 3);
  CHECK(fs::file_size(path) == 4 + 4 * 3 + 8 * 2 + 16 * disc->mode_count() * 16);

  const auto other = make_discretization(4, 10, 10.0, 16, PotentialSpec::zero());
  CHECK_THROWS_AS(read_snapshot(path, other), std::runtime_error);

  std::string bytes = slurp(path);
  bytes[0] = 'X';
  const std::string bad = (dir / "bad.mnls").string();
  std::ofstream(bad, std::ios::binary) << bytes;
  CHECK_THROWS_WITH_AS(read_snapshot(bad), doctest::Contains("magic"), std::runtime_error);
  std::ofstream(bad, std::ios::binary | std::ios::trunc) << slurp(path).substr(0, 100);
  CHECK_THROWS_AS(read_snapshot(bad), std::runtime_error);
  std::ofstream(bad, std::ios::binary | std::ios::trunc) << slurp(path) << "x";
  CHECK_THROWS_AS(read_snapshot(bad), std::runtime_error);
}

TEST_CASE("numbers, hashes and CSV files") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-12) == "1e-12");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(hex64(255).size() == 16);
  CHECK(utc_timestamp().back() == 'Z');

  const fs::path dir = scratch("csv");
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  write_csv(a, {"name", "value"}, std::vector<std::vector<std::string>>{{"x,y", "1"}, {"q\"t", "2"}});
  const auto rows = read_csv(a);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "x,y");
  CHECK(rows[2][0] == "q\"t");
  const std::vector<std::vector<double>> data{{0.0, 1.5}, {0.5, -2.25}};
  write_csv(a, {"t", "v"}, data);
  write_csv(b, {"t", "v"}, data);
  CHECK(slurp(a) == slurp(b));

  const std::string svg = (dir / "p.svg").string();
  write_svg_plot(svg, "t", "x", "y", {{"s", {1, 2, 3}, {1, 10, 100}}}, true, true);
  CHECK(slurp(svg).find("<svg") != std::string::npos);
}

TEST_CASE("manifest JSON") {
  RunManifest m;
  m.experiment = "selftest";
  m.config_hash = hex64(42);
  m.verdicts.push_back({"check", true, 1e-15, "<= 1e-12", ""});
  m.verdicts.push_back({"other", false, 2.0, ">= 3", "note"});
  CHECK_FALSE(m.all_passed());
  const auto j = nlohmann::json::parse(m.to_json());
  CHECK(j["experiment"] == "selftest");
  CHECK(j["verdicts"].size() == 2);
  CHECK(j["verdicts"][1]["passed"] == false);
}

TEST_CASE("experiment names and unknown experiments") {
  CHECK(experiment_names().size() == 5);
  CHECK_THROWS_AS(run_experiment("nope", parse_config(""), {}), std::invalid_argument);
}

TEST_CASE("converge with one epsilon reports insufficient points") {
  LabConfig c = parse_config(
      "cutoff = 2 N_z = 16 L_z = 12 T = 0.02 epsilons = 0.2 reference_dt = 0.01 "
      "sample_interval = 0.01 potential = harmonic");
  ExperimentOptions opt;
  opt.out_dir = scratch("conv1").string();
  const RunManifest m = run_experiment("converge", c, opt);
  bool found = false;
  for (const auto& v : m.verdicts) found |= v.detail == "insufficient points";
  CHECK(found);
  CHECK_FALSE(m.all_passed());
  CHECK(fs::exists(fs::path(opt.out_dir) / "manifest.json"));
}

TEST_CASE("conservation with focusing large data ends at the guard") {
  LabConfig c = parse_config(
      "cutoff = 3 N_z = 16 L_z = 12 T = 0.5 dt = 0.01 lambda = -1 sigma = 3 "
      "data = g2 data_amplitude = 40 potential = zero");
  ExperimentOptions opt;
  opt.out_dir = scratch("guard").string();
  const RunManifest m = run_experiment("conservation", c, opt);
  REQUIRE(m.verdicts.size() == 1);
  CHECK(m.verdicts[0].name == "guard tripped");
  CHECK_FALSE(m.verdicts[0].passed);
  CHECK(fs::exists(fs::path(opt.out_dir) / "conservation_dt.csv"));
}

TEST_CASE("experiment outputs are reproducible byte for byte") {
  LabConfig c = parse_config(
      "cutoff = 2 N_z = 16 L_z = 12 T = 0.05 dt = 0.01 data = g3 seed = 3 potential = harmonic");
  ExperimentOptions a, b;
  a.out_dir = scratch("rep_a").string();
  b.out_dir = scratch("rep_b").string();
  run_experiment("conservation", c, a);
  run_experiment("conservation", c, b);
  for (const char* f : {"conservation_dt.csv", "conservation_dt_half.csv", "conservation_drift.csv"}) {
    CHECK(slurp(fs::path(a.out_dir) / f) == slurp(fs::path(b.out_dir) / f));
  }
}

TEST_CASE("interaction-picture field is frozen without nonlinearity") {
  LabConfig c;
  c.sim.sigma = 4;
  c.sim.lambda = 0.0;
  c.sim.dt = 0.05;
  c.sim.cutoff_degree = 1;
  c.sim.axial_points = 32;
  c.sim.axial_length = 32.0;
  c.sim.potential = PotentialSpec::zero();
  c.scatter_time = 0.8;
  const ScatterStudy st = scatter_study(c);
  REQUIRE(st.increments.size() == 4);
  for (double inc : st.increments) CHECK(inc < 1e-13);
  CHECK(st.surrogate == doctest::Approx(c.scatter_delta));
}

TEST_CASE("critical-case studies reject other settings") {
  LabConfig c;
  c.sim.potential = PotentialSpec::zero();
  CHECK_THROWS_AS(scaling_study(c), std::invalid_argument);
  c.sim.sigma = 4;
  c.sim.potential = PotentialSpec::harmonic(1.0);
  CHECK_THROWS_AS(scatter_study(c), std::invalid_argument);
}
