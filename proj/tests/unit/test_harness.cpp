#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dimred/config.hpp"
#include "dimred/errors.hpp"
#include "dimred/harness.hpp"
#include "dimred/io.hpp"
#include "dimred/projectors.hpp"

using namespace dimred;

namespace {

std::string scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dimred_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

harness::ExperimentConfig small(const std::string& extra = "", const std::string& ns = "2, 3, 4") {
  const std::string base =
      "beta = 0.5\n"
      "gamma = 1\n"
      "ns = " + ns + "\n"
      "mx = 5\n"
      "my = 2\n"
      "sector_parity = 1\n"
      "t_final = 0.4\n"
      "dt = 0.2\n"
      "checkpoints = 2\n";
  return harness::ExperimentConfig::from(config::Config::parse(base + extra));
}

}  // namespace

// ------------------------------------------------------------------ config

TEST_CASE("config parses comments, lists and whitespace") {
  auto c = config::Config::parse("# header\n  a = 1.5  \nlist = 1, 2 ,3\n\nname = harmonic # trailing\n");
  CHECK(c.get_double("a") == 1.5);
  CHECK(c.get_ints("list") == std::vector<std::int64_t>{1, 2, 3});
  CHECK(c.get_string("name") == "harmonic");
  CHECK(c.get_double("missing", 7.0) == 7.0);
  CHECK_THROWS_AS(c.get_double("missing"), ConfigError);
  CHECK_THROWS_AS(c.get_int("a"), ConfigError);
  CHECK_THROWS_AS(c.get_bool("name", false), ConfigError);
}

TEST_CASE("config rejects malformed lines, duplicates and unknown keys") {
  CHECK_THROWS_AS(config::Config::parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(config::Config::parse("just words\n"), ConfigError);
  CHECK_THROWS_AS(config::Config::parse(" = 3\n"), ConfigError);
  auto c = config::Config::parse("a = 1\nb = 2\n");
  CHECK_NOTHROW(c.require_known({"a", "b", "c"}));
  CHECK_THROWS_AS(c.require_known({"a"}), ConfigError);
}

TEST_CASE("config hash ignores ordering, spacing and comments") {
  auto a = config::Config::parse("x = 1\ny = two\n");
  auto b = config::Config::parse("# c\ny=two\n   x   =   1\n");
  auto d = config::Config::parse("x = 1\ny = three\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != d.hash());
  CHECK(a.hash().size() == 16);
}

// ---------------------------------------------------------------------- io

TEST_CASE("csv output carries the hash line and round-trips doubles") {
  const auto text = io::format_csv("abc", {"x", "y"}, {{0.1, 1.0 / 3.0}, {-2.0, 1e-300}});
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# config_hash=abc");
  std::getline(in, line);
  CHECK(line == "x,y");
  std::getline(in, line);
  const auto comma = line.find(',');
  CHECK(std::stod(line.substr(0, comma)) == 0.1);
  CHECK(std::stod(line.substr(comma + 1)) == 1.0 / 3.0);
}

TEST_CASE("atomic writes leave no temp file behind") {
  const auto dir = scratch_dir("atomic");
  const auto path = dir + "/table.csv";
  io::write_csv(path, "h", {"a"}, {{1.0}});
  io::write_csv(path, "h", {"a"}, {{2.0}});
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
  CHECK(slurp(path) == io::format_csv("h", {"a"}, {{2.0}}));
}

TEST_CASE("state dumps round-trip through complex64") {
  const auto dir = scratch_dir("state");
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<std::complex<double>> v(37);
  for (auto& z : v) z = {g(rng), g(rng)};
  io::write_state(dir + "/s.bin", "feed", v, 2.5);
  const auto d = io::read_state(dir + "/s.bin");
  CHECK(d.config_hash == "feed");
  CHECK(d.count == v.size());
  CHECK(d.length == 2.5);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(d.values[i].real() == static_cast<float>(v[i].real()));
    CHECK(d.values[i].imag() == static_cast<float>(v[i].imag()));
  }
}

TEST_CASE("json reports gain the config hash") {
  const auto dir = scratch_dir("json");
  io::write_json(dir + "/r.json", "0123", {{"value", 1.5}});
  const auto j = nlohmann::json::parse(slurp(dir + "/r.json"));
  CHECK(j["config_hash"] == "0123");
  CHECK(j["value"] == 1.5);
}

// ------------------------------------------------------- experiment config

TEST_CASE("experiment config enforces its invariants") {
  CHECK_NOTHROW(small());
  CHECK_THROWS_AS(small("xi = 0.2\n"), ConfigError);       // beta/4 = 0.125
  CHECK_THROWS_AS(small("beta1 = 0.6\n"), ConfigError);    // > beta
  CHECK_THROWS_AS(small("profile = lumpy\n"), ConfigError);
  CHECK_THROWS_AS(small("confinement = box\n"), ConfigError);
  CHECK_THROWS_AS(small("external = storm\n"), ConfigError);
  CHECK_THROWS_AS(small("phi0 = square\n"), ConfigError);
  CHECK_THROWS_AS(small("points = 2:0.5\n"), ConfigError);  // together with gamma
  CHECK_THROWS_AS(small("colour = red\n"), ConfigError);
  CHECK_THROWS_AS(small("profile = csv\nprofile_file = /no/such/file.csv\n"), ConfigError);
  CHECK_THROWS_AS(harness::ExperimentConfig::from(config::Config::parse("beta = 0.5\npoints = 2:1.5\n")),
                  ConfigError);
}

TEST_CASE("explicit points parse and the hash ignores out_dir") {
  auto a = harness::ExperimentConfig::from(config::Config::parse("beta = 0.4\npoints = 2:0.5, 5:0.25\nout_dir = x\n"));
  auto b = harness::ExperimentConfig::from(config::Config::parse("beta = 0.4\npoints = 2:0.5, 5:0.25\nout_dir = y\n"));
  const auto seq = a.sequence();
  REQUIRE(seq.points.size() == 2);
  CHECK(seq.points[1].n_particles() == 5);
  CHECK(seq.points[1].epsilon() == 0.25);
  CHECK(a.hash == b.hash);
}

// ------------------------------------------------------------------ fits

TEST_CASE("fit_rate recovers constant and slope from synthetic rows") {
  std::vector<harness::SweepRow> rows;
  for (double r : {0.3, 0.7, 1.1, 2.0, 3.5}) {
    harness::SweepRow row;
    row.t = 0.5;
    row.rate = r;
    row.trace_distance = 2.0 * std::sqrt(r);
    rows.push_back(row);
    row.t = 0.0;  // earlier rows are ignored
    row.trace_distance = 1e-3;
    rows.push_back(row);
  }
  const auto f = harness::fit_rate(rows);
  CHECK(std::abs(f.slope - 1.0) < 1e-12);
  CHECK(std::abs(f.constant - 2.0) < 1e-12);
  CHECK(f.rows == 5);
  CHECK(f.t == 0.5);
}

TEST_CASE("fit_rate refuses degenerate input") {
  std::vector<harness::SweepRow> rows(5);
  for (auto& r : rows) {
    r.t = 1.0;
    r.rate = 1.0 + r.n;
  }
  try {
    harness::fit_rate(rows);
    FAIL("zero distances were fitted");
  } catch (const InsufficientDataError& e) {
    CHECK(std::string(e.what()).find("non-interacting") != std::string::npos);
  }
  rows.resize(3);
  for (auto& r : rows) r.trace_distance = 0.1;
  CHECK_THROWS_AS(harness::fit_rate(rows), InsufficientDataError);
  CHECK_THROWS_AS(harness::fit_rate({}), InsufficientDataError);
}

TEST_CASE("trend reads the latest time in sweep order") {
  std::vector<harness::SweepRow> rows;
  for (int n : {2, 3, 4}) {
    harness::SweepRow r;
    r.n = n;
    r.bridge_holds = true;
    r.t = 0.0;
    rows.push_back(r);
    r.t = 1.0;
    r.trace_distance = 1.0 / n;
    rows.push_back(r);
  }
  auto t = harness::trend(rows);
  CHECK(t.strictly_decreasing);
  CHECK(t.bridge_every_row);
  CHECK(t.ns == std::vector<std::int64_t>{2, 3, 4});
  rows.back().trace_distance = 0.5;
  rows.front().bridge_holds = false;
  t = harness::trend(rows);
  CHECK_FALSE(t.strictly_decreasing);
  CHECK_FALSE(t.bridge_every_row);
}

// ----------------------------------------------------------------- sweeps

TEST_CASE("non-interacting sweep keeps the product state") {
  auto cfg = small("profile = zero\nphi0 = cosine\nphi0_mode = 1\n");
  const auto res = harness::run_sweep(cfg, false);
  CHECK(res.failures.empty());
  REQUIRE(res.rows.size() == 9);
  for (const auto& r : res.rows) {
    CHECK(r.trace_distance < 1e-8);
    CHECK(r.excited_fraction < 1e-8);
    CHECK(r.bridge_holds);
  }
  CHECK(res.gamma_rows.empty());
  CHECK_THROWS_AS(harness::fit_rate(res.rows), InsufficientDataError);
}

TEST_CASE("interacting sweep rows satisfy the per-row invariants") {
  auto cfg = small("sector_momenta = 0\n");
  const auto res = harness::run_sweep(cfg, false);
  CHECK(res.failures.empty());
  REQUIRE(res.rows.size() == 9);
  for (const auto& r : res.rows) {
    const double n = static_cast<double>(r.n);
    CHECK(r.trace_distance >= 0.0);
    CHECK(r.trace_distance <= 2.0);
    CHECK(r.alpha_m >= 0.0);
    CHECK(r.alpha_xi >= 0.0);
    CHECK(r.energy_gap >= 0.0);
    CHECK(r.rate > 0.0);
    CHECK(r.bridge_holds);
    // sandwich in terms of alpha_xi
    CHECK(r.trace_distance <= std::sqrt(8.0 * r.alpha_xi) + 1e-12);
    CHECK(r.alpha_xi <= r.energy_gap + std::sqrt(r.trace_distance) + 0.5 * std::pow(n, -cfg.xi) + 1e-12);
    // a priori bound on transverse excitations
    CHECK(r.excited_ratio <= 1.0);
  }
  // at t = 0 the state is the prepared product
  CHECK(res.rows[0].t == 0.0);
  CHECK(res.rows[0].trace_distance < 1e-12);
  // energy mismatch of the product state is a 1/N effect
  CHECK(res.rows[6].energy_gap < res.rows[3].energy_gap);
  CHECK(res.rows[3].energy_gap < res.rows[0].energy_gap);
  const auto t = harness::trend(res.rows);
  CHECK(t.strictly_decreasing);
  CHECK(res.gamma_rows.size() == 3);
}

TEST_CASE("identical configs give byte-identical sweep tables") {
  auto cfg = small("sector_momenta = 0\n", "2, 3");
  auto table = [&] {
    const auto res = harness::run_sweep(cfg, false);
    std::vector<std::vector<double>> rows;
    for (const auto& r : res.rows) rows.push_back(r.values());
    return io::format_csv(cfg.hash, harness::SweepRow::columns(), rows);
  };
  CHECK(table() == table());
}

TEST_CASE("a point over the cap fails alone") {
  auto cfg = small("cap = 10\nsector_momenta = 0\n");
  const auto res = harness::run_sweep(cfg, false);
  // sector dimensions 6, 16, 45: only N = 2 fits
  CHECK(res.rows.size() == 3);
  REQUIRE(res.failures.size() == 2);
  for (const auto& f : res.failures) CHECK(f.size_cap);
}

TEST_CASE("two-body reduced density spot check") {
  // Tr|g1 - p| <= Tr|g2 - p(x)p| <= sqrt(8 alpha_n2) on an evolved state
  const auto p = scaling::ScalingPoint::make(3, 1.0 / 3.0, 0.5);
  auto cfg = small("sector_momenta = 0\n");
  const auto w = potentials::scale(cfg.make_profile(), p);
  const auto basis = manybody::ModeBasis::build(p, cfg.make_confinement(), cfg.make_external(), w, cfg.basis_options(p));
  const auto space = manybody::FockSpace::build(basis, 3, manybody::Sector{{0}, 0, 1});
  const auto phi = cfg.make_phi0();
  const auto c = manybody::condensate_coefficients(basis, phi);
  manybody::EvolveOptions o;
  o.dt = 0.5;
  o.t_final = 0.5;
  const auto psi = manybody::evolve(basis, space, manybody::product_state(space, c), o).final_state;
  const auto g1 = manybody::reduced_density_1(space, psi);
  const auto g2 = manybody::reduced_density_2(space, psi);
  const Eigen::Index m = c.size();
  Eigen::VectorXcd cc(m * m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) cc[a * m + b] = c[a] * c[b];
  const double d1 = manybody::trace_distance(g1, c);
  const double d2 = manybody::trace_distance(g2, cc);
  const auto dist = projectors::counting_distribution(space, psi, projectors::CondensateProjector::from_basis(basis, phi));
  const double a2 = projectors::alpha(dist, projectors::WeightFunction::n_squared(3));
  CHECK(d1 > 1e-4);
  CHECK(d1 <= d2 + 1e-12);
  CHECK(d2 <= std::sqrt(8.0 * a2) + 1e-12);
}

// ----------------------------------------------------------------- verify

TEST_CASE("verify-all reports a seeded negative weight") {
  auto ok = harness::verify_all(small("verify_modules = weights\n"), false);
  CHECK(ok.passed());
  auto bad = harness::verify_all(small("verify_modules = weights\ninject_fault = negative_weight\n"), false);
  CHECK_FALSE(bad.passed());
  const auto f = bad.failures();
  REQUIRE(f.size() == 1);
  CHECK(f[0].module == "weights");
  CHECK(f[0].name == "weights nonnegative");
  CHECK(f[0].measured == 0.25);
}

TEST_CASE("verify-all surfaces the auxiliary regime error") {
  auto rep = harness::verify_all(small("verify_modules = auxiliary\naux_n = 4\naux_beta = 0.01\n"), false);
  REQUIRE(rep.checks.size() == 1);
  CHECK_FALSE(rep.passed());
  CHECK(rep.checks[0].name.find("regime") != std::string::npos);
  CHECK(rep.checks[0].detail.find("mu") != std::string::npos);
}

TEST_CASE("verify-all passes the fast batteries on defaults") {
  auto rep = harness::verify_all(small("verify_modules = projectors, bridge, weights, nls, coupling\n"), false);
  for (const auto& c : rep.checks) {
    INFO(c.module << " / " << c.name << " measured " << c.measured);
    CHECK(c.passed);
  }
  CHECK(rep.checks.size() >= 12);
}
