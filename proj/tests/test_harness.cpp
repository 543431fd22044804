#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "finegrain/errors.hpp"
#include "finegrain/harness.hpp"
#include "finegrain/inifile.hpp"
#include "finegrain/losses.hpp"
#include "finegrain/model.hpp"

using namespace finegrain;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case; lives under the test binary's CWD.
fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::path("harness_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

bool mentions(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

// A fast experiment: tiny clusters, short training, one comparison arm.
ExperimentConfig tiny_experiment(const fs::path& out_dir) {
  ExperimentConfig cfg = default_experiment_config();
  cfg.data.synth.n_negative = 40;
  cfg.data.synth.n_typical_pos = 40;
  cfg.data.synth.n_atypical_pos = 20;
  cfg.data.synth.n_uncertain = 20;
  cfg.train_template.iterations = 200;
  cfg.train_template.checkpoint_every = 100;
  cfg.train_template.batch_size = 16;
  cfg.methods = {MethodSpec{"pu-rm", ObjectiveConfig{}}};
  cfg.seeds = {7};
  cfg.output_dir = out_dir.string();
  return cfg;
}

const ResultRow& find_row(const ResultsTable& table, const std::string& method,
                          const std::string& metric) {
  for (const ResultRow& row : table.rows)
    if (row.method == method && row.metric == metric) return row;
  REQUIRE_MESSAGE(false, "row not found: " << method << "/" << metric);
  static ResultRow unreachable;
  return unreachable;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sectioned key-value files

TEST_CASE("ini parse: sections, comments, folding, line numbers") {
  const std::string text =
      "# leading comment\n"
      "[Alpha]\n"
      "KEY = Value With Case\n"
      "\n"
      "list = 1 2 3   # trailing comment\n"
      "[beta]\n"
      "key = 0.5\n";
  const IniFile ini = IniFile::parse(text, "mem");
  CHECK(ini.origin() == "mem");
  CHECK(ini.section_names() == std::vector<std::string>{"alpha", "beta"});
  CHECK(ini.has_section("alpha"));
  CHECK_FALSE(ini.has_section("gamma"));

  const IniEntry* e = ini.find("alpha", "key");
  REQUIRE(e != nullptr);
  CHECK(e->key == "key");            // keys fold to lower case
  CHECK(e->value == "Value With Case");  // values keep their case
  CHECK(e->line == 3);

  const IniEntry* lst = ini.find("alpha", "list");
  REQUIRE(lst != nullptr);
  CHECK(lst->line == 5);
  CHECK(ini_double_list(*lst) == std::vector<double>{1.0, 2.0, 3.0});

  CHECK(ini.section_entries("alpha").size() == 2);
  CHECK(ini.require("beta", "key") == "0.5");
}

TEST_CASE("ini parse: duplicate keys and stray entries rejected") {
  try {
    IniFile::parse("[s]\na = 1\na = 2\n", "dup.cfg");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(mentions(e, "dup.cfg"));
    CHECK(mentions(e, "2"));  // line of the first definition
    CHECK(mentions(e, "a"));
  }
  CHECK_THROWS_AS(IniFile::parse("key = 1\n[s]\n", "mem"), ParseError);
  CHECK_THROWS_AS(IniFile::parse("[s]\nno equals sign\n", "mem"), ParseError);
}

TEST_CASE("ini require: missing key names section and origin") {
  const IniFile ini = IniFile::parse("[s]\na = 1\n", "cfg");
  try {
    ini.require("s", "missing");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(mentions(e, "cfg"));
    CHECK(mentions(e, "s"));
    CHECK(mentions(e, "missing"));
  }
}

TEST_CASE("ini typed getters: conversions and failure context") {
  const IniFile ini = IniFile::parse(
      "[t]\n"
      "i = -12\n"
      "u = 18446744073709551615\n"
      "d = 2.5e-1\n"
      "bad = xyz\n"
      "negu = -1\n",
      "types.cfg");
  CHECK(ini_int(*ini.find("t", "i")) == -12);
  CHECK(ini_u64(*ini.find("t", "u")) == 18446744073709551615ull);
  CHECK(ini_double(*ini.find("t", "d")) == doctest::Approx(0.25));

  try {
    ini_double(*ini.find("t", "bad"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(mentions(e, "types.cfg:5"));
  }
  CHECK_THROWS_AS(ini_u64(*ini.find("t", "negu")), ParseError);
  CHECK_THROWS_AS(ini_int(*ini.find("t", "bad")), ParseError);
}

// ---------------------------------------------------------------------------
// Experiment config loading

TEST_CASE("config round-trip: canonical text reproduces the default config") {
  const fs::path dir = scratch_dir("roundtrip");
  const fs::path path = dir / "experiment.cfg";
  spit(path.string(), default_experiment_config_text());

  const ExperimentConfig loaded = load_experiment_config(path.string());
  const ExperimentConfig def = default_experiment_config();

  CHECK(loaded.seeds == def.seeds);
  CHECK(loaded.output_dir == def.output_dir);
  CHECK(loaded.data.synthetic == def.data.synthetic);
  CHECK(loaded.data.val_seed == def.data.val_seed);
  CHECK(loaded.data.synth.n_negative == def.data.synth.n_negative);
  CHECK(loaded.data.synth.n_typical_pos == def.data.synth.n_typical_pos);
  CHECK(loaded.data.synth.n_atypical_pos == def.data.synth.n_atypical_pos);
  CHECK(loaded.data.synth.n_uncertain == def.data.synth.n_uncertain);
  for (int i = 0; i < 2; ++i) {
    CHECK(loaded.data.synth.negative_mean[i] == def.data.synth.negative_mean[i]);
    CHECK(loaded.data.synth.typical_pos_mean[i] == def.data.synth.typical_pos_mean[i]);
    CHECK(loaded.data.synth.atypical_pos_mean[i] == def.data.synth.atypical_pos_mean[i]);
    CHECK(loaded.data.synth.uncertain_mean[i] == def.data.synth.uncertain_mean[i]);
  }
  CHECK(loaded.data.synth.stddev == def.data.synth.stddev);
  CHECK(loaded.data.synth.noise_rate == def.data.synth.noise_rate);
  CHECK(loaded.data.synth.seed == def.data.synth.seed);
  CHECK(loaded.train_template.layer_sizes == def.train_template.layer_sizes);
  CHECK(loaded.train_template.iterations == def.train_template.iterations);
  CHECK(loaded.train_template.batch_size == def.train_template.batch_size);
  CHECK(loaded.train_template.checkpoint_every == def.train_template.checkpoint_every);
  CHECK(loaded.train_template.adam.lr == def.train_template.adam.lr);

  REQUIRE(loaded.methods.size() == def.methods.size());
  for (std::size_t i = 0; i < loaded.methods.size(); ++i) {
    CHECK(loaded.methods[i].name == def.methods[i].name);
    CHECK(loaded.methods[i].objective.strategy == def.methods[i].objective.strategy);
    CHECK(loaded.methods[i].objective.tau.value() == def.methods[i].objective.tau.value());
    CHECK(loaded.methods[i].objective.lambda == def.methods[i].objective.lambda);
  }
}

TEST_CASE("config load: unknown keys and sections carry origin and line") {
  const fs::path dir = scratch_dir("unknown");
  const fs::path bad_key = dir / "bad_key.cfg";
  spit(bad_key.string(),
       "[data]\n"
       "bogus = 1\n"
       "[method.m]\n"
       "strategy = pu-rm\n");
  try {
    load_experiment_config(bad_key.string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(mentions(e, "bad_key.cfg:2"));
    CHECK(mentions(e, "bogus"));
    CHECK(mentions(e, "data"));
  }

  const fs::path bad_section = dir / "bad_section.cfg";
  spit(bad_section.string(), "[mystery]\nx = 1\n");
  try {
    load_experiment_config(bad_section.string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(mentions(e, "unknown section"));
    CHECK(mentions(e, "mystery"));
  }

  const fs::path no_methods = dir / "no_methods.cfg";
  spit(no_methods.string(), "[data]\nsource = synth\n");
  CHECK_THROWS_AS(load_experiment_config(no_methods.string()), ParseError);
}

TEST_CASE("config load: method sections set objective knobs") {
  const fs::path dir = scratch_dir("methods");
  const fs::path path = dir / "m.cfg";
  spit(path.string(),
       "[method.a]\n"
       "strategy = u-uniform\n"
       "lambda = 0.7\n"
       "noise_loss = gce\n"
       "q = 0.5\n"
       "[method.b]\n"
       "strategy = pu-rm\n"
       "tau = 0.4\n");
  const ExperimentConfig cfg = load_experiment_config(path.string());
  REQUIRE(cfg.methods.size() == 2);
  CHECK(cfg.methods[0].name == "a");
  CHECK(cfg.methods[0].objective.strategy == Strategy::UUniform);
  CHECK(cfg.methods[0].objective.lambda == doctest::Approx(0.7));
  CHECK(cfg.methods[0].objective.noise_loss == NoiseLoss::GCE);
  CHECK(cfg.methods[0].objective.q.value() == doctest::Approx(0.5));
  CHECK(cfg.methods[1].objective.strategy == Strategy::PuRm);
  CHECK(cfg.methods[1].objective.tau.value() == doctest::Approx(0.4));

  const fs::path bad = dir / "bad_strategy.cfg";
  spit(bad.string(), "[method.a]\nstrategy = nonsense\n");
  CHECK_THROWS_AS(load_experiment_config(bad.string()), ParseError);
}

TEST_CASE("experiment validation: names, duplicates, lambda") {
  ExperimentConfig cfg = default_experiment_config();
  cfg.methods[0].name = "Bad Name";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = default_experiment_config();
  cfg.methods[1].name = cfg.methods[0].name;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = default_experiment_config();
  cfg.seeds = {3, 3};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = default_experiment_config();
  cfg.methods[0].objective.lambda = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = default_experiment_config();
  cfg.methods.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

// ---------------------------------------------------------------------------
// Results formatting and atomic writes

TEST_CASE("results CSV: fixed schema, six decimals, sorted rows") {
  ResultsTable table;
  table.seeds = {1, 2};
  table.rows = {
      ResultRow{"b-method", "auc_fg", 0.5, 0.1, {0.4, 0.6}},
      ResultRow{"a-method", "final_train_loss", 1.0 / 3.0, 0.0, {1.0 / 3.0, 1.0 / 3.0}},
  };
  // Formatting does not reorder; run_experiment emits pre-sorted rows.
  const std::string csv = format_results_csv(table);
  const std::vector<std::string> lines = split_lines(csv);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "method,metric,mean,std,seed_1,seed_2");
  CHECK(lines[1] == "b-method,auc_fg,0.500000,0.100000,0.400000,0.600000");
  CHECK(lines[2] == "a-method,final_train_loss,0.333333,0.000000,0.333333,0.333333");
}

TEST_CASE("atomic writes: content lands, no temp residue, overwrite works") {
  const fs::path dir = scratch_dir("atomic");
  const fs::path path = dir / "out.txt";
  write_text_atomic(path.string(), "first\n");
  CHECK(slurp(path.string()) == "first\n");
  write_text_atomic(path.string(), "second\n");
  CHECK(slurp(path.string()) == "second\n");

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    (void)entry;
    ++files;
  }
  CHECK(files == 1);  // no leftover temp files
}

// ---------------------------------------------------------------------------
// Loss-curve table

TEST_CASE("loss curves: tangent point, endpoints, shared tail") {
  const fs::path dir = scratch_dir("losscurves");
  const fs::path path = dir / "curves.csv";
  emit_loss_curves({0.3, 0.5}, 0.01, path.string());

  const std::vector<std::string> lines = split_lines(slurp(path.string()));
  REQUIRE(lines.size() == 101);  // header + 100 grid rows
  CHECK(lines[0] == "s,ce,pce_tau_0.3,pce_tau_0.5");

  std::map<std::string, std::vector<std::string>> by_s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> cells = split_csv(lines[i]);
    REQUIRE(cells.size() == 4);
    by_s[cells[0]] = cells;
  }

  // At the fold point s = tau the relaxed loss meets plain cross-entropy.
  const std::vector<std::string>& at_tau = by_s.at("0.300000");
  CHECK(at_tau[1] == at_tau[2]);
  CHECK(std::stod(at_tau[1]) == doctest::Approx(1.20397).epsilon(1e-5));

  // Final row is exactly s = 1 and every loss vanishes there.
  const std::vector<std::string> last = split_csv(lines.back());
  CHECK(last[0] == "1.000000");
  CHECK(std::stod(last[1]) == 0.0);
  CHECK(std::stod(last[2]) == 0.0);
  CHECK(std::stod(last[3]) == 0.0);

  // At the grid minimum the relaxed loss respects its bound while plain
  // cross-entropy blows past it.
  const std::vector<std::string>& first = by_s.at("0.010000");
  const double bound = 1.0 - std::log(0.3);
  CHECK(std::stod(first[2]) <= bound + 1e-9);
  CHECK(std::stod(first[1]) > bound);

  // Above each tau the relaxed column is identical to the plain one.
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> cells = split_csv(lines[i]);
    const double s = std::stod(cells[0]);
    if (s >= 0.3) CHECK(cells[2] == cells[1]);
    if (s >= 0.5) CHECK(cells[3] == cells[1]);
  }
}

TEST_CASE("loss curves: invalid grids rejected") {
  const fs::path dir = scratch_dir("losscurves_bad");
  const std::string path = (dir / "x.csv").string();
  CHECK_THROWS_AS(emit_loss_curves({0.3}, 0.0, path), ConfigError);
  CHECK_THROWS_AS(emit_loss_curves({0.3}, 0.3, path), ConfigError);  // does not divide 1
  CHECK_THROWS_AS(emit_loss_curves({}, 0.1, path), ConfigError);
}

// ---------------------------------------------------------------------------
// Decision-surface lattice

TEST_CASE("boundary grid: zero model is flat at one half, shape is square") {
  const fs::path dir = scratch_dir("boundary_zero");
  Checkpoint ck;
  ck.params.sizes = {2, 2};
  ck.params.weights = {std::vector<double>(4, 0.0)};
  ck.params.biases = {std::vector<double>(2, 0.0)};
  ck.adam = AdamState::init(ck.params, AdamHyper{});
  const fs::path ckpt = dir / "zero.ckpt";
  save_checkpoint(ck, ckpt.string());

  const fs::path out = dir / "grid.csv";
  emit_boundary_grid(ckpt.string(), {-1.0, 1.0, -1.0, 1.0}, 5, out.string());
  const std::vector<std::string> lines = split_lines(slurp(out.string()));
  REQUIRE(lines.size() == 1 + 5 * 5);
  CHECK(lines[0] == "x,y,p_pos");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> cells = split_csv(lines[i]);
    REQUIRE(cells.size() == 3);
    CHECK(cells[2] == "0.500000");
  }
  // y varies slowest: the first row of cells spans x at fixed minimum y.
  CHECK(split_csv(lines[1])[0] == "-1.000000");
  CHECK(split_csv(lines[1])[1] == "-1.000000");
  CHECK(split_csv(lines[2])[0] == "-0.500000");
  CHECK(split_csv(lines[2])[1] == "-1.000000");
}

TEST_CASE("boundary grid: non-planar models and bad lattices rejected") {
  const fs::path dir = scratch_dir("boundary_bad");
  Checkpoint ck;
  ck.params.sizes = {3, 2};
  ck.params.weights = {std::vector<double>(6, 0.0)};
  ck.params.biases = {std::vector<double>(2, 0.0)};
  ck.adam = AdamState::init(ck.params, AdamHyper{});
  const fs::path ckpt = dir / "three_d.ckpt";
  save_checkpoint(ck, ckpt.string());
  const std::string out = (dir / "grid.csv").string();
  CHECK_THROWS_AS(emit_boundary_grid(ckpt.string(), {-1, 1, -1, 1}, 5, out), InvalidInputError);

  Checkpoint flat;
  flat.params.sizes = {2, 2};
  flat.params.weights = {std::vector<double>(4, 0.0)};
  flat.params.biases = {std::vector<double>(2, 0.0)};
  flat.adam = AdamState::init(flat.params, AdamHyper{});
  const fs::path ok = dir / "ok.ckpt";
  save_checkpoint(flat, ok.string());
  CHECK_THROWS_AS(emit_boundary_grid(ok.string(), {-1, 1, -1, 1}, 1, out), ConfigError);
  CHECK_THROWS_AS(emit_boundary_grid(ok.string(), {1, -1, -1, 1}, 5, out), ConfigError);
  CHECK_THROWS_AS(emit_boundary_grid((dir / "missing.ckpt").string(), {-1, 1, -1, 1}, 5, out),
                  ParseError);
}

// ---------------------------------------------------------------------------
// Experiment runner

TEST_CASE("run experiment: layout, aggregation, and byte-identical reruns") {
  const fs::path dir = scratch_dir("run_tiny");
  const ExperimentConfig cfg = tiny_experiment(dir / "out");
  const ResultsTable table = run_experiment(cfg);

  REQUIRE(table.seeds == std::vector<std::uint64_t>{7});
  const ResultRow& auc_row = find_row(table, "pu-rm", "auc_fg");
  REQUIRE(auc_row.per_seed.size() == 1);
  CHECK(auc_row.std_dev == 0.0);  // single seed
  CHECK(auc_row.mean == auc_row.per_seed[0]);
  CHECK(auc_row.mean >= 0.0);
  CHECK(auc_row.mean <= 1.0);
  const ResultRow& loss_row = find_row(table, "pu-rm", "final_train_loss");
  CHECK(loss_row.mean >= 0.0);

  const fs::path run_dir = dir / "out" / "runs" / "pu-rm" / "seed_7";
  CHECK(fs::exists(dir / "out" / "results.csv"));
  CHECK(fs::exists(run_dir / "best.ckpt"));
  CHECK(fs::exists(run_dir / "final.ckpt"));
  CHECK(fs::exists(run_dir / "log.txt"));

  // The CSV on disk matches the in-memory table.
  CHECK(slurp((dir / "out" / "results.csv").string()) == format_results_csv(table));

  // A rerun into a fresh directory reproduces the CSV byte for byte.
  ExperimentConfig again = cfg;
  again.output_dir = (dir / "out2").string();
  run_experiment(again);
  CHECK(slurp((dir / "out" / "results.csv").string()) ==
        slurp((dir / "out2" / "results.csv").string()));

  // Every artifact stays under the configured output directories.
  std::size_t stray = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name != "out" && name != "out2") ++stray;
  }
  CHECK(stray == 0);
}

TEST_CASE("run experiment: rows come back sorted by method then metric") {
  const fs::path dir = scratch_dir("run_sorted");
  ExperimentConfig cfg = tiny_experiment(dir / "out");
  cfg.methods = {
      MethodSpec{"zeta", ObjectiveConfig{}},
      MethodSpec{"alpha", ObjectiveConfig{}},
  };
  const ResultsTable table = run_experiment(cfg);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.rows[0].method == "alpha");
  CHECK(table.rows[0].metric == "auc_fg");
  CHECK(table.rows[1].method == "alpha");
  CHECK(table.rows[1].metric == "final_train_loss");
  CHECK(table.rows[2].method == "zeta");
  CHECK(table.rows[3].method == "zeta");

  // Identical objectives under different names train identically.
  CHECK(find_row(table, "alpha", "auc_fg").mean == find_row(table, "zeta", "auc_fg").mean);
}

TEST_CASE("tau sweep: one arm per tau plus the baseline") {
  const fs::path dir = scratch_dir("sweep");
  ExperimentConfig base = tiny_experiment(dir / "out");
  const ResultsTable table = emit_tau_sweep(base, {0.1, 0.2});
  REQUIRE(table.rows.size() == 3);  // |taus| + 1
  CHECK(table.rows[0].method == "ce-baseline");
  CHECK(table.rows[1].method == "pu-rm@0.1");
  CHECK(table.rows[2].method == "pu-rm@0.2");
  for (const ResultRow& row : table.rows) CHECK(row.metric == "auc_fg");
  CHECK(fs::exists(dir / "out" / "tau_sweep.csv"));

  // A single tau reduces to a one-method experiment with the same numbers.
  const fs::path dir_single = scratch_dir("sweep_single");
  ExperimentConfig single_base = tiny_experiment(dir_single / "sweep_out");
  const ResultsTable sweep = emit_tau_sweep(single_base, {0.3});
  ExperimentConfig plain = tiny_experiment(dir_single / "run_out");
  plain.methods = {MethodSpec{"pu-rm@0.3", ObjectiveConfig{}}};
  plain.methods[0].objective.tau = TauParam{0.3};
  const ResultsTable direct = run_experiment(plain);
  CHECK(find_row(sweep, "pu-rm@0.3", "auc_fg").mean ==
        find_row(direct, "pu-rm@0.3", "auc_fg").mean);

  CHECK_THROWS_AS(emit_tau_sweep(base, {}), ConfigError);
}

TEST_CASE("trained comparison surfaces differ most near the atypical cluster") {
  // Train the risk-modulated arm and the plain relabel-to-positive arm on the
  // shipped task, then compare their decision surfaces region by region.
  const fs::path dir = scratch_dir("surface_pair");
  ExperimentConfig cfg = default_experiment_config();
  cfg.output_dir = (dir / "out").string();
  cfg.seeds = {1};
  cfg.methods = {
      MethodSpec{"pu-rm", ObjectiveConfig{}},
      MethodSpec{"u-ones", ObjectiveConfig{}},
  };
  cfg.methods[1].objective.strategy = Strategy::UOnes;
  run_experiment(cfg);

  const std::array<double, 4> bounds{-3.5, 3.5, -2.0, 3.5};
  const int res = 41;
  const fs::path grid_a = dir / "pu.csv";
  const fs::path grid_b = dir / "uo.csv";
  emit_boundary_grid((dir / "out" / "runs" / "pu-rm" / "seed_1" / "best.ckpt").string(), bounds,
                     res, grid_a.string());
  emit_boundary_grid((dir / "out" / "runs" / "u-ones" / "seed_1" / "best.ckpt").string(), bounds,
                     res, grid_b.string());

  const std::vector<std::string> a = split_lines(slurp(grid_a.string()));
  const std::vector<std::string> b = split_lines(slurp(grid_b.string()));
  REQUIRE(a.size() == b.size());
  const SynthConfig& synth = cfg.data.synth;
  auto window_mean = [&](const double* center) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
      const std::vector<std::string> ca = split_csv(a[i]);
      const std::vector<std::string> cb = split_csv(b[i]);
      const double x = std::stod(ca[0]);
      const double y = std::stod(ca[1]);
      const double dx = x - center[0];
      const double dy = y - center[1];
      if (dx * dx + dy * dy > synth.stddev * synth.stddev) continue;
      sum += std::abs(std::stod(ca[2]) - std::stod(cb[2]));
      ++count;
    }
    REQUIRE(count > 0);
    return sum / count;
  };
  const double near_atypical = window_mean(synth.atypical_pos_mean);
  const double near_typical = window_mean(synth.typical_pos_mean);
  CHECK(near_atypical > near_typical);
}
