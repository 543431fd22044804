#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "finegrain/data.hpp"
#include "finegrain/model.hpp"
#include "finegrain/objective.hpp"

namespace finegrain {

// One comparison arm: a display name plus the objective it trains under.
struct MethodSpec {
  std::string name;
  ObjectiveConfig objective;
};

// Where the experiment's samples come from: a pair of dataset files, or an
// inline synthetic generator. Synthetic validation data is drawn with its own
// seed and without label noise, so checkpoint selection ranks against clean
// ground truth.
struct DataSpec {
  bool synthetic = true;
  SynthConfig synth;
  std::uint64_t val_seed = 1001;
  std::string train_path;
  std::string val_path;
};

struct ExperimentConfig {
  DataSpec data;
  std::vector<MethodSpec> methods;
  TrainConfig train_template;  // per-run seed substituted from `seeds`
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::string output_dir = "results";

  // At least one method and one seed; method names unique, nonempty, and
  // restricted to [a-z0-9._@-] (they become directory names).
  void validate() const;
};

// The shipped desk-scale experiment: the four uncertainty-handling arms on
// the default synthetic task with 10% label noise, three seeds.
ExperimentConfig default_experiment_config();
// Sectioned key-value config file; unknown sections or keys are errors.
ExperimentConfig load_experiment_config(const std::string& path);
// The canonical text form of default_experiment_config().
std::string default_experiment_config_text();

struct ResultRow {
  std::string method;
  std::string metric;
  double mean = 0.0;
  double std_dev = 0.0;
  std::vector<double> per_seed;  // aligned with ResultsTable::seeds
};

struct ResultsTable {
  std::vector<std::uint64_t> seeds;
  std::vector<ResultRow> rows;  // sorted by (method, metric)
};

// Fixed schema: "method,metric,mean,std,seed_<s>..." with every numeric cell
// printed to six decimal places, so reruns diff clean.
std::string format_results_csv(const ResultsTable& table);

// Writes via a temp file in the same directory plus an atomic rename; an
// aborted run never leaves a partial file at `path`.
void write_text_atomic(const std::string& path, const std::string& content);

// Resolves a DataSpec to (train, validation) sample sets.
std::pair<std::vector<Sample>, std::vector<Sample>> load_datasets(const DataSpec& data);

// Trains every method x seed, selects each run's best checkpoint by the
// ranked validation score, and writes results.csv, per-run logs, and best /
// final checkpoints under output_dir. Deterministic given the config; rows
// carry metrics "auc_fg" (best checkpoint) and "final_train_loss".
ResultsTable run_experiment(const ExperimentConfig& config);

// One risk-modulated arm per tau plus a plain cross-entropy baseline arm,
// sharing base's data, seeds and training template; writes tau_sweep.csv
// under base.output_dir. Rows carry the "auc_fg" metric only, so the table
// has exactly |taus| + 1 rows.
ResultsTable emit_tau_sweep(const ExperimentConfig& base, const std::vector<double>& taus);

// Loss-curve table: rows sweep s over (0, 1] in grid_step increments, columns
// are plain cross-entropy and the risk-modulated loss at each tau. grid_step
// must evenly divide 1.
void emit_loss_curves(const std::vector<double>& taus, double grid_step,
                      const std::string& out_path);

// Decision-surface lattice (x, y, p_pos) of a saved 2-D-input checkpoint over
// bounds {x_min, x_max, y_min, y_max}, resolution points per axis (so
// resolution^2 rows), y varying slowest.
void emit_boundary_grid(const std::string& checkpoint_path, const std::array<double, 4>& bounds,
                        int resolution, const std::string& out_path);

}  // namespace finegrain
