#include <CLI11.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "finegrain/data.hpp"
#include "finegrain/harness.hpp"
#include "finegrain/labeler.hpp"

namespace fs = std::filesystem;
using namespace finegrain;

namespace {

struct GlobalFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
};

ExperimentConfig resolve_config(const GlobalFlags& flags) {
  ExperimentConfig config =
      flags.config_path.empty() ? default_experiment_config() : load_experiment_config(flags.config_path);
  if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
  if (flags.has_seed_override) config.seeds = {flags.seed_override};
  return config;
}

std::string output_root(const GlobalFlags& flags) {
  if (!flags.out_dir.empty()) return flags.out_dir;
  if (!flags.config_path.empty()) return load_experiment_config(flags.config_path).output_dir;
  return default_experiment_config().output_dir;
}

void print_table(const ResultsTable& table) { std::cout << format_results_csv(table); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware fine-grained classification experiments"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "experiment config file (sectioned key=value)");
  app.add_option("--out", flags.out_dir, "output directory, overrides the config");
  auto* seed_opt =
      app.add_option("--seed-override", flags.seed_override, "replace the config's seed list");

  CLI::App* cmd_run = app.add_subcommand("run", "train every configured method x seed");

  std::vector<double> curve_taus = {0.1, 0.3, 0.5};
  double curve_step = 0.001;
  CLI::App* cmd_curves = app.add_subcommand("losscurves", "tabulate the loss family over s");
  cmd_curves->add_option("--taus", curve_taus, "branch points to tabulate");
  cmd_curves->add_option("--step", curve_step, "s grid step (must divide 1)");

  std::string boundary_checkpoint;
  std::vector<double> boundary_bounds = {-4.0, 4.0, -4.0, 4.0};
  int boundary_resolution = 101;
  CLI::App* cmd_boundary =
      app.add_subcommand("boundary", "sample a checkpoint's decision surface on a lattice");
  cmd_boundary->add_option("--checkpoint", boundary_checkpoint, "checkpoint file")->required();
  cmd_boundary->add_option("--bounds", boundary_bounds, "x_min x_max y_min y_max")
      ->expected(4);
  cmd_boundary->add_option("--resolution", boundary_resolution, "points per axis");

  std::vector<double> sweep_taus = {0.1, 0.2, 0.3, 0.4, 0.5};
  CLI::App* cmd_sweep =
      app.add_subcommand("tausweep", "risk-modulation sweep plus cross-entropy baseline");
  cmd_sweep->add_option("--taus", sweep_taus, "branch points to sweep");

  std::string label_text;
  std::string lexicon_path;
  CLI::App* cmd_label = app.add_subcommand("label", "classify one report sentence");
  cmd_label->add_option("--text", label_text, "report text")->required();
  cmd_label->add_option("--lexicon", lexicon_path, "keyword table file (default: built-in)");

  CLI::App* cmd_gen = app.add_subcommand("gen", "write synthetic train/val dataset files");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  flags.has_seed_override = seed_opt->count() > 0;

  try {
    if (cmd_run->parsed()) {
      const ExperimentConfig config = resolve_config(flags);
      const ResultsTable table = run_experiment(config);
      print_table(table);
      std::cerr << "wrote " << (fs::path(config.output_dir) / "results.csv").string() << "\n";
    } else if (cmd_curves->parsed()) {
      const std::string out = (fs::path(output_root(flags)) / "loss_curves.csv").string();
      emit_loss_curves(curve_taus, curve_step, out);
      std::cerr << "wrote " << out << "\n";
    } else if (cmd_boundary->parsed()) {
      const std::string out = (fs::path(output_root(flags)) / "boundary.csv").string();
      emit_boundary_grid(boundary_checkpoint,
                         {boundary_bounds[0], boundary_bounds[1], boundary_bounds[2],
                          boundary_bounds[3]},
                         boundary_resolution, out);
      std::cerr << "wrote " << out << "\n";
    } else if (cmd_sweep->parsed()) {
      const ExperimentConfig config = resolve_config(flags);
      const ResultsTable table = emit_tau_sweep(config, sweep_taus);
      print_table(table);
      std::cerr << "wrote " << (fs::path(config.output_dir) / "tau_sweep.csv").string() << "\n";
    } else if (cmd_label->parsed()) {
      const Lexicon lexicon =
          lexicon_path.empty() ? Lexicon::defaults() : Lexicon::load(lexicon_path);
      const FineLabel label = label_report(label_text, lexicon);
      std::cout << to_string(label.subcategory) << "\n";
      for (const KeywordHit& hit : label.hits) {
        std::cout << "  " << hit.surface << " (stem " << hit.stem << ", "
                  << (hit.dimension == Dimension::Severity ? "severity" : "change") << " "
                  << to_string(hit.polarity) << ", token " << hit.position << ")\n";
      }
    } else if (cmd_gen->parsed()) {
      ExperimentConfig config = resolve_config(flags);
      if (flags.has_seed_override) config.data.synth.seed = flags.seed_override;
      const auto [train_set, val_set] = load_datasets(config.data);
      fs::create_directories(config.output_dir);
      const std::string train_path = (fs::path(config.output_dir) / "train.jsonl").string();
      const std::string val_path = (fs::path(config.output_dir) / "val.jsonl").string();
      write_dataset(train_set, train_path);
      write_dataset(val_set, val_path);
      std::cerr << "wrote " << train_path << " (" << train_set.size() << " samples), " << val_path
                << " (" << val_set.size() << " samples)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
