#include "finegrain/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "finegrain/errors.hpp"
#include "finegrain/inifile.hpp"
#include "finegrain/losses.hpp"
#include "finegrain/metrics.hpp"

namespace fs = std::filesystem;

namespace finegrain {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

bool safe_method_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
                    c == '@' || c == '-';
    if (!ok) return false;
  }
  return true;
}

// Per-run artifacts and the two scalar metrics the results table aggregates.
struct RunOutcome {
  double auc_fg = 0.0;
  double final_train_loss = 0.0;
};

RunOutcome execute_run(const ExperimentConfig& config, const MethodSpec& method,
                       std::uint64_t seed, const std::vector<Sample>& train_set,
                       const std::vector<Sample>& val_set) {
  TrainConfig cfg = config.train_template;
  cfg.seed = seed;
  cfg.objective = method.objective;

  TrainResult result;
  try {
    result = train(cfg, train_set, val_set);
  } catch (const std::exception& e) {
    throw ConfigError("method '" + method.name + "' seed " + std::to_string(seed) + ": " +
                      e.what());
  }

  const Checkpoint& best = result.checkpoints[result.best_index];
  const Checkpoint& final = result.checkpoints.back();

  const fs::path run_dir =
      fs::path(config.output_dir) / "runs" / method.name / ("seed_" + std::to_string(seed));
  fs::create_directories(run_dir);
  save_checkpoint(best, (run_dir / "best.ckpt").string());
  save_checkpoint(final, (run_dir / "final.ckpt").string());

  RunOutcome outcome;
  outcome.auc_fg = result.val_history[result.best_index];

  const std::vector<TaggedSample> tagged = apply_strategy(train_set, cfg.objective);
  std::vector<std::vector<double>> xs;
  xs.reserve(tagged.size());
  for (const TaggedSample& t : tagged) xs.push_back(t.features);
  outcome.final_train_loss = batch_loss(tagged, forward_batch(final.params, xs), cfg.objective);

  std::ostringstream log;
  log << "method=" << method.name << "\n";
  log << "seed=" << seed << "\n";
  log << "iterations=" << cfg.iterations << "\n";
  log << "checkpoint_every=" << cfg.checkpoint_every << "\n";
  for (std::size_t i = 0; i < result.checkpoints.size(); ++i) {
    log << "iteration=" << result.checkpoints[i].iteration
        << " val_auc_fg=" << fmt6(result.val_history[i]) << "\n";
  }
  log << "best_iteration=" << best.iteration << " best_val_auc_fg=" << fmt6(outcome.auc_fg)
      << "\n";
  log << "final_train_loss=" << fmt6(outcome.final_train_loss) << "\n";
  write_text_atomic((run_dir / "log.txt").string(), log.str());

  return outcome;
}

ResultsTable execute_experiment(const ExperimentConfig& config, bool auc_only,
                                const std::string& csv_filename) {
  config.validate();
  const auto [train_set, val_set] = load_datasets(config.data);

  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());

  std::vector<MethodSpec> methods = config.methods;
  std::sort(methods.begin(), methods.end(),
            [](const MethodSpec& a, const MethodSpec& b) { return a.name < b.name; });

  ResultsTable table;
  table.seeds = seeds;
  for (const MethodSpec& method : methods) {
    std::vector<double> aucs;
    std::vector<double> losses;
    for (const std::uint64_t seed : seeds) {
      const RunOutcome outcome = execute_run(config, method, seed, train_set, val_set);
      aucs.push_back(outcome.auc_fg);
      losses.push_back(outcome.final_train_loss);
    }
    const MetricReport auc_report = aggregate_runs("auc_fg", aucs);
    table.rows.push_back(
        ResultRow{method.name, "auc_fg", auc_report.mean, auc_report.std_dev, aucs});
    if (!auc_only) {
      const MetricReport loss_report = aggregate_runs("final_train_loss", losses);
      table.rows.push_back(ResultRow{method.name, "final_train_loss", loss_report.mean,
                                     loss_report.std_dev, losses});
    }
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.method, a.metric) < std::tie(b.method, b.metric);
  });

  write_text_atomic((fs::path(config.output_dir) / csv_filename).string(),
                    format_results_csv(table));
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("experiment needs at least one method");
  if (seeds.empty()) throw ConfigError("experiment needs at least one seed");
  std::set<std::string> names;
  for (const MethodSpec& m : methods) {
    if (!safe_method_name(m.name)) {
      throw ConfigError("method name '" + m.name +
                        "' must be nonempty and use only [a-z0-9._@-]");
    }
    if (!names.insert(m.name).second) throw ConfigError("duplicate method name '" + m.name + "'");
    if (m.objective.lambda < 0.0) throw ConfigError("method '" + m.name + "': negative lambda");
  }
  std::set<std::uint64_t> unique_seeds(seeds.begin(), seeds.end());
  if (unique_seeds.size() != seeds.size()) throw ConfigError("duplicate seeds");
  if (output_dir.empty()) throw ConfigError("output directory must be nonempty");
  train_template.validate();
  if (data.synthetic) {
    data.synth.validate();
  } else {
    if (data.train_path.empty() || data.val_path.empty())
      throw ConfigError("file-backed data needs train_path and val_path");
  }
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig config;
  config.data.synthetic = true;
  config.data.synth = SynthConfig{};
  config.data.synth.noise_rate = 0.1;
  config.data.val_seed = 1001;

  const auto with_strategy = [](const std::string& name, Strategy s) {
    MethodSpec m;
    m.name = name;
    m.objective.strategy = s;
    return m;
  };
  config.methods = {
      with_strategy("u-ignore", Strategy::UIgnore),
      with_strategy("u-zeros", Strategy::UZeros),
      with_strategy("u-ones", Strategy::UOnes),
      with_strategy("pu-rm", Strategy::PuRm),
  };

  config.train_template = TrainConfig{};
  config.train_template.adam.lr = 5e-3;
  config.seeds = {1, 2, 3};
  config.output_dir = "results";
  return config;
}

std::string default_experiment_config_text() {
  const ExperimentConfig c = default_experiment_config();
  std::ostringstream out;
  out << "# Desk-scale uncertainty-handling comparison on synthetic clusters.\n";
  out << "\n[experiment]\n";
  out << "seeds =";
  for (std::uint64_t s : c.seeds) out << " " << s;
  out << "\noutput = " << c.output_dir << "\n";
  out << "\n[data]\n";
  out << "source = synth\n";
  out << "n_negative = " << c.data.synth.n_negative << "\n";
  out << "n_typical = " << c.data.synth.n_typical_pos << "\n";
  out << "n_atypical = " << c.data.synth.n_atypical_pos << "\n";
  out << "n_uncertain = " << c.data.synth.n_uncertain << "\n";
  out << "mean_negative = " << fmt_short(c.data.synth.negative_mean[0]) << " "
      << fmt_short(c.data.synth.negative_mean[1]) << "\n";
  out << "mean_typical = " << fmt_short(c.data.synth.typical_pos_mean[0]) << " "
      << fmt_short(c.data.synth.typical_pos_mean[1]) << "\n";
  out << "mean_atypical = " << fmt_short(c.data.synth.atypical_pos_mean[0]) << " "
      << fmt_short(c.data.synth.atypical_pos_mean[1]) << "\n";
  out << "mean_uncertain = " << fmt_short(c.data.synth.uncertain_mean[0]) << " "
      << fmt_short(c.data.synth.uncertain_mean[1]) << "\n";
  out << "stddev = " << fmt_short(c.data.synth.stddev) << "\n";
  out << "noise_rate = " << fmt_short(c.data.synth.noise_rate) << "\n";
  out << "seed = " << c.data.synth.seed << "\n";
  out << "val_seed = " << c.data.val_seed << "\n";
  out << "\n[train]\n";
  out << "layer_sizes =";
  for (int s : c.train_template.layer_sizes) out << " " << s;
  out << "\niterations = " << c.train_template.iterations << "\n";
  out << "batch_size = " << c.train_template.batch_size << "\n";
  out << "checkpoint_every = " << c.train_template.checkpoint_every << "\n";
  out << "lr = " << fmt_short(c.train_template.adam.lr) << "\n";
  out << "beta1 = " << fmt_short(c.train_template.adam.beta1) << "\n";
  out << "beta2 = " << fmt_short(c.train_template.adam.beta2) << "\n";
  out << "weight_decay = " << fmt_short(c.train_template.adam.weight_decay) << "\n";
  out << "eps = " << fmt_short(c.train_template.adam.eps) << "\n";
  for (const MethodSpec& m : c.methods) {
    out << "\n[method." << m.name << "]\n";
    out << "strategy = " << to_string(m.objective.strategy) << "\n";
    out << "tau = " << fmt_short(m.objective.tau.value()) << "\n";
    out << "q = " << fmt_short(m.objective.q.value()) << "\n";
    out << "noise_loss = " << to_string(m.objective.noise_loss) << "\n";
    out << "lambda = " << fmt_short(m.objective.lambda) << "\n";
  }
  return out.str();
}

ExperimentConfig load_experiment_config(const std::string& path) {
  const IniFile ini = IniFile::load(path);
  ExperimentConfig config = default_experiment_config();
  config.methods.clear();

  const auto unknown = [&](const IniEntry& e) {
    throw ParseError(ini.origin() + ":" + std::to_string(e.line) + ": unknown key '" + e.key +
                     "' in [" + e.section + "]");
  };

  // Method sections are rebuilt from scratch; scalar sections override the
  // defaults key by key.
  std::string data_source = "synth";
  std::map<std::string, MethodSpec> methods;  // keyed by section suffix, insertion via vector below
  std::vector<std::string> method_order;

  for (const IniEntry& e : ini.entries()) {
    if (e.section == "experiment") {
      if (e.key == "seeds") {
        config.seeds = ini_u64_list(e);
      } else if (e.key == "output") {
        config.output_dir = e.value;
      } else {
        unknown(e);
      }
    } else if (e.section == "data") {
      if (e.key == "source") {
        if (e.value != "synth" && e.value != "files")
          throw ParseError(ini.origin() + ":" + std::to_string(e.line) +
                           ": source must be 'synth' or 'files'");
        data_source = e.value;
      } else if (e.key == "train_path") {
        config.data.train_path = e.value;
      } else if (e.key == "val_path") {
        config.data.val_path = e.value;
      } else if (e.key == "n_negative") {
        config.data.synth.n_negative = static_cast<int>(ini_int(e));
      } else if (e.key == "n_typical") {
        config.data.synth.n_typical_pos = static_cast<int>(ini_int(e));
      } else if (e.key == "n_atypical") {
        config.data.synth.n_atypical_pos = static_cast<int>(ini_int(e));
      } else if (e.key == "n_uncertain") {
        config.data.synth.n_uncertain = static_cast<int>(ini_int(e));
      } else if (e.key == "mean_negative" || e.key == "mean_typical" ||
                 e.key == "mean_atypical" || e.key == "mean_uncertain") {
        const std::vector<double> v = ini_double_list(e);
        if (v.size() != 2)
          throw ParseError(ini.origin() + ":" + std::to_string(e.line) +
                           ": cluster means take exactly two coordinates");
        double* target = e.key == "mean_negative"   ? config.data.synth.negative_mean
                         : e.key == "mean_typical"  ? config.data.synth.typical_pos_mean
                         : e.key == "mean_atypical" ? config.data.synth.atypical_pos_mean
                                                    : config.data.synth.uncertain_mean;
        target[0] = v[0];
        target[1] = v[1];
      } else if (e.key == "stddev") {
        config.data.synth.stddev = ini_double(e);
      } else if (e.key == "noise_rate") {
        config.data.synth.noise_rate = ini_double(e);
      } else if (e.key == "seed") {
        config.data.synth.seed = ini_u64(e);
      } else if (e.key == "val_seed") {
        config.data.val_seed = ini_u64(e);
      } else {
        unknown(e);
      }
    } else if (e.section == "train") {
      if (e.key == "layer_sizes") {
        config.train_template.layer_sizes.clear();
        for (std::int64_t v : ini_int_list(e))
          config.train_template.layer_sizes.push_back(static_cast<int>(v));
      } else if (e.key == "iterations") {
        config.train_template.iterations = static_cast<int>(ini_int(e));
      } else if (e.key == "batch_size") {
        config.train_template.batch_size = static_cast<int>(ini_int(e));
      } else if (e.key == "checkpoint_every") {
        config.train_template.checkpoint_every = static_cast<int>(ini_int(e));
      } else if (e.key == "lr") {
        config.train_template.adam.lr = ini_double(e);
      } else if (e.key == "beta1") {
        config.train_template.adam.beta1 = ini_double(e);
      } else if (e.key == "beta2") {
        config.train_template.adam.beta2 = ini_double(e);
      } else if (e.key == "weight_decay") {
        config.train_template.adam.weight_decay = ini_double(e);
      } else if (e.key == "eps") {
        config.train_template.adam.eps = ini_double(e);
      } else {
        unknown(e);
      }
    } else if (e.section.rfind("method.", 0) == 0) {
      const std::string name = e.section.substr(7);
      if (name.empty())
        throw ParseError(ini.origin() + ":" + std::to_string(e.line) + ": empty method name");
      if (methods.find(name) == methods.end()) {
        methods[name].name = name;
        method_order.push_back(name);
      }
      MethodSpec& m = methods[name];
      try {
        if (e.key == "strategy") {
          m.objective.strategy = parse_strategy(e.value);
        } else if (e.key == "tau") {
          m.objective.tau = TauParam{ini_double(e)};
        } else if (e.key == "q") {
          m.objective.q = GceParam{ini_double(e)};
        } else if (e.key == "noise_loss") {
          m.objective.noise_loss = parse_noise_loss(e.value);
        } else if (e.key == "lambda") {
          m.objective.lambda = ini_double(e);
        } else {
          unknown(e);
        }
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception& inner) {
        throw ParseError(ini.origin() + ":" + std::to_string(e.line) + ": [" + e.section + "] " +
                         e.key + ": " + inner.what());
      }
    } else {
      throw ParseError(ini.origin() + ":" + std::to_string(e.line) + ": unknown section [" +
                       e.section + "]");
    }
  }

  config.data.synthetic = (data_source == "synth");
  for (const std::string& name : method_order) config.methods.push_back(methods[name]);
  if (config.methods.empty())
    throw ParseError(ini.origin() + ": no [method.<name>] sections");
  config.validate();
  return config;
}

std::string format_results_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "method,metric,mean,std";
  for (std::uint64_t s : table.seeds) out << ",seed_" << s;
  out << "\n";
  for (const ResultRow& row : table.rows) {
    out << row.method << "," << row.metric << "," << fmt6(row.mean) << "," << fmt6(row.std_dev);
    for (double v : row.per_seed) out << "," << fmt6(v);
    out << "\n";
  }
  return out.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::pair<std::vector<Sample>, std::vector<Sample>> load_datasets(const DataSpec& data) {
  if (data.synthetic) {
    SynthConfig val_cfg = data.synth;
    val_cfg.seed = data.val_seed;
    val_cfg.noise_rate = 0.0;
    return {generate(data.synth), generate(val_cfg)};
  }
  return {read_dataset(data.train_path), read_dataset(data.val_path)};
}

ResultsTable run_experiment(const ExperimentConfig& config) {
  return execute_experiment(config, /*auc_only=*/false, "results.csv");
}

ResultsTable emit_tau_sweep(const ExperimentConfig& base, const std::vector<double>& taus) {
  if (taus.empty()) throw ConfigError("tau sweep needs at least one tau");
  ExperimentConfig sweep = base;
  sweep.methods.clear();
  for (double tau : taus) {
    MethodSpec m;
    m.objective.strategy = Strategy::PuRm;
    m.objective.tau = TauParam{tau};  // validates the range
    m.name = std::string("pu-rm@") + fmt_short(tau);
    sweep.methods.push_back(m);
  }
  MethodSpec baseline;
  baseline.name = "ce-baseline";
  baseline.objective.strategy = Strategy::UOnes;
  sweep.methods.push_back(baseline);
  return execute_experiment(sweep, /*auc_only=*/true, "tau_sweep.csv");
}

void emit_loss_curves(const std::vector<double>& taus, double grid_step,
                      const std::string& out_path) {
  if (taus.empty()) throw ConfigError("loss curves need at least one tau");
  std::vector<TauParam> params;
  for (double tau : taus) params.push_back(TauParam{tau});
  if (!(grid_step > 0.0) || grid_step > 1.0) throw ConfigError("grid step must be in (0, 1]");
  const long long n = std::llround(1.0 / grid_step);
  if (n < 1 || std::abs(static_cast<double>(n) * grid_step - 1.0) > 1e-9)
    throw ConfigError("grid step must evenly divide 1");

  std::ostringstream out;
  out << "s,ce";
  for (const TauParam& tau : params) out << ",pce_tau_" << fmt_short(tau.value());
  out << "\n";
  for (long long k = 1; k <= n; ++k) {
    const double s = (k == n) ? 1.0 : static_cast<double>(k) * grid_step;
    const Probabilities p = Probabilities::from_pos(s);
    out << fmt6(s) << "," << fmt6(ce_loss(p, 1));
    for (const TauParam& tau : params) out << "," << fmt6(pce_loss(p, 1, tau));
    out << "\n";
  }
  write_text_atomic(out_path, out.str());
}

void emit_boundary_grid(const std::string& checkpoint_path, const std::array<double, 4>& bounds,
                        int resolution, const std::string& out_path) {
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
  if (checkpoint.params.sizes.empty() || checkpoint.params.sizes.front() != 2)
    throw InvalidInputError("boundary grids need a model with 2-D feature input");
  if (resolution < 2) throw ConfigError("resolution must be at least 2");
  const double x_min = bounds[0], x_max = bounds[1], y_min = bounds[2], y_max = bounds[3];
  if (!(x_min < x_max) || !(y_min < y_max))
    throw ConfigError("bounds must satisfy x_min < x_max and y_min < y_max");

  std::ostringstream out;
  out << "x,y,p_pos\n";
  for (int yi = 0; yi < resolution; ++yi) {
    const double y = y_min + (y_max - y_min) * yi / (resolution - 1);
    for (int xi = 0; xi < resolution; ++xi) {
      const double x = x_min + (x_max - x_min) * xi / (resolution - 1);
      const auto [z, p] = forward(checkpoint.params, {x, y});
      out << fmt6(x) << "," << fmt6(y) << "," << fmt6(p.pos()) << "\n";
    }
  }
  write_text_atomic(out_path, out.str());
}

}  // namespace finegrain
