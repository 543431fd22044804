#include "finegrain/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "finegrain/errors.hpp"
#include "finegrain/report_corpus.hpp"
#include "finegrain/rng.hpp"

namespace finegrain {

namespace {

using ordered_json = nlohmann::ordered_json;

// Seed streams derived from SynthConfig::seed.
constexpr std::uint64_t kFeatureStream = 0;
constexpr std::uint64_t kSentenceStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

std::string make_id(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%04d", prefix, index + 1);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_negative < 0 || n_typical_pos < 0 || n_atypical_pos < 0 || n_uncertain < 0) {
    throw ConfigError("synth: cluster counts must be non-negative");
  }
  if (!(stddev > 0.0)) throw ConfigError("synth: stddev must be positive");
  if (!(noise_rate >= 0.0) || noise_rate >= 1.0) {
    throw ConfigError("synth: noise_rate must lie in [0,1)");
  }
}

std::vector<Sample> generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng features(mix_seed(cfg.seed, kFeatureStream));
  Rng sentences(mix_seed(cfg.seed, kSentenceStream));

  const std::vector<const char*> atypical_pool = corpus_sentences(Polarity::Atypical);
  const std::vector<const char*> typical_pool = corpus_sentences(Polarity::Typical);

  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(cfg.n_negative + cfg.n_typical_pos + cfg.n_atypical_pos +
                                       cfg.n_uncertain));

  const auto draw = [&features, &cfg](const double mean[2]) {
    return std::vector<double>{features.normal(mean[0], cfg.stddev), features.normal(mean[1], cfg.stddev)};
  };

  for (int i = 0; i < cfg.n_negative; ++i) {
    out.push_back({make_id("neg", i), draw(cfg.negative_mean), CoarseLabel::Negative, {}, {}});
  }
  for (int i = 0; i < cfg.n_typical_pos; ++i) {
    const char* text = typical_pool[sentences.bounded(typical_pool.size())];
    out.push_back(
        {make_id("typ", i), draw(cfg.typical_pos_mean), CoarseLabel::Positive, Polarity::Typical, text});
  }
  for (int i = 0; i < cfg.n_atypical_pos; ++i) {
    const char* text = atypical_pool[sentences.bounded(atypical_pool.size())];
    out.push_back(
        {make_id("aty", i), draw(cfg.atypical_pos_mean), CoarseLabel::Positive, Polarity::Atypical, text});
  }
  for (int i = 0; i < cfg.n_uncertain; ++i) {
    out.push_back({make_id("unc", i), draw(cfg.uncertain_mean), CoarseLabel::Uncertain, {}, {}});
  }

  return inject_noise(out, cfg.noise_rate, mix_seed(cfg.seed, kNoiseStream));
}

std::vector<Sample> inject_noise(const std::vector<Sample>& dataset, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0) || eta >= 1.0) throw InvalidInputError("inject_noise: eta must lie in [0,1)");

  std::vector<std::size_t> binary_indices;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].coarse == CoarseLabel::Negative || dataset[i].coarse == CoarseLabel::Positive) {
      binary_indices.push_back(i);
    }
  }
  const auto n_flips =
      static_cast<std::size_t>(std::llround(eta * static_cast<double>(binary_indices.size())));

  std::vector<Sample> out = dataset;
  Rng rng(seed);
  rng.shuffle(binary_indices);
  for (std::size_t k = 0; k < n_flips; ++k) {
    CoarseLabel& label = out[binary_indices[k]].coarse;
    label = (label == CoarseLabel::Positive) ? CoarseLabel::Negative : CoarseLabel::Positive;
  }
  return out;
}

std::vector<Sample> read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("dataset: cannot open '" + path + "'");

  std::vector<Sample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }

    try {
      Sample s;
      s.id = j.at("id").get<std::string>();
      s.features = j.at("features").get<std::vector<double>>();
      const auto coarse_text = j.at("coarse").get<std::string>();
      CoarseLabel coarse;
      try {
        coarse = parse_coarse_label(coarse_text == "blank" ? "" : coarse_text);
      } catch (const ConfigError&) {
        throw ParseError(where + ": unknown coarse label '" + coarse_text + "'");
      }
      if (coarse == CoarseLabel::Blank) {
        throw ParseError(where + ": blank coarse label; filter such records out upstream");
      }
      s.coarse = coarse;
      if (j.contains("fine")) {
        const auto fine_text = j.at("fine").get<std::string>();
        try {
          s.fine = parse_polarity(fine_text);
        } catch (const ConfigError&) {
          throw ParseError(where + ": unknown fine label '" + fine_text + "'");
        }
        if (s.coarse != CoarseLabel::Positive) {
          throw ParseError(where + ": fine label on a non-positive sample");
        }
      }
      if (j.contains("report_text")) s.report_text = j.at("report_text").get<std::string>();
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

void write_dataset(const std::vector<Sample>& dataset, const std::string& path) {
  std::ostringstream os;
  for (const Sample& s : dataset) {
    if (s.coarse == CoarseLabel::Blank) {
      throw DatasetError("dataset: refusing to write blank-labeled sample '" + s.id + "'");
    }
    ordered_json j;
    j["id"] = s.id;
    j["features"] = s.features;
    j["coarse"] = to_string(s.coarse);
    if (s.fine) j["fine"] = to_string(*s.fine);
    if (s.report_text) j["report_text"] = *s.report_text;
    os << j.dump() << '\n';
  }
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw ParseError("dataset: cannot write '" + path + "'");
  outf << os.str();
}

}  // namespace finegrain
