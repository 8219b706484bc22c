// Copyright 2026 The PromptForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROMPTFORGE_PIPELINE_HPP_
#define PROMPTFORGE_PIPELINE_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "promptforge/augmentation.hpp"
#include "promptforge/backend.hpp"
#include "promptforge/cache.hpp"
#include "promptforge/error.hpp"
#include "promptforge/evaluation.hpp"
#include "promptforge/fixture_backend.hpp"
#include "promptforge/http_backend.hpp"
#include "promptforge/lexicon.hpp"
#include "promptforge/parallel.hpp"
#include "promptforge/prediction.hpp"
#include "promptforge/prompt_set.hpp"
#include "promptforge/ranking.hpp"
#include "promptforge/report.hpp"
#include "promptforge/types.hpp"

namespace promptforge {

inline constexpr std::string_view kBackendEnvVar = "PROMPTFORGE_BACKEND";

// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr std::string_view kCandidates = "candidates.json";
inline constexpr std::string_view kRankingJson = "ranking.json";
inline constexpr std::string_view kRankingCsv = "ranking.csv";
inline constexpr std::string_view kPredictions = "predictions.jsonl";
inline constexpr std::string_view kEvalJson = "eval_report.json";
inline constexpr std::string_view kEvalCsv = "eval_report.csv";
inline constexpr std::string_view kTopKJson = "topk_curve.json";
inline constexpr std::string_view kTopKCsv = "topk_curve.csv";
inline constexpr std::string_view kTopKPlot = "topk_curve_plot.csv";
inline constexpr std::string_view kRankAccJson = "rank_accuracy.json";
inline constexpr std::string_view kRankAccCsv = "rank_accuracy.csv";
inline constexpr std::string_view kRankAccPlot = "rank_accuracy_plot.csv";
inline constexpr std::string_view kManifest = "manifest.json";
}  // namespace artifacts

struct PipelineConfig {
  RunConfig run;
  std::string backend;  // "http://host:port" or "fixture:PATH"
  std::string corpus_path;
  std::string dataset_path;
  std::string dataset_format = "tsv";  // "tsv" (no header) or "sst2" (header row)
  std::string lexicon_path;
  std::string base_prompt = "The sentence was [MASK]";
  std::string mapping = "pos=great,neg=terrible";
  std::string out_dir = "out";
  unsigned workers = default_workers();
  std::size_t max_in_flight = 8;
  std::size_t cache_capacity = 0;  // 0 = unbounded
  std::string cache_path;          // optional persistent response cache
  bool lenient_scoring = false;
  std::size_t curve_k_max = 5;

  TsvSchema schema() const {
    if (dataset_format == "sst2") return TsvSchema::sst2();
    if (dataset_format == "tsv") return TsvSchema::two_column();
    throw Error(ErrorCode::kConfigError, "unknown dataset_format '" + dataset_format + "'");
  }
};

// Applies the keys present in `doc` on top of `cfg`. Unknown keys are errors.
inline void apply_config(PipelineConfig& cfg, const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kConfigError, "config must be a JSON object");
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "paraphrase_top_k") cfg.run.paraphrase_top_k = v.get<std::size_t>();
      else if (key == "synonyms_per_word") cfg.run.synonyms_per_word = v.get<std::size_t>();
      else if (key == "probe_limit") cfg.run.probe_limit = v.get<std::size_t>();
      else if (key == "sample_instances") cfg.run.sample_instances = v.get<std::size_t>();
      else if (key == "random_seed") cfg.run.random_seed = v.get<std::uint64_t>();
      else if (key == "aggregation_k") cfg.run.aggregation_k = v.get<std::size_t>();
      else if (key == "lexicon_enabled") cfg.run.lexicon_enabled = v.get<bool>();
      else if (key == "backend") cfg.backend = v.get<std::string>();
      else if (key == "corpus") cfg.corpus_path = v.get<std::string>();
      else if (key == "dataset") cfg.dataset_path = v.get<std::string>();
      else if (key == "dataset_format") cfg.dataset_format = v.get<std::string>();
      else if (key == "lexicon") cfg.lexicon_path = v.get<std::string>();
      else if (key == "base_prompt") cfg.base_prompt = v.get<std::string>();
      else if (key == "mapping") cfg.mapping = v.get<std::string>();
      else if (key == "out") cfg.out_dir = v.get<std::string>();
      else if (key == "workers") cfg.workers = v.get<unsigned>();
      else if (key == "max_in_flight") cfg.max_in_flight = v.get<std::size_t>();
      else if (key == "cache_capacity") cfg.cache_capacity = v.get<std::size_t>();
      else if (key == "cache") cfg.cache_path = v.get<std::string>();
      else if (key == "lenient_scoring") cfg.lenient_scoring = v.get<bool>();
      else if (key == "curve_k_max") cfg.curve_k_max = v.get<std::size_t>();
      else throw Error(ErrorCode::kConfigError, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
}

inline nlohmann::json to_json(const PipelineConfig& c) {
  auto j = to_json(c.run);
  j["backend"] = c.backend;
  j["corpus"] = c.corpus_path;
  j["dataset"] = c.dataset_path;
  j["dataset_format"] = c.dataset_format;
  j["lexicon"] = c.lexicon_path;
  j["base_prompt"] = c.base_prompt;
  j["mapping"] = c.mapping;
  j["lenient_scoring"] = c.lenient_scoring;
  j["curve_k_max"] = c.curve_k_max;
  return j;
}

// Backend stack for one run: the configured backend behind a shared
// response cache.
class Session {
 public:
  explicit Session(const PipelineConfig& cfg) {
    const std::string& spec = cfg.backend;
    if (spec.empty()) throw Error(ErrorCode::kConfigError, "no backend configured (--backend or PROMPTFORGE_BACKEND)");
    if (spec.starts_with("fixture:")) {
      auto fixture = fixture_from_file(spec.substr(8));
      fixture_ = fixture.get();
      inner_ = std::move(fixture);
    } else if (spec.starts_with("http://") || spec.starts_with("https://")) {
      HttpBackendOptions opts;
      opts.base_url = spec;
      opts.max_in_flight = cfg.max_in_flight;
      inner_ = std::make_unique<HttpBackend>(std::move(opts));
    } else {
      throw Error(ErrorCode::kConfigError, "backend must be an http:// URL or fixture:PATH, got '" + spec + "'");
    }
    cache_ = std::make_unique<CachingBackend>(*inner_, cfg.cache_capacity);
    if (!cfg.cache_path.empty()) {
      cache_path_ = cfg.cache_path;
      cache_->load(cfg.cache_path);
    }
  }

  Backend& backend() { return *cache_; }
  const CachingBackend& cache() const { return *cache_; }
  BackendInfo info() { return cache_->handshake(); }
  std::size_t fixture_fallbacks() const { return fixture_ ? fixture_->fallback_count() : 0; }

  void persist() const {
    if (!cache_path_.empty()) cache_->save(cache_path_);
  }

 private:
  std::unique_ptr<Backend> inner_;
  FixtureBackend* fixture_ = nullptr;
  std::unique_ptr<CachingBackend> cache_;
  std::string cache_path_;
};

inline Corpus resolve_corpus(const PipelineConfig& cfg) {
  if (!cfg.corpus_path.empty()) return load_corpus(cfg.corpus_path);
  if (!cfg.dataset_path.empty()) {
    const auto examples = load_tsv(cfg.dataset_path, cfg.schema());
    return corpus_of(examples, cfg.dataset_path);
  }
  throw Error(ErrorCode::kConfigError, "no corpus configured (--corpus or --dataset)");
}

inline std::optional<SynonymLexicon> resolve_lexicon(const PipelineConfig& cfg) {
  if (!cfg.run.lexicon_enabled) return std::nullopt;
  if (cfg.lexicon_path.empty())
    throw Error(ErrorCode::kConfigError, "lexicon enabled but no lexicon path given (--lexicon or --no-lexicon)");
  return SynonymLexicon::load(cfg.lexicon_path);
}

inline std::filesystem::path out_path(const PipelineConfig& cfg, std::string_view name) {
  return std::filesystem::path(cfg.out_dir) / std::string(name);
}

struct AugmentOutcome {
  CandidateSet candidates;
  ParaphraseStats stats;
};

inline AugmentOutcome cmd_augment(const PipelineConfig& cfg, Session& session) {
  cfg.run.validate();
  const auto base = parse_prompt(cfg.base_prompt);
  const auto mapping = validate_mapping(parse_mapping(cfg.mapping), session.backend());
  const auto corpus = resolve_corpus(cfg);
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus has no sentences");
  AugmentOutcome out;
  out.candidates = generate(base, corpus, session.backend(), mapping.mapping, cfg.run, cfg.workers, &out.stats);
  report::write_json(out_path(cfg, artifacts::kCandidates),
                     {{"base", canonical(base)},
                      {"random_seed", cfg.run.random_seed},
                      {"paraphrase",
                       {{"queries", out.stats.queries},
                        {"untagged", out.stats.untagged},
                        {"pos_rejected", out.stats.pos_rejected}}},
                      {"candidates", to_json(out.candidates)}});
  return out;
}

inline CandidateSet load_candidates(const std::filesystem::path& path) {
  const auto doc = report::read_json(path);
  const auto& arr = doc.is_object() ? doc.value("candidates", nlohmann::json::array()) : doc;
  return candidate_set_from_json(arr);
}

inline nlohmann::json probes_json(const std::vector<ProbeCase>& cases) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cases) {
    nlohmann::json z = nlohmann::json::array();
    for (const auto& p : c.perturbations) z.push_back({{"replacement", p.replacement}, {"expect", expectation_name(p.expectation)}});
    arr.push_back({{"sentence_id", c.probe.base.id},
                   {"label", label_name(c.probe.source_label)},
                   {"occurrence", c.probe.occurrence},
                   {"via_synonym", c.probe.via_synonym},
                   {"perturbations", z}});
  }
  return arr;
}

inline RankingResult cmd_rank(const PipelineConfig& cfg, Session& session, const std::filesystem::path& candidates_path) {
  cfg.run.validate();
  const auto candidates = load_candidates(candidates_path);
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "candidate file '" + candidates_path.string() + "' is empty");
  const auto mapping = validate_mapping(parse_mapping(cfg.mapping), session.backend());
  const auto corpus = resolve_corpus(cfg);
  const auto lexicon = resolve_lexicon(cfg);
  const auto cases = build_probe_cases(corpus, mapping.mapping, lexicon ? &*lexicon : nullptr, cfg.run);
  auto result = rank_candidates(candidates, cases, session.backend(), mapping, cfg.workers, cfg.lenient_scoring);

  nlohmann::json prompts = nlohmann::json::array();
  for (const auto& s : result.ranked) prompts.push_back(to_json(s));
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : result.failures) failures.push_back({{"canonical", f.canonical}, {"error", f.message}});
  report::write_json(out_path(cfg, artifacts::kRankingJson),
                     {{"lexicon_enabled", cfg.run.lexicon_enabled},
                      {"random_seed", cfg.run.random_seed},
                      {"probe_count", result.probe_count},
                      {"max_score", result.max_score},
                      {"prompts", prompts},
                      {"failures", failures},
                      {"probes", probes_json(cases)}});
  report::write_file(out_path(cfg, artifacts::kRankingCsv), report::ranking_csv(result.ranked));
  if (result.ranked.empty()) throw Error(ErrorCode::kBackendError, "every candidate prompt failed to score");
  return result;
}

inline std::vector<ScoredPrompt> load_ranking(const std::filesystem::path& path) {
  const auto doc = report::read_json(path);
  std::vector<ScoredPrompt> out;
  try {
    for (const auto& p : doc.at("prompts")) out.push_back(scored_prompt_from_json(p));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
  return out;
}

inline PredictionRun cmd_predict(const PipelineConfig& cfg, Session& session,
                                 const std::filesystem::path& ranking_path, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const auto ranked = load_ranking(ranking_path);
  if (k > ranked.size())
    throw Error(ErrorCode::kInvalidArgument,
                "k = " + std::to_string(k) + " exceeds the " + std::to_string(ranked.size()) + " ranked prompts");
  const auto mapping = validate_mapping(parse_mapping(cfg.mapping), session.backend());
  const auto corpus = resolve_corpus(cfg);
  auto run = predict_corpus(ranked, corpus, session.backend(), mapping, k, cfg.workers);
  std::string lines;
  for (const auto& p : run.predictions) lines += to_json(p).dump() + "\n";
  report::write_file(out_path(cfg, artifacts::kPredictions), lines);
  return run;
}

inline std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open predictions '" + path.string() + "'");
  std::vector<Prediction> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(prediction_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline EvalReport cmd_evaluate(const PipelineConfig& cfg, const std::filesystem::path& predictions_path) {
  if (cfg.dataset_path.empty()) throw Error(ErrorCode::kConfigError, "evaluate needs --dataset");
  std::vector<std::string> warnings;
  const auto gold = load_tsv(cfg.dataset_path, cfg.schema(), &warnings);
  const auto predictions = load_predictions(predictions_path);
  auto r = evaluate(predictions, gold);
  r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
  r.config_echo = {{"dataset", cfg.dataset_path},
                   {"dataset_format", cfg.dataset_format},
                   {"predictions", predictions_path.filename().string()}};
  report::write_json(out_path(cfg, artifacts::kEvalJson), to_json(r));
  report::write_file(out_path(cfg, artifacts::kEvalCsv), report::eval_csv(r));
  return r;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunSummary {
  std::size_t candidate_count = 0;
  std::size_t probe_count = 0;
  std::size_t scoring_failures = 0;
  std::size_t prediction_failures = 0;
  std::optional<EvalReport> eval;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
};

// augment -> rank -> predict -> evaluate (when a labeled dataset is
// configured), plus the top-k and rank-accuracy curves and a manifest.
inline RunSummary cmd_run(const PipelineConfig& cfg) {
  cfg.run.validate();
  const auto started = utc_timestamp();
  Session session(cfg);
  RunSummary summary;
  nlohmann::json stages = nlohmann::json::array();

  const auto aug = cmd_augment(cfg, session);
  summary.candidate_count = aug.candidates.size();
  stages.push_back({{"stage", "augment"}, {"artifact", artifacts::kCandidates}});

  const auto ranking = cmd_rank(cfg, session, out_path(cfg, artifacts::kCandidates));
  summary.probe_count = ranking.probe_count;
  summary.scoring_failures = ranking.failures.size();
  stages.push_back({{"stage", "rank"}, {"artifact", artifacts::kRankingJson}});

  const std::size_t k = cfg.run.aggregation_k;
  const auto preds = cmd_predict(cfg, session, out_path(cfg, artifacts::kRankingJson), k);
  summary.prediction_failures = preds.failures.size();
  stages.push_back({{"stage", "predict"}, {"artifact", artifacts::kPredictions}, {"k", k}});

  if (!cfg.dataset_path.empty()) {
    summary.eval = cmd_evaluate(cfg, out_path(cfg, artifacts::kPredictions));
    stages.push_back({{"stage", "evaluate"}, {"artifact", artifacts::kEvalJson}});

    const auto gold = load_tsv(cfg.dataset_path, cfg.schema());
    const auto mapping = validate_mapping(parse_mapping(cfg.mapping), session.backend());
    const auto k_max = std::min(cfg.curve_k_max, ranking.ranked.size());
    const auto topk = topk_curve(ranking.ranked, gold, session.backend(), mapping, k_max, cfg.workers);
    const auto rank_acc = rank_accuracy_curve(ranking.ranked, gold, session.backend(), mapping, cfg.workers);
    std::vector<std::pair<double, double>> topk_pts, rank_pts;
    for (const auto& r : topk) topk_pts.emplace_back(static_cast<double>(r.k), r.accuracy);
    for (const auto& r : rank_acc) rank_pts.emplace_back(static_cast<double>(r.rank), r.accuracy);
    report::write_json(out_path(cfg, artifacts::kTopKJson), report::to_json(topk));
    report::write_file(out_path(cfg, artifacts::kTopKCsv), report::topk_csv(topk));
    report::write_file(out_path(cfg, artifacts::kTopKPlot), report::plot_csv(topk_pts));
    report::write_json(out_path(cfg, artifacts::kRankAccJson), report::to_json(rank_acc));
    report::write_file(out_path(cfg, artifacts::kRankAccCsv), report::rank_accuracy_csv(rank_acc));
    report::write_file(out_path(cfg, artifacts::kRankAccPlot), report::plot_csv(rank_pts));
    stages.push_back({{"stage", "curves"}, {"artifact", artifacts::kTopKJson}});
  }

  summary.cache_hits = session.cache().hits();
  summary.cache_misses = session.cache().misses();
  session.persist();
  report::write_json(out_path(cfg, artifacts::kManifest),
                     {{"config", to_json(cfg)},
                      {"backend", to_json(session.info())},
                      {"random_seed", cfg.run.random_seed},
                      {"candidate_count", summary.candidate_count},
                      {"probe_count", summary.probe_count},
                      {"scoring_failures", summary.scoring_failures},
                      {"prediction_failures", summary.prediction_failures},
                      {"fixture_fallbacks", session.fixture_fallbacks()},
                      {"cache",
                       {{"hits", summary.cache_hits},
                        {"misses", summary.cache_misses},
                        {"entries", session.cache().size()},
                        {"evictions", session.cache().evictions()}}},
                      {"stages", stages},
                      {"started_at", started},
                      {"finished_at", utc_timestamp()}});
  return summary;
}

}  // namespace promptforge

#endif  // PROMPTFORGE_PIPELINE_HPP_
