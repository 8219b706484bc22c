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

// promptforge: zero-shot prompt generation, ranking and prediction.
//
//   promptforge augment  --backend fixture:fx.json --corpus c.txt --out out/
//   promptforge rank     --candidates out/candidates.json ...
//   promptforge predict  --ranking out/ranking.json --k 3 ...
//   promptforge evaluate --predictions out/predictions.jsonl --dataset gold.tsv
//   promptforge run      --config run.json
//   promptforge import-wordnet --wordnet-dir dict/ --output lexicon.json
//
// Exit codes: 0 ok, 2 usage, 3 insufficient data, 4 consistency, 5 backend.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "promptforge/promptforge.hpp"

namespace pf = promptforge;

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> backend;
  std::optional<std::string> base_prompt;
  std::optional<std::string> mapping;
  std::optional<std::string> corpus;
  std::optional<std::string> dataset;
  std::optional<std::string> dataset_format;
  std::optional<std::string> lexicon;
  bool no_lexicon = false;
  std::optional<std::size_t> top_k;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::size_t> synonyms;
  std::optional<std::size_t> probe_limit;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> k;
  std::optional<std::string> cache;
  std::optional<std::size_t> cache_capacity;
  std::optional<std::size_t> max_in_flight;
  bool lenient = false;
  std::optional<std::size_t> curve_k;

  // command-specific inputs
  std::optional<std::string> candidates;
  std::optional<std::string> ranking;
  std::optional<std::string> predictions;
  std::string wordnet_dir;
  std::string output;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its values");
  cmd->add_option("--backend", f.backend, "http://HOST:PORT or fixture:PATH");
  cmd->add_option("--base-prompt", f.base_prompt, "base cloze prompt, e.g. \"The sentence was [MASK]\"");
  cmd->add_option("--mapping", f.mapping, "label words, e.g. pos=great,neg=terrible");
  cmd->add_option("--corpus", f.corpus, "unlabeled corpus, one sentence per line");
  cmd->add_option("--dataset", f.dataset, "labeled TSV (sentence<TAB>label)");
  cmd->add_option("--dataset-format", f.dataset_format, "tsv (no header) or sst2 (header row)");
  cmd->add_option("--lexicon", f.lexicon, "synonym lexicon JSON");
  cmd->add_flag("--no-lexicon", f.no_lexicon, "rank with opposite-word substitution only");
  cmd->add_option("--top-k", f.top_k, "fill-mask candidates per paraphrase query");
  cmd->add_option("--seed", f.seed, "random seed for paraphrase sampling");
  cmd->add_option("--workers", f.workers, "worker threads");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--synonyms", f.synonyms, "synonyms per mapping word");
  cmd->add_option("--probe-limit", f.probe_limit, "probe sentences per mapping word");
  cmd->add_option("--samples", f.samples, "corpus sentences sampled per paraphrased word");
  cmd->add_option("--k", f.k, "number of top-ranked prompts to aggregate");
  cmd->add_option("--cache", f.cache, "persistent backend response cache file");
  cmd->add_option("--cache-capacity", f.cache_capacity, "max cached responses (0 = unbounded)");
  cmd->add_option("--max-in-flight", f.max_in_flight, "concurrent HTTP requests");
  cmd->add_flag("--lenient", f.lenient, "count failed backend calls as failed checks instead of dropping the prompt");
  cmd->add_option("--curve-k", f.curve_k, "largest k in the top-k curve");
}

pf::PipelineConfig resolve(const Flags& f) {
  pf::PipelineConfig cfg;
#ifdef PROMPTFORGE_DEFAULT_LEXICON
  if (std::filesystem::exists(PROMPTFORGE_DEFAULT_LEXICON)) cfg.lexicon_path = PROMPTFORGE_DEFAULT_LEXICON;
#endif
  if (f.config) pf::apply_config(cfg, pf::report::read_json(*f.config));
  if (f.backend) cfg.backend = *f.backend;
  if (const char* env = std::getenv(pf::kBackendEnvVar.data()); env && *env) cfg.backend = env;
  if (f.base_prompt) cfg.base_prompt = *f.base_prompt;
  if (f.mapping) cfg.mapping = *f.mapping;
  if (f.corpus) cfg.corpus_path = *f.corpus;
  if (f.dataset) cfg.dataset_path = *f.dataset;
  if (f.dataset_format) cfg.dataset_format = *f.dataset_format;
  if (f.lexicon) cfg.lexicon_path = *f.lexicon;
  if (f.no_lexicon) cfg.run.lexicon_enabled = false;
  if (f.top_k) cfg.run.paraphrase_top_k = *f.top_k;
  if (f.seed) cfg.run.random_seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (f.out) cfg.out_dir = *f.out;
  if (f.synonyms) cfg.run.synonyms_per_word = *f.synonyms;
  if (f.probe_limit) cfg.run.probe_limit = *f.probe_limit;
  if (f.samples) cfg.run.sample_instances = *f.samples;
  if (f.k) cfg.run.aggregation_k = *f.k;
  if (f.cache) cfg.cache_path = *f.cache;
  if (f.cache_capacity) cfg.cache_capacity = *f.cache_capacity;
  if (f.max_in_flight) cfg.max_in_flight = *f.max_in_flight;
  if (f.lenient) cfg.lenient_scoring = true;
  if (f.curve_k) cfg.curve_k_max = *f.curve_k;
  return cfg;
}

std::string input_path(const std::optional<std::string>& given, const pf::PipelineConfig& cfg,
                       std::string_view default_name) {
  return given ? *given : pf::out_path(cfg, default_name).string();
}

int run_command(const std::string& name, const Flags& f) {
  if (name == "import-wordnet") {
    const auto lexicon = pf::import_wordnet(f.wordnet_dir);
    lexicon.save(f.output);
    std::cerr << "wrote " << lexicon.size() << " headwords to " << f.output << "\n";
    return 0;
  }

  const auto cfg = resolve(f);
  if (name == "evaluate") {
    const auto r = pf::cmd_evaluate(cfg, input_path(f.predictions, cfg, pf::artifacts::kPredictions));
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "accuracy " << r.accuracy << "  macro_f1 " << r.macro_f1 << "  n " << r.n << "\n";
    return 0;
  }
  if (name == "run") {
    const auto s = pf::cmd_run(cfg);
    std::cout << "candidates " << s.candidate_count << "  probes " << s.probe_count << "  cache hits "
              << s.cache_hits << " misses " << s.cache_misses << "\n";
    if (s.scoring_failures) std::cerr << "warning: " << s.scoring_failures << " prompts failed to score\n";
    if (s.prediction_failures) std::cerr << "warning: " << s.prediction_failures << " sentences failed to predict\n";
    if (s.eval) std::cout << "accuracy " << s.eval->accuracy << "  macro_f1 " << s.eval->macro_f1 << "\n";
    return 0;
  }

  pf::Session session(cfg);
  if (name == "augment") {
    const auto out = pf::cmd_augment(cfg, session);
    if (out.stats.untagged)
      std::cerr << "warning: " << out.stats.untagged << " paraphrase queries lacked the original token's tag\n";
    std::cout << out.candidates.size() << " candidates -> " << pf::out_path(cfg, pf::artifacts::kCandidates).string() << "\n";
  } else if (name == "rank") {
    const auto r = pf::cmd_rank(cfg, session, input_path(f.candidates, cfg, pf::artifacts::kCandidates));
    for (const auto& fail : r.failures) std::cerr << "warning: " << fail.canonical << ": " << fail.message << "\n";
    std::cout << r.ranked.size() << " prompts ranked over " << r.probe_count << " probes -> "
              << pf::out_path(cfg, pf::artifacts::kRankingJson).string() << "\n";
  } else if (name == "predict") {
    const auto run = pf::cmd_predict(cfg, session, input_path(f.ranking, cfg, pf::artifacts::kRankingJson),
                                     cfg.run.aggregation_k);
    for (const auto& fail : run.failures)
      std::cerr << "warning: sentence " << fail.sentence_id << ": " << fail.message << "\n";
    std::cout << run.predictions.size() << " predictions -> "
              << pf::out_path(cfg, pf::artifacts::kPredictions).string() << "\n";
  }
  if (session.fixture_fallbacks())
    std::cerr << "warning: " << session.fixture_fallbacks() << " fixture lookups fell back to defaults\n";
  session.persist();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-shot prompt generation, ranking and prediction"};
  app.require_subcommand(1);
  Flags flags;
  auto* augment = app.add_subcommand("augment", "generate candidate prompts");
  auto* rank = app.add_subcommand("rank", "score and rank candidate prompts");
  auto* predict = app.add_subcommand("predict", "predict labels with the top-k prompts");
  auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold labels");
  auto* run = app.add_subcommand("run", "all stages end to end");
  auto* import = app.add_subcommand("import-wordnet", "build a synonym lexicon from WordNet database files");
  for (auto* cmd : {augment, rank, predict, evaluate, run}) add_common(cmd, flags);
  rank->add_option("--candidates", flags.candidates, "candidate set (default OUT/candidates.json)");
  predict->add_option("--ranking", flags.ranking, "ranking report (default OUT/ranking.json)");
  evaluate->add_option("--predictions", flags.predictions, "predictions (default OUT/predictions.jsonl)");
  import->add_option("--wordnet-dir", flags.wordnet_dir, "directory with index.* and data.*")->required();
  import->add_option("--output", flags.output, "lexicon JSON to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return run_command(name, flags);
  } catch (const pf::Error& e) {
    std::cerr << "promptforge " << name << ": " << e.what() << "\n";
    return pf::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "promptforge " << name << ": " << e.what() << "\n";
    return 2;
  }
}
