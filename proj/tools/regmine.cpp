// regmine: turns raw team-chat logs into labeled event sequences, dependency
// graphs, detected regulation instances, aggregated strategy statistics,
// compiled trigger rules, and replayed intervention suggestions.

#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regmine/annotate.hpp"
#include "regmine/config.hpp"
#include "regmine/errors.hpp"
#include "regmine/irr.hpp"
#include "regmine/pipeline.hpp"

namespace {

constexpr const char* kVersion = "regmine 0.1.0";

int exit_code(regmine::Errc c) {
  switch (c) {
    case regmine::Errc::BadConfig:
    case regmine::Errc::IoError:
      return 1;
    default:
      return 2;
  }
}

void log_summary(const char* stage, const regmine::PipelineSummary& s) {
  if (s.written.empty() && s.message_count == 0) return;  // stdout-only stages
  std::cerr << stage << ": " << s.message_count << " messages";
  if (s.episode_count) std::cerr << ", " << s.episode_count << " episodes";
  if (s.instance_count) std::cerr << ", " << s.instance_count << " instances";
  if (s.rule_count) std::cerr << ", " << s.rule_count << " rules";
  if (s.suggestion_count) std::cerr << ", " << s.suggestion_count << " suggestions";
  std::cerr << "\n";
  for (const auto& path : s.written) std::cerr << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mines emotion-regulation patterns out of team chat logs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, corpus, rules_path, input_path;
  std::vector<std::string> annotation_files;
  long long min_freq = 0, max_gap = 0, window_k = 0;
  double min_rate = -1.0;
  bool merge = false, color_on = false, color_off = false, emit_map = false;

  auto load_cfg = [&]() {
    regmine::PipelineConfig cfg;
    if (!config_path.empty()) cfg = regmine::PipelineConfig::from_file(config_path);
    if (!corpus.empty()) cfg.corpus = corpus;
    if (!input_path.empty()) cfg.corpus = input_path;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (min_freq > 0) cfg.min_freq = min_freq;
    if (min_rate >= 0.0) cfg.min_success_rate = min_rate;
    if (max_gap > 0) cfg.max_gap_minutes = max_gap;
    if (window_k > 0) cfg.window_k = window_k;
    if (merge) cfg.merge_episodes = true;
    if (color_on) cfg.color_instances = true;
    if (color_off) cfg.color_instances = false;
    if (emit_map) cfg.emit_map = true;
    cfg.validate();
    return cfg;
  };

  auto add_common = [&](CLI::App* cmd, bool config_required = true) {
    auto* opt = cmd->add_option("--config", config_path, "pipeline config file (key = value)");
    if (config_required) opt->required();
    cmd->add_option("--out-dir", out_dir, "artifact directory (overrides config)");
  };

  std::function<regmine::PipelineSummary()> action;
  const char* stage_name = "";

  CLI::App* ingest = app.add_subcommand("ingest", "parse, pseudonymize, and tokenize a chat log");
  add_common(ingest);
  ingest->add_option("--corpus", corpus, "raw corpus path (overrides config)");
  ingest->add_flag("--emit-map", emit_map,
                   "also write pseudonym_map.json (contains raw user ids)");
  ingest->callback([&] {
    stage_name = "ingest";
    action = [&] { return regmine::run_ingest(load_cfg()); };
  });

  CLI::App* annotate = app.add_subcommand("annotate", "label messages and segment episodes");
  add_common(annotate);
  annotate->add_option("--corpus", corpus, "raw corpus path (overrides config)");
  annotate->add_option("--max-gap-minutes", max_gap, "episode gap threshold (overrides config)");
  annotate->callback([&] {
    stage_name = "annotate";
    action = [&] { return regmine::run_annotate(load_cfg()); };
  });

  CLI::App* irr = app.add_subcommand("irr", "Fleiss' kappa agreement over annotation files");
  irr->add_option("--annotations", annotation_files, "annotation CSVs (msg_id,annotator,event,valence)")
      ->required()
      ->expected(-1);
  irr->callback([&] {
    stage_name = "irr";
    action = [&]() -> regmine::PipelineSummary {
      std::vector<std::vector<std::string>> rows;
      for (const auto& path : annotation_files) {
        auto part = regmine::read_csv(path);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      std::set<std::size_t> ids;
      for (const auto& row : rows) {
        if (row.empty() || row[0] == "msg_id") continue;
        try {
          ids.insert(std::stoull(row[0]));
        } catch (const std::exception&) {
          // load_annotation_rows reports the malformed id itself
        }
      }
      auto annotations = regmine::load_annotation_rows(rows, ids);
      auto report = regmine::irr_report(regmine::group_by_annotator(annotations));
      nlohmann::json doc{{"kappa", report.kappa},
                         {"N", report.N},
                         {"n", report.n},
                         {"k", report.k},
                         {"per_category_marginals", report.per_category_marginals}};
      std::cout << doc.dump(2) << "\n";
      return {};
    };
  });

  CLI::App* graph = app.add_subcommand("graph", "build per-episode dependency graphs");
  add_common(graph);
  graph->add_option("--corpus", corpus, "raw corpus path (overrides config)");
  graph->add_option("--min-freq", min_freq, "drop edges below this frequency");
  graph->add_flag("--merge-episodes", merge, "also write a corpus-level merged graph");
  graph->add_flag("--color-instances", color_on, "color instance paths in DOT output");
  graph->add_flag("--no-color-instances", color_off, "plain DOT output");
  graph->callback([&] {
    stage_name = "graph";
    action = [&] { return regmine::run_graph(load_cfg()); };
  });

  CLI::App* patterns = app.add_subcommand("patterns", "detect and classify regulation instances");
  add_common(patterns);
  patterns->add_option("--window-k", window_k, "antecedent window size (overrides config)");
  patterns->callback([&] {
    stage_name = "patterns";
    action = [&] { return regmine::run_patterns(load_cfg()); };
  });

  CLI::App* mine = app.add_subcommand("mine", "aggregate strategies and compile trigger rules");
  add_common(mine);
  mine->add_option("--min-success-rate", min_rate, "rule compilation threshold (overrides config)");
  mine->callback([&] {
    stage_name = "mine";
    action = [&] { return regmine::run_mine(load_cfg()); };
  });

  CLI::App* replay_cmd = app.add_subcommand("replay", "replay a corpus against compiled rules");
  add_common(replay_cmd, /*config_required=*/false);
  replay_cmd->add_option("--rules", rules_path, "compiled rules.json")->required();
  replay_cmd->add_option("--input", input_path, "corpus to replay (overrides config)");
  replay_cmd->callback([&] {
    stage_name = "replay";
    action = [&] { return regmine::run_replay(load_cfg(), rules_path); };
  });

  CLI::App* pipeline = app.add_subcommand("pipeline", "run ingest through mine in order");
  add_common(pipeline);
  pipeline->add_option("--corpus", corpus, "raw corpus path (overrides config)");
  pipeline->add_option("--min-freq", min_freq, "drop edges below this frequency");
  pipeline->add_option("--min-success-rate", min_rate, "rule compilation threshold");
  pipeline->add_option("--max-gap-minutes", max_gap, "episode gap threshold");
  pipeline->add_option("--window-k", window_k, "antecedent window size");
  pipeline->add_flag("--merge-episodes", merge, "also write a corpus-level merged graph");
  pipeline->add_flag("--emit-map", emit_map,
                     "also write pseudonym_map.json (contains raw user ids)");
  pipeline->callback([&] {
    stage_name = "pipeline";
    action = [&] { return regmine::run_pipeline(load_cfg()); };
  });

  try {
    app.parse(argc, argv);
    log_summary(stage_name, action());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const regmine::Error& e) {
    std::cerr << stage_name << " error [" << regmine::errc_name(e.code()) << "]: " << e.detail()
              << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << stage_name << " error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
