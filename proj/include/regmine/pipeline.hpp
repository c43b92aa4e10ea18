#pragma once
// End-to-end orchestration: each stage reads files, calls the pure modules,
// and writes its artifact. Stages recompute their inputs from disk so a
// subcommand run in isolation emits exactly the bytes the full pipeline
// would.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "regmine/annotate.hpp"
#include "regmine/chat.hpp"
#include "regmine/config.hpp"
#include "regmine/dfg.hpp"
#include "regmine/dfg_io.hpp"
#include "regmine/errors.hpp"
#include "regmine/ingest.hpp"
#include "regmine/intervene.hpp"
#include "regmine/labels.hpp"
#include "regmine/patterns.hpp"

namespace regmine {

struct CorpusData {
  std::vector<ChatMessage> messages;
  PseudonymMap pseudonyms;
  std::vector<ParseIssue> issues;
};

inline CorpusData ingest_corpus(const PipelineConfig& cfg) {
  std::ifstream in(cfg.corpus, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open corpus '" + cfg.corpus + "'");
  ParseResult parsed = parse_log(in);
  EmojiTable emoji =
      cfg.emoji_table.empty() ? EmojiTable{} : EmojiTable::from_csv(cfg.emoji_table);
  CorpusData out;
  out.issues = std::move(parsed.issues);
  out.messages = normalize_corpus(parsed.lines, emoji, &out.pseudonyms);
  return out;
}

// Gold consensus where ratings exist, lexicon-driven auto labels elsewhere.
inline std::map<std::size_t, ResolvedLabel> resolve_labels(
    const PipelineConfig& cfg, const std::vector<ChatMessage>& messages) {
  Lexicon lexicon = cfg.lexicon.empty() ? Lexicon{} : Lexicon::from_csv(cfg.lexicon);
  AutoLabelConfig auto_cfg;
  auto_cfg.bot_pseudonyms = cfg.bot_pseudonyms;

  std::map<std::size_t, ResolvedLabel> out;
  std::size_t i = 0;
  while (i < messages.size()) {
    Episode channel_stream;
    std::size_t j = i;
    while (j < messages.size() && messages[j].channel == messages[i].channel)
      channel_stream.messages.push_back(messages[j++]);
    for (const Annotation& a : auto_label(channel_stream, lexicon, auto_cfg))
      out[a.msg_id] = {a.event, a.valence, "auto"};
    i = j;
  }

  if (!cfg.annotations.empty()) {
    std::set<std::size_t> ids;
    for (const auto& m : messages) ids.insert(m.msg_id);
    std::vector<std::vector<std::string>> rows;
    for (const auto& path : cfg.annotations) {
      auto part = read_csv(path);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    auto gold = load_annotation_rows(rows, ids);
    for (const ConsensusLabel& c : merge_annotators(group_by_annotator(gold)))
      out[c.msg_id] = {c.event, c.valence, "gold"};
  }
  return out;
}

inline std::vector<LabeledEpisode> label_episodes(
    const PipelineConfig& cfg, const std::vector<ChatMessage>& messages,
    const std::map<std::size_t, ResolvedLabel>& labels) {
  SegmentConfig seg;
  seg.max_gap_ms = cfg.max_gap_minutes * 60 * 1000;
  std::vector<LabeledEpisode> out;
  for (const Episode& ep : segment_episodes(messages, boundary_labels(labels), seg))
    out.push_back(apply_labels(ep, labels));
  return out;
}

inline RuleTable load_rule_table(const PipelineConfig& cfg) {
  return cfg.strategy_rules.empty() ? default_rule_table()
                                    : RuleTable::from_csv_file(cfg.strategy_rules);
}

inline std::vector<RegulationInstance> corpus_instances(
    const PipelineConfig& cfg, const std::vector<LabeledEpisode>& episodes) {
  RuleTable table = load_rule_table(cfg);
  std::vector<RegulationInstance> out;
  for (const LabeledEpisode& ep : episodes) {
    if (ep.events.empty()) continue;
    auto instances =
        extract_instances(ep, detect_transitions(ep), static_cast<std::size_t>(cfg.window_k), table);
    out.insert(out.end(), instances.begin(), instances.end());
  }
  return out;
}

// ------------------------------------------------------------------ artifacts

namespace artifacts {

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoError, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) fail(Errc::IoError, "short write to '" + path.string() + "'");
}

inline std::string normalized_jsonl(const std::vector<ChatMessage>& messages) {
  std::string out;
  for (const ChatMessage& m : messages) {
    nlohmann::json line{{"msg_id", m.msg_id}, {"ts", m.ts},         {"channel", m.channel},
                        {"user", m.pseudonym}, {"text", m.text},     {"tokens", m.tokens}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

inline std::string pseudonym_map_json(const PseudonymMap& map) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [raw, pseudo] : map.entries()) doc[raw] = pseudo;
  return doc.dump(2) + "\n";
}

inline std::string labeled_jsonl(const std::vector<LabeledEpisode>& episodes) {
  std::string out;
  for (const LabeledEpisode& ep : episodes) {
    for (const LabeledEvent& ev : ep.events) {
      nlohmann::json line{{"episode", ep.id.str()},   {"index", ev.index},
                          {"msg_id", ev.msg_id},      {"user", ev.pseudonym},
                          {"event", to_string(ev.event)}, {"valence", to_string(ev.valence)},
                          {"label", ev.label()},      {"source", ev.source}};
      out += line.dump();
      out += '\n';
    }
  }
  return out;
}

inline std::string instances_jsonl(const std::vector<RegulationInstance>& instances) {
  std::string out;
  for (const RegulationInstance& inst : instances) {
    std::vector<std::size_t> antecedents;
    for (const LabeledEvent& e : inst.antecedents) antecedents.push_back(e.index);
    nlohmann::json line{{"episode", inst.episode_id.str()},
                        {"user", inst.transition.pseudonym},
                        {"from_event", to_string(inst.from_event)},
                        {"from_valence", to_string(inst.transition.from_valence)},
                        {"to_valence", to_string(inst.transition.to_valence)},
                        {"from_event_index", inst.transition.from_event_index},
                        {"path", inst.transition.path},
                        {"antecedents", antecedents},
                        {"family", to_string(inst.family)},
                        {"strategy", inst.strategy_name},
                        {"outcome", to_string(inst.outcome)},
                        {"withdrawal", inst.withdrawal}};
    if (inst.transition.to_event_index)
      line["to_event_index"] = *inst.transition.to_event_index;
    else
      line["to_event_index"] = nullptr;
    out += line.dump();
    out += '\n';
  }
  return out;
}

inline std::string stats_json(const std::vector<StrategyStats>& stats) {
  nlohmann::json arr = nlohmann::json::array();
  for (const StrategyStats& s : stats) {
    arr.push_back({{"event", to_string(s.event)},
                   {"from_valence", to_string(s.valence)},
                   {"strategy", s.strategy_name},
                   {"family", to_string(s.family)},
                   {"instance_count", s.instance_count},
                   {"success_count", s.success_count},
                   {"success_rate", s.success_rate()}});
  }
  return arr.dump(2) + "\n";
}

inline std::string stats_csv(const std::vector<StrategyStats>& stats) {
  std::string out = "event,from_valence,strategy,family,instance_count,success_count,success_rate\n";
  for (const StrategyStats& s : stats) {
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.6f", s.success_rate());
    out += csv_escape(to_string(s.event)) + "," + csv_escape(to_string(s.valence)) + "," +
           csv_escape(s.strategy_name) + "," + csv_escape(to_string(s.family)) + "," +
           std::to_string(s.instance_count) + "," + std::to_string(s.success_count) + "," + rate +
           "\n";
  }
  return out;
}

inline std::string suggestions_jsonl(const std::vector<InterventionSuggestion>& suggestions) {
  std::string out;
  for (const InterventionSuggestion& s : suggestions) {
    nlohmann::json line{{"episode", s.episode_id.str()},
                        {"msg_index", s.msg_index},
                        {"event_index", s.event_index},
                        {"target", s.target_pseudonym},
                        {"strategy", s.strategy_name},
                        {"text", s.rendered_text}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace artifacts

// --------------------------------------------------------------------- runs

struct PipelineSummary {
  std::size_t message_count = 0;
  std::size_t episode_count = 0;
  std::size_t labeled_episode_count = 0;
  std::size_t instance_count = 0;
  std::size_t rule_count = 0;
  std::size_t suggestion_count = 0;
  std::vector<std::string> written;
};

namespace detail {

inline void emit(PipelineSummary& s, const std::filesystem::path& path,
                 const std::string& content) {
  artifacts::write_text(path, content);
  s.written.push_back(path.string());
}

}  // namespace detail

inline PipelineSummary run_ingest(const PipelineConfig& cfg) {
  PipelineSummary s;
  CorpusData corpus = ingest_corpus(cfg);
  s.message_count = corpus.messages.size();
  std::filesystem::path out_dir(cfg.out_dir);
  detail::emit(s, out_dir / "normalized.jsonl", artifacts::normalized_jsonl(corpus.messages));
  if (cfg.emit_map)
    detail::emit(s, out_dir / "pseudonym_map.json",
                 artifacts::pseudonym_map_json(corpus.pseudonyms));
  return s;
}

inline PipelineSummary run_annotate(const PipelineConfig& cfg) {
  PipelineSummary s;
  CorpusData corpus = ingest_corpus(cfg);
  auto labels = resolve_labels(cfg, corpus.messages);
  auto episodes = label_episodes(cfg, corpus.messages, labels);
  s.message_count = corpus.messages.size();
  s.episode_count = episodes.size();
  for (const auto& ep : episodes)
    if (!ep.events.empty()) ++s.labeled_episode_count;
  detail::emit(s, std::filesystem::path(cfg.out_dir) / "labeled.jsonl",
               artifacts::labeled_jsonl(episodes));
  return s;
}

inline PipelineSummary run_graph(const PipelineConfig& cfg) {
  PipelineSummary s;
  CorpusData corpus = ingest_corpus(cfg);
  auto labels = resolve_labels(cfg, corpus.messages);
  auto episodes = label_episodes(cfg, corpus.messages, labels);
  RuleTable table = load_rule_table(cfg);
  std::filesystem::path out_dir(cfg.out_dir);

  std::vector<DependencyGraph> full;
  for (const LabeledEpisode& ep : episodes) {
    if (ep.events.empty()) continue;
    DependencyGraph g = build_dfg(ep);
    full.push_back(g);
    if (cfg.min_freq > 1) g = filter_graph(g, static_cast<int>(cfg.min_freq));
    EdgeColorMap colors;
    if (cfg.color_instances) {
      auto instances =
          extract_instances(ep, detect_transitions(ep), static_cast<std::size_t>(cfg.window_k), table);
      colors = instance_edge_colors(ep, instances, default_instance_palette(instances.size()));
    }
    detail::emit(s, out_dir / (ep.id.str() + ".dfg.json"), graph_to_string(g));
    detail::emit(s, out_dir / (ep.id.str() + ".dfg.dot"), export_dot(g, colors));
    ++s.labeled_episode_count;
  }
  s.message_count = corpus.messages.size();
  s.episode_count = episodes.size();

  if (cfg.merge_episodes && !full.empty()) {
    DependencyGraph merged = merge_graphs(full);
    if (cfg.min_freq > 1) merged = filter_graph(merged, static_cast<int>(cfg.min_freq));
    detail::emit(s, out_dir / "merged.dfg.json", graph_to_string(merged));
    detail::emit(s, out_dir / "merged.dfg.dot", export_dot(merged));
  }
  return s;
}

inline PipelineSummary run_patterns(const PipelineConfig& cfg) {
  PipelineSummary s;
  CorpusData corpus = ingest_corpus(cfg);
  auto labels = resolve_labels(cfg, corpus.messages);
  auto episodes = label_episodes(cfg, corpus.messages, labels);
  auto instances = corpus_instances(cfg, episodes);
  s.message_count = corpus.messages.size();
  s.episode_count = episodes.size();
  s.instance_count = instances.size();
  detail::emit(s, std::filesystem::path(cfg.out_dir) / "instances.jsonl",
               artifacts::instances_jsonl(instances));
  return s;
}

inline PipelineSummary run_mine(const PipelineConfig& cfg) {
  PipelineSummary s;
  CorpusData corpus = ingest_corpus(cfg);
  auto labels = resolve_labels(cfg, corpus.messages);
  auto episodes = label_episodes(cfg, corpus.messages, labels);
  auto instances = corpus_instances(cfg, episodes);
  auto stats = aggregate_strategies(instances);
  TemplateTable templates =
      cfg.templates.empty() ? TemplateTable{} : TemplateTable::from_csv_file(cfg.templates);
  auto rules = compile_triggers(stats, templates, cfg.min_success_rate);
  s.message_count = corpus.messages.size();
  s.instance_count = instances.size();
  s.rule_count = rules.size();
  std::filesystem::path out_dir(cfg.out_dir);
  detail::emit(s, out_dir / "stats.json", artifacts::stats_json(stats));
  detail::emit(s, out_dir / "stats.csv", artifacts::stats_csv(stats));
  detail::emit(s, out_dir / "rules.json", rules_to_json(rules).dump(2) + "\n");
  return s;
}

inline PipelineSummary run_replay(const PipelineConfig& cfg, const std::string& rules_path) {
  PipelineSummary s;
  std::ifstream in(rules_path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open rules '" + rules_path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::MalformedLine, "rules '" + rules_path + "': " + e.what());
  }
  auto rules = rules_from_json(doc);

  CorpusData corpus = ingest_corpus(cfg);
  auto labels = resolve_labels(cfg, corpus.messages);
  auto episodes = label_episodes(cfg, corpus.messages, labels);
  std::vector<InterventionSuggestion> all;
  for (const LabeledEpisode& ep : episodes) {
    if (ep.events.empty()) continue;
    auto fired = replay(ep, rules);
    all.insert(all.end(), fired.begin(), fired.end());
  }
  s.message_count = corpus.messages.size();
  s.episode_count = episodes.size();
  s.rule_count = rules.size();
  s.suggestion_count = all.size();
  detail::emit(s, std::filesystem::path(cfg.out_dir) / "suggestions.jsonl",
               artifacts::suggestions_jsonl(all));
  return s;
}

inline PipelineSummary run_pipeline(const PipelineConfig& cfg) {
  PipelineSummary total = run_ingest(cfg);
  for (auto stage : {run_annotate, run_graph, run_patterns, run_mine}) {
    PipelineSummary s = stage(cfg);
    total.episode_count = std::max(total.episode_count, s.episode_count);
    total.labeled_episode_count = std::max(total.labeled_episode_count, s.labeled_episode_count);
    total.instance_count = std::max(total.instance_count, s.instance_count);
    total.rule_count = std::max(total.rule_count, s.rule_count);
    total.written.insert(total.written.end(), s.written.begin(), s.written.end());
  }
  return total;
}

}  // namespace regmine
