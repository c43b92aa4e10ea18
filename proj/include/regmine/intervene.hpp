#pragma once
// Trigger-rule compilation from aggregated strategy statistics, plus
// streaming and batch replay of labeled events against those rules.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "regmine/chat.hpp"
#include "regmine/csv.hpp"
#include "regmine/errors.hpp"
#include "regmine/labels.hpp"
#include "regmine/patterns.hpp"

namespace regmine {

// strategy name → suggestion text; "{user}" in the text stands for the
// pseudonym of the user the suggestion targets.
class TemplateTable {
 public:
  static TemplateTable from_csv_rows(const std::vector<std::vector<std::string>>& rows) {
    TemplateTable table;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (i == 0 && !row.empty() && row[0] == "strategy") continue;
      if (row.size() != 2)
        fail(Errc::MalformedLine,
             "template row " + std::to_string(i + 1) + ": expected 2 fields, got " +
                 std::to_string(row.size()));
      if (row[0].empty() || row[1].empty())
        fail(Errc::MalformedLine, "template row " + std::to_string(i + 1) + ": empty field");
      table.texts_[row[0]] = row[1];
    }
    return table;
  }

  static TemplateTable from_csv_file(const std::string& path) {
    return from_csv_rows(read_csv(path));
  }

  bool has(const std::string& strategy_name) const { return texts_.count(strategy_name) > 0; }

  const std::string& text_for(const std::string& strategy_name) const {
    auto it = texts_.find(strategy_name);
    if (it == texts_.end())
      fail(Errc::NoTemplates, "no template for strategy '" + strategy_name + "'");
    return it->second;
  }

  std::size_t size() const { return texts_.size(); }

 private:
  std::map<std::string, std::string> texts_;
};

inline std::string render_template(const std::string& text, const std::string& user) {
  std::string out = text;
  const std::string placeholder = "{user}";
  std::size_t pos = 0;
  while ((pos = out.find(placeholder, pos)) != std::string::npos) {
    out.replace(pos, placeholder.size(), user);
    pos += user.size();
  }
  return out;
}

// Fires when a labeled event matches (event, valence); valence is always
// Negative for compiled rules.
struct TriggerRule {
  EventLabel event = EventLabel::None;
  Valence valence = Valence::Negative;
  double min_success_rate = 0.5;
  double success_rate = 0.0;
  StrategyFamily family = StrategyFamily::Unclassified;
  std::string strategy_name;
  std::string template_text;
};

// Keeps the best-scoring classified strategy per negative trigger event,
// provided it clears min_success_rate; ties go to the lexicographically
// smaller strategy name. Every compiled strategy must have a template.
inline std::vector<TriggerRule> compile_triggers(const std::vector<StrategyStats>& stats,
                                                 const TemplateTable& templates,
                                                 double min_success_rate = 0.5) {
  std::map<EventLabel, const StrategyStats*> best;
  for (const StrategyStats& s : stats) {
    if (s.valence != Valence::Negative) continue;
    if (s.family == StrategyFamily::Unclassified) continue;
    if (s.success_rate() < min_success_rate) continue;
    auto it = best.find(s.event);
    if (it == best.end() || s.success_rate() > it->second->success_rate() ||
        (s.success_rate() == it->second->success_rate() &&
         s.strategy_name < it->second->strategy_name)) {
      best[s.event] = &s;
    }
  }
  std::vector<TriggerRule> out;
  for (const auto& [event, s] : best) {
    TriggerRule rule;
    rule.event = event;
    rule.valence = Valence::Negative;
    rule.min_success_rate = min_success_rate;
    rule.success_rate = s->success_rate();
    rule.family = s->family;
    rule.strategy_name = s->strategy_name;
    rule.template_text = templates.text_for(s->strategy_name);
    out.push_back(std::move(rule));
  }
  std::sort(out.begin(), out.end(), [](const TriggerRule& a, const TriggerRule& b) {
    return std::string_view(to_string(a.event)) < std::string_view(to_string(b.event));
  });
  return out;
}

inline nlohmann::json rules_to_json(const std::vector<TriggerRule>& rules) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TriggerRule& r : rules) {
    arr.push_back({
        {"trigger", {{"event", to_string(r.event)}, {"valence", to_string(r.valence)}}},
        {"min_success_rate", r.min_success_rate},
        {"success_rate", r.success_rate},
        {"suggestion",
         {{"family", to_string(r.family)},
          {"strategy", r.strategy_name},
          {"template", r.template_text}}},
    });
  }
  return nlohmann::json{{"schema_version", 1}, {"rules", arr}};
}

inline std::vector<TriggerRule> rules_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("schema_version") || !doc.contains("rules"))
    fail(Errc::MalformedLine, "rules document: expected {schema_version, rules}");
  if (doc["schema_version"] != 1)
    fail(Errc::MalformedLine, "rules document: unsupported schema_version");
  if (!doc["rules"].is_array()) fail(Errc::MalformedLine, "rules document: rules must be an array");
  std::vector<TriggerRule> out;
  for (const auto& item : doc["rules"]) {
    if (!item.is_object() || !item.contains("trigger") || !item.contains("suggestion") ||
        !item.contains("min_success_rate"))
      fail(Errc::MalformedLine, "rules document: malformed rule entry");
    TriggerRule r;
    r.event = event_from_string(item["trigger"].at("event").get<std::string>());
    r.valence = valence_from_string(item["trigger"].at("valence").get<std::string>());
    r.min_success_rate = item["min_success_rate"].get<double>();
    r.success_rate = item.value("success_rate", 0.0);
    r.family = family_from_string(item["suggestion"].at("family").get<std::string>());
    r.strategy_name = item["suggestion"].at("strategy").get<std::string>();
    r.template_text = item["suggestion"].at("template").get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

struct InterventionSuggestion {
  EpisodeId episode_id;
  std::size_t msg_index = 0;
  std::size_t event_index = 0;
  std::string target_pseudonym;
  std::string strategy_name;
  std::string rendered_text;

  bool operator==(const InterventionSuggestion& o) const {
    return episode_id == o.episode_id && msg_index == o.msg_index &&
           event_index == o.event_index && target_pseudonym == o.target_pseudonym &&
           strategy_name == o.strategy_name && rendered_text == o.rendered_text;
  }
};

// Streaming matcher. Feed labeled events one at a time, in order; each feed
// returns the suggestions that event triggers. A new episode id resets the
// per-episode suppression state; within an episode the event indices must be
// strictly increasing.
class Replayer {
 public:
  explicit Replayer(std::vector<TriggerRule> rules) : rules_(std::move(rules)) {}

  std::vector<InterventionSuggestion> feed(const EpisodeId& id, const LabeledEvent& ev) {
    if (!current_ || !(*current_ == id)) {
      current_ = id;
      last_index_.reset();
      fired_.clear();
    } else if (last_index_ && ev.index <= *last_index_) {
      fail(Errc::OutOfOrderEvent, "episode " + id.str() + ": event index " +
                                      std::to_string(ev.index) + " after " +
                                      std::to_string(*last_index_));
    }
    last_index_ = ev.index;
    std::vector<InterventionSuggestion> out;
    if (ev.valence != Valence::Negative) return out;
    for (const TriggerRule& rule : rules_) {
      if (rule.event != ev.event || rule.valence != ev.valence) continue;
      std::pair<std::string, EventLabel> key{ev.pseudonym, rule.event};
      if (fired_.count(key)) continue;
      fired_.insert(key);
      InterventionSuggestion s;
      s.episode_id = id;
      s.msg_index = ev.msg_id;
      s.event_index = ev.index;
      s.target_pseudonym = ev.pseudonym;
      s.strategy_name = rule.strategy_name;
      s.rendered_text = render_template(rule.template_text, ev.pseudonym);
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  std::vector<TriggerRule> rules_;
  std::optional<EpisodeId> current_;
  std::optional<std::size_t> last_index_;
  std::set<std::pair<std::string, EventLabel>> fired_;
};

inline std::vector<InterventionSuggestion> replay(const LabeledEpisode& episode,
                                                  const std::vector<TriggerRule>& rules) {
  Replayer replayer(rules);
  std::vector<InterventionSuggestion> out;
  for (const LabeledEvent& ev : episode.events) {
    auto fired = replayer.feed(episode.id, ev);
    out.insert(out.end(), fired.begin(), fired.end());
  }
  return out;
}

}  // namespace regmine
