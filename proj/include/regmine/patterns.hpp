#pragma once
// Valence-transition detection, regulation-instance extraction and
// classification, and per-strategy outcome aggregation.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "regmine/chat.hpp"
#include "regmine/csv.hpp"
#include "regmine/errors.hpp"
#include "regmine/labels.hpp"

namespace regmine {

enum class StrategyFamily {
  SituationSelection,
  SituationModification,
  AttentionalDeployment,
  CognitiveChange,
  ResponseModulation,
  Unclassified,
};

inline std::string to_string(StrategyFamily f) {
  switch (f) {
    case StrategyFamily::SituationSelection: return "SituationSelection";
    case StrategyFamily::SituationModification: return "SituationModification";
    case StrategyFamily::AttentionalDeployment: return "AttentionalDeployment";
    case StrategyFamily::CognitiveChange: return "CognitiveChange";
    case StrategyFamily::ResponseModulation: return "ResponseModulation";
    case StrategyFamily::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

inline StrategyFamily family_from_string(const std::string& s) {
  if (s == "SituationSelection") return StrategyFamily::SituationSelection;
  if (s == "SituationModification") return StrategyFamily::SituationModification;
  if (s == "AttentionalDeployment") return StrategyFamily::AttentionalDeployment;
  if (s == "CognitiveChange") return StrategyFamily::CognitiveChange;
  if (s == "ResponseModulation") return StrategyFamily::ResponseModulation;
  if (s == "Unclassified") return StrategyFamily::Unclassified;
  fail(Errc::UnknownCategory, "unknown strategy family '" + s + "'");
}

// One user's move between two differently-valenced labeled events, with no
// other labeled event of theirs in between. to_event_index is empty for the
// synthesized exit of a user whose last word was negative; path holds the
// indices of every labeled event (any author) strictly between the two.
struct ValenceTransition {
  std::string pseudonym;
  Valence from_valence = Valence::Neutral;
  Valence to_valence = Valence::Neutral;
  std::size_t from_event_index = 0;
  std::optional<std::size_t> to_event_index;
  std::vector<std::size_t> path;

  bool operator==(const ValenceTransition& o) const {
    return pseudonym == o.pseudonym && from_valence == o.from_valence &&
           to_valence == o.to_valence && from_event_index == o.from_event_index &&
           to_event_index == o.to_event_index && path == o.path;
  }
};

inline std::vector<ValenceTransition> detect_transitions(const LabeledEpisode& episode) {
  std::map<std::string, std::size_t> last_seen;
  std::vector<ValenceTransition> out;
  for (std::size_t i = 0; i < episode.events.size(); ++i) {
    const LabeledEvent& ev = episode.events[i];
    auto it = last_seen.find(ev.pseudonym);
    if (it != last_seen.end()) {
      const LabeledEvent& prev = episode.events[it->second];
      if (prev.valence != ev.valence) {
        ValenceTransition t;
        t.pseudonym = ev.pseudonym;
        t.from_valence = prev.valence;
        t.to_valence = ev.valence;
        t.from_event_index = it->second;
        t.to_event_index = i;
        for (std::size_t j = it->second + 1; j < i; ++j) t.path.push_back(j);
        out.push_back(std::move(t));
      }
    }
    last_seen[ev.pseudonym] = i;
  }
  std::sort(out.begin(), out.end(), [](const ValenceTransition& a, const ValenceTransition& b) {
    return a.from_event_index < b.from_event_index;
  });
  return out;
}

// Classification rule: when `predicate` holds for an instance, it belongs to
// `family` under the name `strategy_name`. Rules are tried in table order and
// the first hit wins.
struct StrategyRule {
  std::string predicate;
  StrategyFamily family = StrategyFamily::Unclassified;
  std::string strategy_name;
};

inline const std::set<std::string>& known_predicates() {
  static const std::set<std::string> preds = {
      "withdrawal",
      "positive_antecedent_nonnegative_outcome",
      "positive_challenge_antecedent",
  };
  return preds;
}

struct RuleTable {
  std::vector<StrategyRule> rules;

  static RuleTable from_csv_rows(const std::vector<std::vector<std::string>>& rows) {
    RuleTable table;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (i == 0 && !row.empty() && row[0] == "predicate") continue;
      if (row.size() != 3)
        fail(Errc::MalformedLine,
             "rule row " + std::to_string(i + 1) + ": expected 3 fields, got " +
                 std::to_string(row.size()));
      if (!known_predicates().count(row[0]))
        fail(Errc::UnknownCategory, "unknown rule predicate '" + row[0] + "'");
      if (row[2].empty())
        fail(Errc::MalformedLine, "rule row " + std::to_string(i + 1) + ": empty strategy name");
      table.rules.push_back({row[0], family_from_string(row[1]), row[2]});
    }
    return table;
  }

  static RuleTable from_csv_file(const std::string& path) {
    return from_csv_rows(read_csv(path));
  }
};

inline RuleTable default_rule_table() {
  RuleTable t;
  t.rules = {
      {"withdrawal", StrategyFamily::SituationSelection, "avoidance"},
      {"positive_antecedent_nonnegative_outcome", StrategyFamily::SituationModification,
       "encouragement"},
      {"positive_challenge_antecedent", StrategyFamily::SituationModification, "hint-giving"},
  };
  return t;
}

// A regulation attempt: somebody (or nobody) acted while `transition.pseudonym`
// sat on a pain-point event, and the transition records how it ended.
// antecedents are the other users' labeled events inside the lookback window;
// outcome is the arrival valence, or Negative when the user simply left.
struct RegulationInstance {
  EpisodeId episode_id;
  ValenceTransition transition;
  EventLabel from_event = EventLabel::None;
  std::vector<LabeledEvent> antecedents;
  StrategyFamily family = StrategyFamily::Unclassified;
  std::string strategy_name = "unknown";
  Valence outcome = Valence::Neutral;
  bool withdrawal = false;
};

namespace detail {

inline std::vector<LabeledEvent> antecedent_window(const LabeledEpisode& episode,
                                                   std::size_t anchor, std::size_t k,
                                                   const std::string& pseudonym) {
  std::vector<LabeledEvent> out;
  std::size_t begin = anchor > k ? anchor - k : 0;
  for (std::size_t j = begin; j < anchor; ++j) {
    if (episode.events[j].pseudonym != pseudonym) out.push_back(episode.events[j]);
  }
  return out;
}

inline bool rule_applies(const StrategyRule& rule, const RegulationInstance& inst) {
  if (rule.predicate == "withdrawal") return inst.withdrawal;
  if (rule.predicate == "positive_antecedent_nonnegative_outcome") {
    bool positive = std::any_of(inst.antecedents.begin(), inst.antecedents.end(),
                                [](const LabeledEvent& e) { return e.valence == Valence::Positive; });
    return positive && inst.outcome != Valence::Negative;
  }
  if (rule.predicate == "positive_challenge_antecedent") {
    return std::any_of(inst.antecedents.begin(), inst.antecedents.end(), [](const LabeledEvent& e) {
      return e.event == EventLabel::Challenge && e.valence == Valence::Positive;
    });
  }
  return false;
}

}  // namespace detail

inline void classify_strategy(RegulationInstance& inst, const RuleTable& table) {
  for (const StrategyRule& rule : table.rules) {
    if (detail::rule_applies(rule, inst)) {
      inst.family = rule.family;
      inst.strategy_name = rule.strategy_name;
      return;
    }
  }
  inst.family = StrategyFamily::Unclassified;
  inst.strategy_name = "unknown";
}

// Builds classified instances from an episode's transitions. Only transitions
// leaving a pain-point event count. A user whose final labeled event is
// negative and who never speaks again is treated as having withdrawn: the
// transition arriving at that event is marked, or a to-less instance is
// synthesized when no transition arrives there.
inline std::vector<RegulationInstance> extract_instances(
    const LabeledEpisode& episode, const std::vector<ValenceTransition>& transitions,
    std::size_t window_k, const RuleTable& table) {
  std::vector<RegulationInstance> out;
  for (const ValenceTransition& t : transitions) {
    const LabeledEvent& from = episode.events[t.from_event_index];
    if (!is_pain_point(from.event)) continue;
    RegulationInstance inst;
    inst.episode_id = episode.id;
    inst.transition = t;
    inst.from_event = from.event;
    inst.outcome = t.to_valence;
    inst.antecedents =
        detail::antecedent_window(episode, *t.to_event_index, window_k, t.pseudonym);
    out.push_back(std::move(inst));
  }

  // Withdrawal pass: find each user's last labeled event and check whether
  // they went quiet on a negative note.
  std::map<std::string, std::size_t> last_event;
  for (std::size_t i = 0; i < episode.events.size(); ++i)
    last_event[episode.events[i].pseudonym] = i;
  for (const auto& [pseudonym, idx] : last_event) {
    const LabeledEvent& last = episode.events[idx];
    if (last.valence != Valence::Negative) continue;
    bool spoke_later = std::any_of(
        episode.all_messages.begin(), episode.all_messages.end(), [&](const ChatMessage& m) {
          return m.pseudonym == pseudonym && m.msg_id > last.msg_id;
        });
    if (spoke_later) continue;
    bool marked = false;
    for (RegulationInstance& inst : out) {
      if (inst.transition.pseudonym == pseudonym && inst.transition.to_event_index &&
          *inst.transition.to_event_index == idx) {
        inst.withdrawal = true;
        marked = true;
      }
    }
    if (!marked && is_pain_point(last.event)) {
      RegulationInstance inst;
      inst.episode_id = episode.id;
      inst.transition.pseudonym = pseudonym;
      inst.transition.from_valence = last.valence;
      inst.transition.to_valence = Valence::Negative;
      inst.transition.from_event_index = idx;
      inst.from_event = last.event;
      inst.outcome = Valence::Negative;
      inst.withdrawal = true;
      inst.antecedents = detail::antecedent_window(episode, idx, window_k, pseudonym);
      out.push_back(std::move(inst));
    }
  }

  std::sort(out.begin(), out.end(), [](const RegulationInstance& a, const RegulationInstance& b) {
    if (a.transition.from_event_index != b.transition.from_event_index)
      return a.transition.from_event_index < b.transition.from_event_index;
    return a.transition.pseudonym < b.transition.pseudonym;
  });
  for (RegulationInstance& inst : out) classify_strategy(inst, table);
  return out;
}

// Outcome tally for one (trigger event, trigger valence, strategy) cell.
struct StrategyStats {
  EventLabel event = EventLabel::None;
  Valence valence = Valence::Neutral;
  std::string strategy_name;
  StrategyFamily family = StrategyFamily::Unclassified;
  std::size_t instance_count = 0;
  std::size_t success_count = 0;

  double success_rate() const {
    return instance_count == 0
               ? 0.0
               : static_cast<double>(success_count) / static_cast<double>(instance_count);
  }
};

// Groups instances by what the struggling user was stuck on and which strategy
// met them there; success means the transition landed on positive valence.
// Sorted best-first: success rate, then support, then key.
inline std::vector<StrategyStats> aggregate_strategies(
    const std::vector<RegulationInstance>& instances) {
  std::map<std::tuple<std::string, std::string, std::string>, StrategyStats> cells;
  for (const RegulationInstance& inst : instances) {
    auto key = std::make_tuple(to_string(inst.from_event), to_string(inst.transition.from_valence),
                               inst.strategy_name);
    StrategyStats& cell = cells[key];
    if (cell.instance_count == 0) {
      cell.event = inst.from_event;
      cell.valence = inst.transition.from_valence;
      cell.strategy_name = inst.strategy_name;
      cell.family = inst.family;
    }
    cell.instance_count += 1;
    if (inst.outcome == Valence::Positive) cell.success_count += 1;
  }
  std::vector<StrategyStats> out;
  for (auto& [key, cell] : cells) out.push_back(cell);
  std::sort(out.begin(), out.end(), [](const StrategyStats& a, const StrategyStats& b) {
    if (a.success_rate() != b.success_rate()) return a.success_rate() > b.success_rate();
    if (a.instance_count != b.instance_count) return a.instance_count > b.instance_count;
    auto ka = std::make_tuple(std::string_view(to_string(a.event)),
                              std::string_view(to_string(a.valence)), std::string_view(a.strategy_name));
    auto kb = std::make_tuple(std::string_view(to_string(b.event)),
                              std::string_view(to_string(b.valence)), std::string_view(b.strategy_name));
    return ka < kb;
  });
  return out;
}

}  // namespace regmine
