// Compiles a trigger rule from one aggregated stat and streams a short
// episode through the replayer, printing each suggestion as it fires.

#include <iostream>

#include "regmine/intervene.hpp"
#include "regmine/patterns.hpp"

int main() {
  using namespace regmine;

  StrategyStats encouragement;
  encouragement.event = EventLabel::Challenge;
  encouragement.valence = Valence::Negative;
  encouragement.strategy_name = "encouragement";
  encouragement.family = StrategyFamily::SituationModification;
  encouragement.instance_count = 3;
  encouragement.success_count = 2;

  TemplateTable templates = TemplateTable::from_csv_rows(
      {{"encouragement", "Hey {user}, you are closer than you think!"}});
  auto rules = compile_triggers({encouragement}, templates, 0.5);
  std::cout << rules_to_json(rules).dump(2) << "\n";

  EpisodeId id{"demo", 1, 0};
  Replayer replayer(rules);
  LabeledEvent ev;
  ev.pseudonym = "User3";
  ev.event = EventLabel::Challenge;
  ev.valence = Valence::Negative;
  for (std::size_t i = 0; i < 3; ++i) {
    ev.index = i;
    ev.msg_id = 10 + i;
    for (const auto& s : replayer.feed(id, ev))
      std::cout << "suggestion at msg " << s.msg_index << " for " << s.target_pseudonym << ": "
                << s.rendered_text << "\n";
  }
  std::cout << "(repeat triggers stay silent within the episode)\n";
  return 0;
}
