#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regmine/labels.hpp"
#include "regmine/time.hpp"

namespace regmine {

// A line as it appears in the source JSONL, before any normalization.
struct RawLine {
  std::string ts;
  std::string user;
  std::string text;
  std::string channel;
  std::vector<std::string> attachments;
  EpochMs epoch_ms = 0;
  std::size_t source_line = 0;  // 1-based line number in the input file
};

// Normalized message: pseudonymized author and surrogate-token stream.
struct ChatMessage {
  std::size_t msg_id = 0;  // corpus-unique ordinal, time-ordered within channel
  std::string ts;
  EpochMs epoch_ms = 0;
  std::string pseudonym;
  std::string text;
  std::vector<std::string> tokens;
  std::string channel;
};

struct EpisodeId {
  std::string team;
  std::size_t puzzle = 0;  // 0 = chatter before the first puzzle
  std::size_t seq = 0;     // split counter inside one puzzle

  bool operator==(const EpisodeId&) const = default;
  bool operator<(const EpisodeId& o) const {
    if (team != o.team) return team < o.team;
    if (puzzle != o.puzzle) return puzzle < o.puzzle;
    return seq < o.seq;
  }
  std::string str() const {
    return team + "_" + std::to_string(puzzle) + "_" + std::to_string(seq);
  }
};

struct Episode {
  EpisodeId id;
  std::vector<ChatMessage> messages;
};

// One labeled event inside an episode. `index` is the event's position in the
// episode's labeled sequence, not the message id.
struct LabeledEvent {
  std::size_t index = 0;
  std::size_t msg_id = 0;
  std::string pseudonym;
  EventLabel event = EventLabel::None;
  Valence valence = Valence::Neutral;
  std::string source;  // "gold" or "auto"

  CompositeLabel composite() const {
    std::optional<std::string> who;
    if (!is_system_event(event)) who = pseudonym;
    return CompositeLabel{who, event, valence};
  }
  std::string label() const { return compose_label(composite()); }
};

struct LabeledEpisode {
  EpisodeId id;
  std::vector<LabeledEvent> events;        // only labeled messages, in time order
  std::vector<ChatMessage> all_messages;   // every message of the episode
};

// Raw id -> pseudonym, assigned User1, User2, ... by first appearance.
class PseudonymMap {
 public:
  const std::string& assign(const std::string& raw_id) {
    auto it = forward_.find(raw_id);
    if (it != forward_.end()) return it->second;
    const std::string pseudo = "User" + std::to_string(forward_.size() + 1);
    auto [ins, _] = forward_.emplace(raw_id, pseudo);
    ordered_.push_back(raw_id);
    return ins->second;
  }

  const std::string* lookup(const std::string& raw_id) const {
    auto it = forward_.find(raw_id);
    return it == forward_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return forward_.size(); }

  // (raw_id, pseudonym) in assignment order; only --emit-map should write this.
  std::vector<std::pair<std::string, std::string>> entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(ordered_.size());
    for (const auto& raw : ordered_) out.emplace_back(raw, forward_.at(raw));
    return out;
  }

 private:
  std::map<std::string, std::string> forward_;
  std::vector<std::string> ordered_;
};

}  // namespace regmine
