#pragma once

#include <optional>
#include <string>

#include "regmine/errors.hpp"

namespace regmine {

enum class EventLabel { None, Failure, Conflict, Challenge, GettingPuzzle, Success };
enum class Valence { Negative, Neutral, Positive };

inline const char* to_string(EventLabel e) {
  switch (e) {
    case EventLabel::None: return "None";
    case EventLabel::Failure: return "Failure";
    case EventLabel::Conflict: return "Conflict";
    case EventLabel::Challenge: return "Challenge";
    case EventLabel::GettingPuzzle: return "GettingPuzzle";
    case EventLabel::Success: return "Success";
  }
  return "None";
}

inline const char* to_string(Valence v) {
  switch (v) {
    case Valence::Negative: return "Negative";
    case Valence::Neutral: return "Neutral";
    case Valence::Positive: return "Positive";
  }
  return "Neutral";
}

inline EventLabel event_from_string(const std::string& s) {
  if (s == "None") return EventLabel::None;
  if (s == "Failure") return EventLabel::Failure;
  if (s == "Conflict") return EventLabel::Conflict;
  if (s == "Challenge") return EventLabel::Challenge;
  if (s == "GettingPuzzle") return EventLabel::GettingPuzzle;
  if (s == "Success") return EventLabel::Success;
  fail(Errc::UnknownCategory, "event '" + s + "'");
}

inline Valence valence_from_string(const std::string& s) {
  if (s == "Negative") return Valence::Negative;
  if (s == "Neutral") return Valence::Neutral;
  if (s == "Positive") return Valence::Positive;
  fail(Errc::UnknownCategory, "valence '" + s + "'");
}

inline bool is_system_event(EventLabel e) {
  return e == EventLabel::GettingPuzzle || e == EventLabel::Success;
}

inline bool is_pain_point(EventLabel e) {
  return e == EventLabel::Failure || e == EventLabel::Conflict || e == EventLabel::Challenge;
}

// A message is part of the labeled event sequence once it carries an event or
// a non-neutral valence; (None, Neutral) is unlabeled background chatter.
inline bool is_labeled(EventLabel e, Valence v) {
  return e != EventLabel::None || v != Valence::Neutral;
}

struct CompositeLabel {
  std::optional<std::string> pseudonym;  // empty for system events
  EventLabel event = EventLabel::None;
  Valence valence = Valence::Neutral;

  bool operator==(const CompositeLabel&) const = default;
  bool operator<(const CompositeLabel& o) const {
    if (pseudonym != o.pseudonym) return pseudonym < o.pseudonym;
    if (event != o.event) return static_cast<int>(event) < static_cast<int>(o.event);
    return static_cast<int>(valence) < static_cast<int>(o.valence);
  }
};

namespace detail {
inline std::string valence_suffix(Valence v) {
  switch (v) {
    case Valence::Positive: return " Positive emotion";
    case Valence::Negative: return " Negative emotion";
    case Valence::Neutral: return "";
  }
  return "";
}
}  // namespace detail

// Rendered forms, one per (pseudonym, event, valence):
//   "Getting Puzzle" / "Success"            system events (valence suffix if any)
//   "User1-Failure Negative emotion"        user event, non-neutral valence
//   "User1-Challenge"                       user event, neutral valence
//   "User3 Negative emotion"                affect only (event None)
//   "User3"                                 degenerate (None, Neutral)
inline std::string compose_label(const CompositeLabel& l) {
  if (is_system_event(l.event)) {
    const std::string base = l.event == EventLabel::GettingPuzzle ? "Getting Puzzle" : "Success";
    return base + detail::valence_suffix(l.valence);
  }
  const std::string who = l.pseudonym ? *l.pseudonym : "";
  if (l.event == EventLabel::None) return who + detail::valence_suffix(l.valence);
  return who + "-" + to_string(l.event) + detail::valence_suffix(l.valence);
}

inline std::string compose_label(const std::optional<std::string>& pseudonym, EventLabel e,
                                 Valence v) {
  return compose_label(CompositeLabel{pseudonym, e, v});
}

inline CompositeLabel parse_label(const std::string& s) {
  CompositeLabel out;
  std::string rest = s;
  auto strip_valence = [&rest, &out]() {
    const std::string pos = " Positive emotion", neg = " Negative emotion";
    if (rest.size() > pos.size() && rest.compare(rest.size() - pos.size(), pos.size(), pos) == 0) {
      out.valence = Valence::Positive;
      rest.resize(rest.size() - pos.size());
    } else if (rest.size() > neg.size() &&
               rest.compare(rest.size() - neg.size(), neg.size(), neg) == 0) {
      out.valence = Valence::Negative;
      rest.resize(rest.size() - neg.size());
    }
  };
  strip_valence();
  if (rest == "Getting Puzzle") {
    out.event = EventLabel::GettingPuzzle;
    return out;
  }
  if (rest == "Success") {
    out.event = EventLabel::Success;
    return out;
  }
  const size_t dash = rest.find('-');
  if (dash == std::string::npos) {
    if (rest.empty()) fail(Errc::UnknownCategory, "empty label '" + s + "'");
    out.pseudonym = rest;
    out.event = EventLabel::None;
    return out;
  }
  out.pseudonym = rest.substr(0, dash);
  out.event = event_from_string(rest.substr(dash + 1));
  if (out.pseudonym->empty()) fail(Errc::UnknownCategory, "label without user '" + s + "'");
  return out;
}

// One row of an annotation CSV (msg_id, annotator, event, valence).
struct Annotation {
  std::size_t msg_id = 0;
  std::string annotator;
  EventLabel event = EventLabel::None;
  Valence valence = Valence::Neutral;

  bool operator==(const Annotation&) const = default;
};

}  // namespace regmine
