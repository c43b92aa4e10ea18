#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "regmine/chat.hpp"
#include "regmine/csv.hpp"
#include "regmine/errors.hpp"
#include "regmine/ingest.hpp"
#include "regmine/labels.hpp"

namespace regmine {

// ------------------------------------------------------------ annotations

// Rows from one annotation CSV (msg_id,annotator,event,valence), any number of
// annotators per file. Values must use the exact enum spellings.
inline std::vector<Annotation> load_annotation_rows(
    const std::vector<std::vector<std::string>>& rows, const std::set<std::size_t>& corpus_ids) {
  std::vector<Annotation> out;
  std::set<std::pair<std::size_t, std::string>> seen;
  for (const auto& row : rows) {
    if (row.size() != 4) fail(Errc::MalformedLine, "annotation row needs 4 fields");
    if (row[0] == "msg_id") continue;  // header
    Annotation a;
    try {
      a.msg_id = std::stoull(row[0]);
    } catch (const std::exception&) {
      fail(Errc::MalformedLine, "bad msg_id '" + row[0] + "'");
    }
    a.annotator = row[1];
    a.event = event_from_string(row[2]);
    a.valence = valence_from_string(row[3]);
    if (!corpus_ids.count(a.msg_id))
      fail(Errc::UnknownMessageId, "msg_id " + row[0] + " not in corpus");
    if (!seen.insert({a.msg_id, a.annotator}).second)
      fail(Errc::DuplicateRating, "msg " + row[0] + " rated twice by " + a.annotator);
    out.push_back(std::move(a));
  }
  return out;
}

inline std::vector<Annotation> load_annotations(const std::string& path,
                                                const std::set<std::size_t>& corpus_ids) {
  return load_annotation_rows(read_csv(path), corpus_ids);
}

// One annotator's ratings keyed by message.
using AnnotatorRatings = std::map<std::size_t, Annotation>;

inline std::map<std::string, AnnotatorRatings> group_by_annotator(
    const std::vector<Annotation>& rows) {
  std::map<std::string, AnnotatorRatings> out;
  for (const auto& a : rows) out[a.annotator][a.msg_id] = a;
  return out;
}

// ---------------------------------------------------------- merge_annotators

struct ConsensusLabel {
  std::size_t msg_id = 0;
  EventLabel event = EventLabel::None;
  Valence valence = Valence::Neutral;
  bool event_tied = false;
  bool valence_tied = false;
  std::vector<std::string> event_candidates;    // tied alternatives, sorted
  std::vector<std::string> valence_candidates;  // tied alternatives, sorted
};

namespace detail {

// Majority winner among string-named categories; on a tie the
// lexicographically smallest tied name wins and the tie is reported.
inline std::pair<std::string, std::vector<std::string>> majority(
    const std::vector<std::string>& votes) {
  std::map<std::string, int> counts;
  for (const auto& v : votes) ++counts[v];
  int best = 0;
  for (const auto& [_, c] : counts) best = std::max(best, c);
  std::vector<std::string> tied;
  for (const auto& [name, c] : counts)
    if (c == best) tied.push_back(name);
  return {tied.front(), tied.size() > 1 ? tied : std::vector<std::string>{}};
}

}  // namespace detail

// Per-message majority vote over event and valence independently. All sets
// must cover the same message ids; ties are flagged, never dropped.
inline std::vector<ConsensusLabel> merge_annotators(
    const std::map<std::string, AnnotatorRatings>& sets) {
  if (sets.empty()) fail(Errc::TooFewRaters, "no annotation sets");
  const AnnotatorRatings& first = sets.begin()->second;
  std::set<std::size_t> ids;
  for (const auto& [id, _] : first) ids.insert(id);
  for (const auto& [name, ratings] : sets) {
    if (ratings.size() != ids.size())
      fail(Errc::CoverageMismatch, "annotator " + name + " covers a different message set");
    for (const auto& [id, _] : ratings)
      if (!ids.count(id))
        fail(Errc::CoverageMismatch, "annotator " + name + " covers a different message set");
  }

  std::vector<ConsensusLabel> out;
  for (const std::size_t id : ids) {
    std::vector<std::string> event_votes, valence_votes;
    for (const auto& [_, ratings] : sets) {
      const Annotation& a = ratings.at(id);
      event_votes.push_back(to_string(a.event));
      valence_votes.push_back(to_string(a.valence));
    }
    ConsensusLabel c;
    c.msg_id = id;
    auto [event_win, event_tie] = detail::majority(event_votes);
    auto [valence_win, valence_tie] = detail::majority(valence_votes);
    c.event = event_from_string(event_win);
    c.valence = valence_from_string(valence_win);
    c.event_tied = !event_tie.empty();
    c.valence_tied = !valence_tie.empty();
    c.event_candidates = std::move(event_tie);
    c.valence_candidates = std::move(valence_tie);
    out.push_back(std::move(c));
  }
  return out;
}

// ----------------------------------------------------------------- lexicon

// term -> signed integer weight; terms lowercase, weights nonzero.
class Lexicon {
 public:
  void add(const std::string& term, int weight) { weights_[term] = weight; }

  int weight(const std::string& term) const {
    auto it = weights_.find(term);
    return it == weights_.end() ? 0 : it->second;
  }

  std::size_t size() const { return weights_.size(); }

  static Lexicon from_csv_rows(const std::vector<std::vector<std::string>>& rows) {
    Lexicon lex;
    for (const auto& row : rows) {
      if (row.size() != 2) fail(Errc::MalformedLine, "lexicon row needs 2 fields");
      if (row[0] == "term") continue;  // header
      int w = 0;
      try {
        w = std::stoi(row[1]);
      } catch (const std::exception&) {
        fail(Errc::MalformedLine, "bad weight '" + row[1] + "'");
      }
      if (w == 0) fail(Errc::MalformedLine, "zero weight for '" + row[0] + "'");
      for (char ch : row[0])
        if (std::isupper(static_cast<unsigned char>(ch)))
          fail(Errc::MalformedLine, "lexicon term not lowercase: '" + row[0] + "'");
      lex.add(row[0], w);
    }
    return lex;
  }

  static Lexicon from_csv(const std::string& path) { return from_csv_rows(read_csv(path)); }

 private:
  std::map<std::string, int> weights_;
};

// Lookup form of a token: lowercased, outer punctuation stripped. Emoji
// surrogates (:name:) pass through untouched.
inline std::string normalize_token(const std::string& token) {
  if (token.size() > 2 && token.front() == ':' && token.back() == ':') return token;
  size_t b = 0, e = token.size();
  auto is_punct = [](char c) {
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':' || c == '"' ||
           c == '\'' || c == '(' || c == ')' || c == '*' || c == '~';
  };
  while (b < e && is_punct(token[b])) ++b;
  while (e > b && is_punct(token[e - 1])) --e;
  std::string out = token.substr(b, e - b);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline int score_tokens(const std::vector<std::string>& tokens, const Lexicon& lex) {
  int sum = 0;
  for (const auto& t : tokens) sum += lex.weight(normalize_token(t));
  return sum;
}

inline Valence valence_from_score(int score) {
  if (score > 0) return Valence::Positive;
  if (score < 0) return Valence::Negative;
  return Valence::Neutral;
}

// ---------------------------------------------------------------- auto_label

struct AutoLabelConfig {
  std::vector<std::string> bot_pseudonyms;
  std::vector<std::string> getting_puzzle_markers = {"puzzle"};
  std::vector<std::string> success_markers = {"correct", "solved", "well done", "you got it"};
  std::vector<std::string> bot_failure_markers = {"not the", "wrong", "try again", "not right",
                                                  "nope"};
  std::vector<std::string> player_failure_markers = {"guess failed", "didn't work", "doesn't work",
                                                     "wrong again", "it says no", "also no",
                                                     "rejected"};
  std::vector<std::string> conflict_markers = {"disagree", "no way", "you're wrong",
                                               "that makes no sense", "stop it"};
  std::vector<std::string> difficulty_markers = {"confused", "stuck", "hard", "difficult",
                                                 "no idea", "don't understand", "can't figure",
                                                 "lost"};
};

namespace detail {

inline std::string lower_ascii(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool contains_any(const std::string& haystack, const std::vector<std::string>& needles) {
  for (const auto& n : needles)
    if (!n.empty() && haystack.find(n) != std::string::npos) return true;
  return false;
}

}  // namespace detail

// Heuristic labeler: ordered first-match event rules plus lexicon-scored
// valence. Gold annotations, when present, take precedence downstream.
inline std::vector<Annotation> auto_label(const Episode& episode, const Lexicon& lexicon,
                                          const AutoLabelConfig& cfg) {
  std::vector<Annotation> out;
  bool awaiting_first_reaction = false;
  for (const auto& m : episode.messages) {
    const bool is_bot = std::find(cfg.bot_pseudonyms.begin(), cfg.bot_pseudonyms.end(),
                                  m.pseudonym) != cfg.bot_pseudonyms.end();
    const std::string text = detail::lower_ascii(m.text);
    Annotation a;
    a.msg_id = m.msg_id;
    a.annotator = "auto";
    if (is_bot && detail::contains_any(text, cfg.getting_puzzle_markers)) {
      a.event = EventLabel::GettingPuzzle;
      awaiting_first_reaction = true;
    } else if (is_bot && detail::contains_any(text, cfg.success_markers)) {
      a.event = EventLabel::Success;
    } else if ((is_bot && detail::contains_any(text, cfg.bot_failure_markers)) ||
               (!is_bot && detail::contains_any(text, cfg.player_failure_markers))) {
      a.event = EventLabel::Failure;
    } else if (!is_bot && detail::contains_any(text, cfg.conflict_markers)) {
      a.event = EventLabel::Conflict;
    } else if (!is_bot && (awaiting_first_reaction ||
                           detail::contains_any(text, cfg.difficulty_markers))) {
      a.event = EventLabel::Challenge;
      awaiting_first_reaction = false;
    } else {
      a.event = EventLabel::None;
    }
    if (!is_bot && a.event != EventLabel::None) awaiting_first_reaction = false;
    a.valence = is_bot ? Valence::Neutral : valence_from_score(score_tokens(m.tokens, lexicon));
    out.push_back(std::move(a));
  }
  return out;
}

// ------------------------------------------------------------- apply labels

// Final (event, valence) per message after gold/auto resolution.
struct ResolvedLabel {
  EventLabel event = EventLabel::None;
  Valence valence = Valence::Neutral;
  std::string source;  // "gold" or "auto"
};

inline LabeledEpisode apply_labels(const Episode& episode,
                                   const std::map<std::size_t, ResolvedLabel>& labels) {
  LabeledEpisode out;
  out.id = episode.id;
  out.all_messages = episode.messages;
  for (const auto& m : episode.messages) {
    auto it = labels.find(m.msg_id);
    if (it == labels.end()) continue;
    const ResolvedLabel& r = it->second;
    if (!is_labeled(r.event, r.valence)) continue;
    LabeledEvent ev;
    ev.index = out.events.size();
    ev.msg_id = m.msg_id;
    ev.pseudonym = m.pseudonym;
    ev.event = r.event;
    ev.valence = r.valence;
    ev.source = r.source;
    out.events.push_back(std::move(ev));
  }
  return out;
}

// Boundary view of a label map, for segmentation.
inline BoundaryLabels boundary_labels(const std::map<std::size_t, ResolvedLabel>& labels) {
  BoundaryLabels out;
  for (const auto& [id, r] : labels)
    if (is_system_event(r.event)) out[id] = r.event;
  return out;
}

}  // namespace regmine
