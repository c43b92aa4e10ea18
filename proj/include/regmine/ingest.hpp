#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "regmine/chat.hpp"
#include "regmine/csv.hpp"
#include "regmine/errors.hpp"
#include "regmine/labels.hpp"
#include "regmine/time.hpp"

namespace regmine {

// ---------------------------------------------------------------- parse_log

struct ParseIssue {
  std::size_t line = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<RawLine> lines;
  std::vector<ParseIssue> issues;
};

struct ParseConfig {
  bool lenient = true;  // strict mode throws at the first bad line
};

// Reads the JSONL export: one object per line with ts/user/text/channel and an
// optional attachments array. Bad lines are reported with their line number;
// in lenient mode parsing continues past them.
inline ParseResult parse_log(std::istream& in, const ParseConfig& cfg = {}) {
  ParseResult out;
  std::string line;
  std::size_t line_no = 0;
  bool saw_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    saw_content = true;
    auto bad = [&](const std::string& reason, Errc code) {
      if (!cfg.lenient) fail(code, "line " + std::to_string(line_no) + ": " + reason);
      out.issues.push_back({line_no, std::string(errc_name(code)) + ": " + reason});
    };
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      bad("not a JSON object", Errc::MalformedLine);
      continue;
    }
    if (!j.contains("ts") || !j["ts"].is_string() || !j.contains("user") ||
        !j["user"].is_string() || !j.contains("text") || !j["text"].is_string() ||
        !j.contains("channel") || !j["channel"].is_string()) {
      bad("missing or mistyped field", Errc::MalformedLine);
      continue;
    }
    RawLine r;
    r.ts = j["ts"].get<std::string>();
    r.user = j["user"].get<std::string>();
    r.text = j["text"].get<std::string>();
    r.channel = j["channel"].get<std::string>();
    if (j.contains("attachments")) {
      if (!j["attachments"].is_array()) {
        bad("attachments is not an array", Errc::MalformedLine);
        continue;
      }
      bool ok = true;
      for (const auto& a : j["attachments"]) {
        if (!a.is_string()) {
          ok = false;
          break;
        }
        r.attachments.push_back(a.get<std::string>());
      }
      if (!ok) {
        bad("attachment entry is not a string", Errc::MalformedLine);
        continue;
      }
    }
    try {
      r.epoch_ms = parse_iso8601(r.ts);
    } catch (const Error& e) {
      bad(e.what(), Errc::InvalidTimestamp);
      continue;
    }
    r.source_line = line_no;
    out.lines.push_back(std::move(r));
  }
  if (!saw_content) fail(Errc::EmptyFile, "no records in input");
  return out;
}

inline ParseResult parse_log(const std::string& content, const ParseConfig& cfg = {}) {
  std::istringstream in(content);
  return parse_log(in, cfg);
}

// ------------------------------------------------------- tokenize_surrogates

// Unicode emoji codepoint -> short name (table rows: hex codepoint, name).
class EmojiTable {
 public:
  void add(char32_t cp, const std::string& name) { names_[cp] = name; }

  const std::string* lookup(char32_t cp) const {
    auto it = names_.find(cp);
    return it == names_.end() ? nullptr : &it->second;
  }

  static EmojiTable from_csv_rows(const std::vector<std::vector<std::string>>& rows) {
    EmojiTable t;
    for (const auto& row : rows) {
      if (row.size() != 2) fail(Errc::MalformedLine, "emoji table row needs 2 fields");
      if (row[0] == "codepoint") continue;  // header
      t.add(static_cast<char32_t>(std::stoul(row[0], nullptr, 16)), row[1]);
    }
    return t;
  }

  static EmojiTable from_csv(const std::string& path) { return from_csv_rows(read_csv(path)); }

  std::size_t size() const { return names_.size(); }

 private:
  std::map<char32_t, std::string> names_;
};

namespace detail {

inline char32_t decode_utf8(const std::string& s, size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  char32_t cp = 0;
  int extra = 0;
  if (b0 < 0x80) {
    cp = b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    cp = b0 & 0x1F;
    extra = 1;
  } else if ((b0 & 0xF0) == 0xE0) {
    cp = b0 & 0x0F;
    extra = 2;
  } else if ((b0 & 0xF8) == 0xF0) {
    cp = b0 & 0x07;
    extra = 3;
  } else {
    ++i;
    return 0xFFFD;
  }
  ++i;
  for (int k = 0; k < extra; ++k) {
    if (i >= s.size() || (static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) return 0xFFFD;
    cp = (cp << 6) | (static_cast<unsigned char>(s[i]) & 0x3F);
    ++i;
  }
  return cp;
}

inline bool is_emoji_codepoint(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2B00 && cp <= 0x2BFF) || cp == 0x2764;
}

// Joiners and presentation selectors carry no content of their own.
inline bool is_emoji_glue(char32_t cp) {
  return cp == 0xFE0F || cp == 0xFE0E || cp == 0x200D || (cp >= 0x1F3FB && cp <= 0x1F3FF);
}

inline bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0;
}

}  // namespace detail

// Splits text on whitespace, keeps plain words unchanged, and replaces every
// emoji codepoint with its :name: token (":emoji_unknown:" when the table has
// no entry). Attachment entries are appended as surrogate tokens in order.
inline std::vector<std::string> tokenize_surrogates(const std::string& text,
                                                    const std::vector<std::string>& attachments,
                                                    const EmojiTable& emoji) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&]() {
    if (!word.empty()) {
      tokens.push_back(word);
      word.clear();
    }
  };
  size_t i = 0;
  while (i < text.size()) {
    const size_t start = i;
    const char32_t cp = detail::decode_utf8(text, i);
    if (detail::is_space(cp)) {
      flush();
    } else if (detail::is_emoji_glue(cp)) {
      // dropped: modifier for a neighboring emoji
    } else if (detail::is_emoji_codepoint(cp)) {
      flush();
      const std::string* name = emoji.lookup(cp);
      tokens.push_back(name ? ":" + *name + ":" : ":emoji_unknown:");
    } else {
      word.append(text, start, i - start);
    }
  }
  flush();
  for (const auto& a : attachments) {
    if (a == "image") tokens.push_back("[image]");
    else if (a == "file") tokens.push_back("[file]");
    else if (a.size() > 2 && a.front() == ':' && a.back() == ':') tokens.push_back(a);
    else tokens.push_back("[attachment]");
  }
  return tokens;
}

// --------------------------------------------------------------- pseudonymize

struct PseudonymizeResult {
  std::vector<RawLine> lines;
  PseudonymMap map;
};

// Replaces author ids by User1, User2, ... in order of first appearance and
// redacts exact raw-id matches inside message text (longer ids first, so
// overlapping ids cannot leave fragments behind).
inline PseudonymizeResult pseudonymize(const std::vector<RawLine>& lines) {
  PseudonymizeResult out;
  out.lines = lines;
  for (auto& l : out.lines) l.user = out.map.assign(l.user);

  auto ids = out.map.entries();
  std::sort(ids.begin(), ids.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    return a.first < b.first;
  });
  for (auto& l : out.lines) {
    for (const auto& [raw, pseudo] : ids) {
      if (raw.empty()) continue;
      size_t pos = 0;
      while ((pos = l.text.find(raw, pos)) != std::string::npos) {
        l.text.replace(pos, raw.size(), pseudo);
        pos += pseudo.size();
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- normalize

// Orders lines by (channel, time, input order), assigns corpus-unique msg_ids,
// and produces tokenized, pseudonymized messages.
inline std::vector<ChatMessage> normalize_corpus(const std::vector<RawLine>& raw,
                                                 const EmojiTable& emoji,
                                                 PseudonymMap* map_out = nullptr) {
  PseudonymizeResult ps = pseudonymize(raw);
  std::stable_sort(ps.lines.begin(), ps.lines.end(), [](const RawLine& a, const RawLine& b) {
    if (a.channel != b.channel) return a.channel < b.channel;
    return a.epoch_ms < b.epoch_ms;
  });
  std::vector<ChatMessage> out;
  out.reserve(ps.lines.size());
  for (size_t i = 0; i < ps.lines.size(); ++i) {
    const RawLine& l = ps.lines[i];
    ChatMessage m;
    m.msg_id = i;
    m.ts = l.ts;
    m.epoch_ms = l.epoch_ms;
    m.pseudonym = l.user;
    m.text = l.text;
    m.tokens = tokenize_surrogates(l.text, l.attachments, emoji);
    m.channel = l.channel;
    out.push_back(std::move(m));
  }
  if (map_out) *map_out = std::move(ps.map);
  return out;
}

// ----------------------------------------------------------- segment_episodes

struct SegmentConfig {
  std::int64_t max_gap_ms = 30 * 60 * 1000;
  EventLabel start_event = EventLabel::GettingPuzzle;
  EventLabel end_event = EventLabel::Success;
};

// Boundary-relevant labels per msg_id; usually projected from gold annotations
// or from the bot-message heuristics when no gold labels exist.
using BoundaryLabels = std::map<std::size_t, EventLabel>;

// Splits each channel's time-ordered stream into episodes. A new episode
// starts at every start_event message and after any silence longer than
// max_gap_ms; an end_event closes the episode after itself. Every message
// lands in exactly one episode and input order is preserved.
inline std::vector<Episode> segment_episodes(const std::vector<ChatMessage>& messages,
                                             const BoundaryLabels& boundaries,
                                             const SegmentConfig& cfg = {}) {
  std::vector<Episode> out;
  Episode cur;
  std::size_t puzzle = 0, seq = 0;
  bool open = false, ended = false;
  std::string channel;
  bool have_channel = false;
  std::set<std::string> closed_channels;
  EpochMs last_ts = 0;

  auto flush = [&]() {
    if (open && !cur.messages.empty()) out.push_back(std::move(cur));
    cur = Episode{};
    open = false;
    ended = false;
  };

  for (const auto& m : messages) {
    auto lbl = boundaries.find(m.msg_id);
    const bool starts = lbl != boundaries.end() && lbl->second == cfg.start_event;
    const bool ends = lbl != boundaries.end() && lbl->second == cfg.end_event;
    const bool new_channel = !have_channel || m.channel != channel;
    if (!new_channel && m.epoch_ms < last_ts)
      fail(Errc::UnorderedInput,
           "msg " + std::to_string(m.msg_id) + " goes back in time within " + m.channel);

    if (new_channel) {
      if (closed_channels.count(m.channel))
        fail(Errc::UnorderedInput, "channel " + m.channel + " is not contiguous");
      if (have_channel) closed_channels.insert(channel);
      flush();
      puzzle = 0;
      seq = 0;
      channel = m.channel;
      have_channel = true;
    }
    if (starts) {
      flush();
      ++puzzle;
      seq = 0;
    } else if (open && (ended || m.epoch_ms - last_ts > cfg.max_gap_ms)) {
      flush();
      ++seq;
    }

    if (!open) {
      cur.id = EpisodeId{m.channel, puzzle, seq};
      open = true;
    }
    cur.messages.push_back(m);
    last_ts = m.epoch_ms;
    if (ends) ended = true;
  }
  flush();
  return out;
}

}  // namespace regmine
