#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "regmine/annotate.hpp"
#include "regmine/errors.hpp"
#include "support.hpp"

using namespace regmine;

namespace {

using Rows = std::vector<std::vector<std::string>>;

const std::set<std::size_t> kIds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

ChatMessage msg(std::size_t id, const std::string& user, const std::string& text,
                const std::vector<std::string>& tokens) {
  ChatMessage m;
  m.msg_id = id;
  m.pseudonym = user;
  m.text = text;
  m.tokens = tokens;
  return m;
}

}  // namespace

TEST_CASE("annotation rows load with a header and exact enum spellings") {
  Rows rows = {
      {"msg_id", "annotator", "event", "valence"},
      {"3", "a", "Failure", "Negative"},
      {"4", "a", "None", "Positive"},
      {"3", "b", "Challenge", "Neutral"},
  };
  auto loaded = load_annotation_rows(rows, kIds);
  REQUIRE(loaded.size() == 3);
  CHECK(loaded[0].msg_id == 3);
  CHECK(loaded[0].annotator == "a");
  CHECK(loaded[0].event == EventLabel::Failure);
  CHECK(loaded[0].valence == Valence::Negative);
  CHECK(loaded[1].event == EventLabel::None);
}

TEST_CASE("annotation loader rejects malformed and inconsistent rows") {
  CHECK_THROWS_MATCHES(load_annotation_rows({{"1", "a", "Failure"}}, kIds), Error,
                       ErrorCodeIs(Errc::MalformedLine));
  CHECK_THROWS_MATCHES(load_annotation_rows({{"x", "a", "Failure", "Neutral"}}, kIds), Error,
                       ErrorCodeIs(Errc::MalformedLine));
  CHECK_THROWS_MATCHES(load_annotation_rows({{"1", "a", "Oops", "Neutral"}}, kIds), Error,
                       ErrorCodeIs(Errc::UnknownCategory));
  CHECK_THROWS_MATCHES(load_annotation_rows({{"1", "a", "Failure", "meh"}}, kIds), Error,
                       ErrorCodeIs(Errc::UnknownCategory));
  CHECK_THROWS_MATCHES(load_annotation_rows({{"99", "a", "Failure", "Neutral"}}, kIds), Error,
                       ErrorCodeIs(Errc::UnknownMessageId));
  CHECK_THROWS_MATCHES(
      load_annotation_rows({{"1", "a", "Failure", "Neutral"}, {"1", "a", "Success", "Neutral"}},
                           kIds),
      Error, ErrorCodeIs(Errc::DuplicateRating));
}

TEST_CASE("merging annotators takes per-field majorities") {
  Rows rows = {
      {"0", "a", "Failure", "Negative"},
      {"0", "b", "Failure", "Neutral"},
      {"0", "c", "Challenge", "Negative"},
      {"1", "a", "None", "Positive"},
      {"1", "b", "None", "Positive"},
      {"1", "c", "None", "Positive"},
  };
  auto merged = merge_annotators(group_by_annotator(load_annotation_rows(rows, kIds)));
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].msg_id == 0);
  CHECK(merged[0].event == EventLabel::Failure);
  CHECK(merged[0].valence == Valence::Negative);
  CHECK_FALSE(merged[0].event_tied);
  CHECK_FALSE(merged[0].valence_tied);
  CHECK(merged[1].event == EventLabel::None);
  CHECK(merged[1].valence == Valence::Positive);
}

TEST_CASE("vote ties pick the lexicographically smallest name and are flagged") {
  Rows rows = {
      {"0", "a", "Failure", "Negative"},
      {"0", "b", "Challenge", "Positive"},
  };
  auto merged = merge_annotators(group_by_annotator(load_annotation_rows(rows, kIds)));
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].event == EventLabel::Challenge);  // "Challenge" < "Failure"
  CHECK(merged[0].valence == Valence::Negative);    // "Negative" < "Positive"
  CHECK(merged[0].event_tied);
  CHECK(merged[0].valence_tied);
  CHECK(merged[0].event_candidates == std::vector<std::string>{"Challenge", "Failure"});
  CHECK(merged[0].valence_candidates == std::vector<std::string>{"Negative", "Positive"});
}

TEST_CASE("merge rejects ragged coverage and empty input") {
  Rows rows = {
      {"0", "a", "Failure", "Negative"},
      {"1", "a", "Failure", "Negative"},
      {"0", "b", "Failure", "Negative"},
  };
  CHECK_THROWS_MATCHES(merge_annotators(group_by_annotator(load_annotation_rows(rows, kIds))),
                       Error, ErrorCodeIs(Errc::CoverageMismatch));

  Rows disjoint = {
      {"0", "a", "Failure", "Negative"},
      {"1", "b", "Failure", "Negative"},
  };
  CHECK_THROWS_MATCHES(merge_annotators(group_by_annotator(load_annotation_rows(disjoint, kIds))),
                       Error, ErrorCodeIs(Errc::CoverageMismatch));

  CHECK_THROWS_MATCHES(merge_annotators({}), Error, ErrorCodeIs(Errc::TooFewRaters));
}

TEST_CASE("random vote sets agree with a direct mode computation") {
  const std::vector<std::string> events = {"None", "Failure", "Conflict", "Challenge"};
  const std::vector<std::string> valences = {"Negative", "Neutral", "Positive"};
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    const int raters = 1 + static_cast<int>(rng() % 5);
    const int msgs = 1 + static_cast<int>(rng() % 6);
    std::map<std::string, AnnotatorRatings> sets;
    std::map<std::size_t, std::map<std::string, int>> event_votes, valence_votes;
    for (int r = 0; r < raters; ++r) {
      const std::string name = "r" + std::to_string(r);
      for (std::size_t m = 0; m < static_cast<std::size_t>(msgs); ++m) {
        Annotation a;
        a.msg_id = m;
        a.annotator = name;
        a.event = event_from_string(events[rng() % events.size()]);
        a.valence = valence_from_string(valences[rng() % valences.size()]);
        sets[name][m] = a;
        ++event_votes[m][to_string(a.event)];
        ++valence_votes[m][to_string(a.valence)];
      }
    }
    auto winner = [](const std::map<std::string, int>& votes) {
      int best = 0;
      for (const auto& [_, c] : votes) best = std::max(best, c);
      for (const auto& [name, c] : votes)
        if (c == best) return name;  // std::map iterates names in order
      return std::string{};
    };
    auto merged = merge_annotators(sets);
    REQUIRE(merged.size() == static_cast<std::size_t>(msgs));
    for (const auto& c : merged) {
      CHECK(to_string(c.event) == winner(event_votes[c.msg_id]));
      CHECK(to_string(c.valence) == winner(valence_votes[c.msg_id]));
    }
  }
}

TEST_CASE("lexicon rows are validated") {
  auto lex = Lexicon::from_csv_rows({{"term", "weight"}, {"great", "1"}, {":weary:", "-2"}});
  CHECK(lex.size() == 2);
  CHECK(lex.weight("great") == 1);
  CHECK(lex.weight(":weary:") == -2);
  CHECK(lex.weight("absent") == 0);

  CHECK_THROWS_MATCHES(Lexicon::from_csv_rows({{"solo"}}), Error,
                       ErrorCodeIs(Errc::MalformedLine));
  CHECK_THROWS_MATCHES(Lexicon::from_csv_rows({{"x", "abc"}}), Error,
                       ErrorCodeIs(Errc::MalformedLine));
  CHECK_THROWS_MATCHES(Lexicon::from_csv_rows({{"x", "0"}}), Error,
                       ErrorCodeIs(Errc::MalformedLine));
  CHECK_THROWS_MATCHES(Lexicon::from_csv_rows({{"Shout", "1"}}), Error,
                       ErrorCodeIs(Errc::MalformedLine));
}

TEST_CASE("token normalization strips outer punctuation but keeps surrogates") {
  CHECK(normalize_token("Great!!") == "great");
  CHECK(normalize_token("(WOW)") == "wow");
  CHECK(normalize_token("don't") == "don't");
  CHECK(normalize_token(":smile:") == ":smile:");
  CHECK(normalize_token("...") == "");
  CHECK(normalize_token("o7") == "o7");
}

TEST_CASE("token scores map onto valence") {
  Lexicon lex;
  lex.add("great", 1);
  lex.add(":smile:", 1);
  lex.add("stuck", -1);
  lex.add("awful", -2);

  CHECK(score_tokens({"great", "job", ":smile:"}, lex) == 2);
  CHECK(score_tokens({"GREAT,", "job!"}, lex) == 1);
  CHECK(score_tokens({"great", "awful"}, lex) == -1);

  CHECK(valence_from_score(2) == Valence::Positive);
  CHECK(valence_from_score(0) == Valence::Neutral);
  CHECK(valence_from_score(-1) == Valence::Negative);
}

TEST_CASE("auto labeling applies ordered first-match event rules") {
  Lexicon lex;
  lex.add("yay", 1);
  lex.add("ugh", -1);
  AutoLabelConfig cfg;
  cfg.bot_pseudonyms = {"User9"};

  Episode ep;
  ep.messages = {
      msg(0, "User9", "Puzzle 12: find the key", {"puzzle", "12:"}),
      msg(1, "User1", "ok here goes", {"ok", "here", "goes"}),   // first reaction
      msg(2, "User1", "ugh that was wrong again", {"ugh", "that", "was", "wrong", "again"}),
      msg(3, "User9", "That is not the answer, try again", {}),
      msg(4, "User1", "I disagree, it must be the lamp", {"i", "disagree"}),
      msg(5, "User1", "so stuck on this", {"so", "stuck"}),
      msg(6, "User1", "yay nice one", {"yay", "nice", "one"}),
      msg(7, "User9", "Correct! Moving on", {}),
  };
  auto labels = auto_label(ep, lex, cfg);
  REQUIRE(labels.size() == 8);
  CHECK(labels[0].event == EventLabel::GettingPuzzle);
  CHECK(labels[0].valence == Valence::Neutral);  // bot messages stay neutral
  CHECK(labels[1].event == EventLabel::Challenge);
  CHECK(labels[1].valence == Valence::Neutral);
  CHECK(labels[2].event == EventLabel::Failure);  // "wrong again" beats difficulty
  CHECK(labels[2].valence == Valence::Negative);
  CHECK(labels[3].event == EventLabel::Failure);  // bot wrong-answer reply
  CHECK(labels[3].valence == Valence::Neutral);
  CHECK(labels[4].event == EventLabel::Conflict);
  CHECK(labels[5].event == EventLabel::Challenge);  // difficulty marker
  CHECK(labels[6].event == EventLabel::None);
  CHECK(labels[6].valence == Valence::Positive);
  CHECK(labels[7].event == EventLabel::Success);
  for (const auto& a : labels) CHECK(a.annotator == "auto");
}

TEST_CASE("only the first player reaction after a puzzle is a default challenge") {
  AutoLabelConfig cfg;
  cfg.bot_pseudonyms = {"Bot"};
  Episode ep;
  ep.messages = {
      msg(0, "Bot", "puzzle time", {}),
      msg(1, "User1", "hmm", {}),
      msg(2, "User2", "hello", {}),
  };
  auto labels = auto_label(ep, Lexicon{}, cfg);
  CHECK(labels[1].event == EventLabel::Challenge);
  CHECK(labels[2].event == EventLabel::None);
}

TEST_CASE("player markers never fire on bot text and vice versa") {
  AutoLabelConfig cfg;
  cfg.bot_pseudonyms = {"Bot"};
  Episode ep;
  ep.messages = {
      msg(0, "User1", "showing the puzzle to my cat", {}),  // puzzle marker, not a bot
      msg(1, "Bot", "status: guess failed", {}),            // player marker, not a player
  };
  auto labels = auto_label(ep, Lexicon{}, cfg);
  CHECK(labels[0].event == EventLabel::None);
  CHECK(labels[1].event == EventLabel::None);
}

TEST_CASE("applying labels keeps only labeled events and renumbers them") {
  Episode ep;
  ep.id = EpisodeId{"team1", 2, 0};
  ep.messages = {
      msg(10, "User1", "a", {}),
      msg(11, "User2", "b", {}),
      msg(12, "User3", "c", {}),
      msg(13, "User1", "d", {}),
  };
  std::map<std::size_t, ResolvedLabel> labels;
  labels[10] = {EventLabel::GettingPuzzle, Valence::Neutral, "gold"};
  labels[11] = {EventLabel::None, Valence::Neutral, "auto"};  // unlabeled: dropped
  labels[13] = {EventLabel::None, Valence::Negative, "gold"};

  LabeledEpisode out = apply_labels(ep, labels);
  CHECK(out.id.str() == "team1_2_0");
  CHECK(out.all_messages.size() == 4);
  REQUIRE(out.events.size() == 2);
  CHECK(out.events[0].index == 0);
  CHECK(out.events[0].msg_id == 10);
  CHECK(out.events[0].label() == "Getting Puzzle");
  CHECK(out.events[1].index == 1);
  CHECK(out.events[1].msg_id == 13);
  CHECK(out.events[1].pseudonym == "User1");
  CHECK(out.events[1].label() == "User1 Negative emotion");
  CHECK(out.events[1].source == "gold");
}

TEST_CASE("boundary projection keeps only system events") {
  std::map<std::size_t, ResolvedLabel> labels;
  labels[0] = {EventLabel::GettingPuzzle, Valence::Neutral, "gold"};
  labels[1] = {EventLabel::Failure, Valence::Negative, "gold"};
  labels[2] = {EventLabel::Success, Valence::Neutral, "auto"};
  labels[3] = {EventLabel::None, Valence::Positive, "auto"};

  BoundaryLabels b = boundary_labels(labels);
  REQUIRE(b.size() == 2);
  CHECK(b.at(0) == EventLabel::GettingPuzzle);
  CHECK(b.at(2) == EventLabel::Success);
}
