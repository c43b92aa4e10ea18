#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = REGMINE_CLI_PATH;
const std::string kSrc = REGMINE_SOURCE_DIR;
const std::string kLuxConfig = kSrc + "/fixtures/lux.toml";

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "regmine_cli_XXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct RunResult {
  int exit = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::string& args, const fs::path& cwd) {
  static int counter = 0;
  const fs::path out_file = cwd / (".stdout." + std::to_string(counter));
  const fs::path err_file = cwd / (".stderr." + std::to_string(counter));
  ++counter;
  const std::string cmd = "cd '" + cwd.string() + "' && '" + kCli + "' " + args + " >'" +
                          out_file.string() + "' 2>'" + err_file.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit = WEXITSTATUS(status);
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  fs::remove(out_file);
  fs::remove(err_file);
  return r;
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) names.push_back(entry.path().filename());
  std::sort(names.begin(), names.end());
  return names;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file())
      files[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
  }
  return files;
}

std::vector<nlohmann::json> parse_jsonl(const std::string& content) {
  std::vector<nlohmann::json> out;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST_CASE("version and help exit cleanly") {
  TempDir dir;
  auto version = run("--version", dir.path);
  CHECK(version.exit == 0);
  CHECK(version.out == "regmine 0.1.0\n");

  auto help = run("--help", dir.path);
  CHECK(help.exit == 0);
  for (const char* sub : {"ingest", "annotate", "irr", "graph", "patterns", "mine", "replay",
                          "pipeline"}) {
    INFO(sub);
    CHECK(help.out.find(sub) != std::string::npos);
  }
}

TEST_CASE("usage errors exit with 1") {
  TempDir dir;
  CHECK(run("frobnicate", dir.path).exit == 1);
  CHECK(run("ingest", dir.path).exit == 1);      // --config is required
  CHECK(run("replay --config " + kLuxConfig, dir.path).exit == 1);  // --rules is required
}

TEST_CASE("a missing or broken config exits with 1") {
  TempDir dir;
  auto r = run("ingest --config /nonexistent/config.toml", dir.path);
  CHECK(r.exit == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("data errors exit with 2") {
  TempDir dir;
  std::ofstream(dir.path / "bad_gold.csv")
      << "msg_id,annotator,event,valence\n999,gold,Failure,Negative\n";
  std::ofstream(dir.path / "cfg.toml") << "corpus = \"" << kSrc
                                       << "/fixtures/lux/corpus.jsonl\"\n"
                                          "annotations = [\"bad_gold.csv\"]\n"
                                          "lexicon = \"" << kSrc << "/data/lexicon.csv\"\n"
                                          "emoji_table = \"" << kSrc << "/data/emoji.csv\"\n"
                                          "out_dir = \"out\"\n";
  auto r = run("annotate --config cfg.toml", dir.path);
  CHECK(r.exit == 2);
  CHECK(r.err.find("UnknownMessageId") != std::string::npos);

  std::ofstream(dir.path / "empty.jsonl") << "";
  std::ofstream(dir.path / "cfg2.toml") << "corpus = \"empty.jsonl\"\n"
                                           "lexicon = \"" << kSrc << "/data/lexicon.csv\"\n"
                                           "emoji_table = \"" << kSrc << "/data/emoji.csv\"\n"
                                           "out_dir = \"out\"\n";
  CHECK(run("ingest --config cfg2.toml", dir.path).exit == 2);
}

TEST_CASE("agreement report prints to stdout") {
  TempDir dir;
  auto r = run("irr --annotations " + kSrc + "/fixtures/irr/rater_a.csv " + kSrc +
                   "/fixtures/irr/rater_b.csv",
               dir.path);
  REQUIRE(r.exit == 0);
  CHECK(r.err.empty());
  nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc["kappa"].get<double>() == Catch::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(doc["N"] == 3);
  CHECK(doc["n"] == 2);
  CHECK(doc["k"] == 2);
  CHECK(doc["per_category_marginals"]["Challenge|Neutral"].get<double>() ==
        Catch::Approx(0.5));
}

TEST_CASE("the pipeline writes the full artifact set") {
  TempDir dir;
  auto r = run("pipeline --config " + kLuxConfig, dir.path);
  REQUIRE(r.exit == 0);
  CHECK(r.err.find("24 messages") != std::string::npos);
  CHECK(r.err.find("wrote ") != std::string::npos);

  const std::vector<std::string> expected = {
      "instances.jsonl",     "labeled.jsonl",        "merged.dfg.dot",
      "merged.dfg.json",     "normalized.jsonl",     "rules.json",
      "stats.csv",           "stats.json",           "team1_1_0.dfg.dot",
      "team1_1_0.dfg.json",  "team1_2_0.dfg.dot",    "team1_2_0.dfg.json",
  };
  CHECK(listing(dir.path / "out") == expected);  // no pseudonym_map.json by default

  nlohmann::json rules = nlohmann::json::parse(slurp(dir.path / "out" / "rules.json"));
  CHECK(rules["schema_version"] == 1);
  REQUIRE(rules["rules"].size() == 1);
  CHECK(rules["rules"][0]["trigger"]["event"] == "Challenge");
  CHECK(rules["rules"][0]["trigger"]["valence"] == "Negative");
  CHECK(rules["rules"][0]["suggestion"]["strategy"] == "encouragement");
  CHECK(rules["rules"][0]["suggestion"]["family"] == "SituationModification");
  CHECK(rules["rules"][0]["success_rate"] == 1.0);

  auto instances = parse_jsonl(slurp(dir.path / "out" / "instances.jsonl"));
  REQUIRE(instances.size() == 3);
  CHECK(instances[0]["user"] == "User1");
  CHECK(instances[0]["strategy"] == "avoidance");
  CHECK(instances[0]["withdrawal"] == true);
  CHECK(instances[1]["user"] == "User3");
  CHECK(instances[1]["strategy"] == "encouragement");
  CHECK(instances[2]["user"] == "User2");
  CHECK(instances[2]["strategy"] == "unknown");

  // raw author ids never leak into artifacts
  for (const auto& [name, bytes] : snapshot(dir.path / "out")) {
    INFO(name);
    CHECK(bytes.find("u_17") == std::string::npos);
    CHECK(bytes.find("u_42") == std::string::npos);
    CHECK(bytes.find("u_93") == std::string::npos);
    CHECK(bytes.find("lux_bot") == std::string::npos);
  }
}

TEST_CASE("reruns on unchanged inputs are byte-identical") {
  TempDir dir;
  REQUIRE(run("pipeline --config " + kLuxConfig, dir.path).exit == 0);
  auto first = snapshot(dir.path / "out");
  REQUIRE(run("pipeline --config " + kLuxConfig, dir.path).exit == 0);
  CHECK(snapshot(dir.path / "out") == first);
}

TEST_CASE("the pipeline equals its subcommands run in sequence") {
  TempDir whole, steps;
  REQUIRE(run("pipeline --config " + kLuxConfig, whole.path).exit == 0);
  for (const char* sub : {"ingest", "annotate", "graph", "patterns", "mine"}) {
    REQUIRE(run(std::string(sub) + " --config " + kLuxConfig, steps.path).exit == 0);
  }
  CHECK(snapshot(steps.path / "out") == snapshot(whole.path / "out"));
}

TEST_CASE("replay turns compiled rules into suggestions") {
  TempDir dir;
  REQUIRE(run("pipeline --config " + kLuxConfig, dir.path).exit == 0);
  auto r = run("replay --config " + kLuxConfig + " --rules out/rules.json", dir.path);
  REQUIRE(r.exit == 0);

  auto suggestions = parse_jsonl(slurp(dir.path / "out" / "suggestions.jsonl"));
  REQUIRE(suggestions.size() == 1);
  CHECK(suggestions[0]["episode"] == "team1_2_0");
  CHECK(suggestions[0]["msg_index"] == 18);
  CHECK(suggestions[0]["event_index"] == 12);
  CHECK(suggestions[0]["target"] == "User3");
  CHECK(suggestions[0]["strategy"] == "encouragement");
  CHECK(suggestions[0]["text"].get<std::string>().find("User3") != std::string::npos);

  CHECK(run("replay --config " + kLuxConfig + " --rules missing.json", dir.path).exit == 1);
}

TEST_CASE("the pseudonym map is written only on request") {
  TempDir dir;
  REQUIRE(run("ingest --config " + kLuxConfig, dir.path).exit == 0);
  CHECK_FALSE(fs::exists(dir.path / "out" / "pseudonym_map.json"));

  REQUIRE(run("ingest --config " + kLuxConfig + " --emit-map", dir.path).exit == 0);
  const std::string map_text = slurp(dir.path / "out" / "pseudonym_map.json");
  nlohmann::json map = nlohmann::json::parse(map_text);
  CHECK(map["u_17"] == "User1");
  CHECK(map["u_42"] == "User2");
  CHECK(map["u_93"] == "User3");
  CHECK(map["lux_bot"] == "User4");
}
