#pragma once
// Flat key = value config files: quoted strings, integers, reals, booleans,
// and arrays of quoted strings. Enough structure for a pipeline run, nothing
// more.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "regmine/errors.hpp"

namespace regmine {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

class FlatConfig {
 public:
  static FlatConfig parse(std::istream& in) {
    FlatConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string stripped = strip_comment(line, lineno);
      stripped = detail::trim(stripped);
      if (stripped.empty()) continue;
      auto eq = stripped.find('=');
      if (eq == std::string::npos)
        fail(Errc::BadConfig, "config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = detail::trim(stripped.substr(0, eq));
      std::string raw = detail::trim(stripped.substr(eq + 1));
      if (key.empty())
        fail(Errc::BadConfig, "config line " + std::to_string(lineno) + ": empty key");
      for (char c : key) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.')
          fail(Errc::BadConfig,
               "config line " + std::to_string(lineno) + ": bad key '" + key + "'");
      }
      if (cfg.values_.count(key))
        fail(Errc::BadConfig,
             "config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      cfg.values_[key] = parse_value(raw, lineno);
    }
    return cfg;
  }

  static FlatConfig parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static FlatConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::IoError, "cannot open config file '" + path + "'");
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Kind::Str) fail(Errc::BadConfig, "config key '" + key + "' is not a string");
    return v.str;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }

  std::int64_t get_int(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Kind::Num || v.num != static_cast<double>(static_cast<std::int64_t>(v.num)))
      fail(Errc::BadConfig, "config key '" + key + "' is not an integer");
    return static_cast<std::int64_t>(v.num);
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
  }

  double get_double(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Kind::Num) fail(Errc::BadConfig, "config key '" + key + "' is not a number");
    return v.num;
  }

  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  bool get_bool(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Kind::Bool) fail(Errc::BadConfig, "config key '" + key + "' is not a boolean");
    return v.b;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
  }

  std::vector<std::string> get_strings(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Kind::Arr)
      fail(Errc::BadConfig, "config key '" + key + "' is not a string array");
    return v.arr;
  }

  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const {
    return has(key) ? get_strings(key) : fallback;
  }

 private:
  enum class Kind { Str, Num, Bool, Arr };
  struct Value {
    Kind kind = Kind::Str;
    std::string str;
    double num = 0.0;
    bool b = false;
    std::vector<std::string> arr;
  };

  const Value& require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(Errc::BadConfig, "missing config key '" + key + "'");
    return it->second;
  }

  static std::string strip_comment(const std::string& line, std::size_t lineno) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    if (in_string)
      fail(Errc::BadConfig, "config line " + std::to_string(lineno) + ": unterminated string");
    return line;
  }

  static std::string parse_quoted(const std::string& raw, std::size_t& pos, std::size_t lineno) {
    if (pos >= raw.size() || raw[pos] != '"')
      fail(Errc::BadConfig, "config line " + std::to_string(lineno) + ": expected '\"'");
    std::size_t end = raw.find('"', pos + 1);
    if (end == std::string::npos)
      fail(Errc::BadConfig, "config line " + std::to_string(lineno) + ": unterminated string");
    std::string out = raw.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    return out;
  }

  static Value parse_value(const std::string& raw, std::size_t lineno) {
    Value v;
    if (raw.empty())
      fail(Errc::BadConfig, "config line " + std::to_string(lineno) + ": empty value");
    if (raw[0] == '"') {
      std::size_t pos = 0;
      v.kind = Kind::Str;
      v.str = parse_quoted(raw, pos, lineno);
      if (detail::trim(raw.substr(pos)).size())
        fail(Errc::BadConfig,
             "config line " + std::to_string(lineno) + ": trailing text after string");
      return v;
    }
    if (raw[0] == '[') {
      if (raw.back() != ']')
        fail(Errc::BadConfig, "config line " + std::to_string(lineno) + ": unterminated array");
      v.kind = Kind::Arr;
      std::string body = detail::trim(raw.substr(1, raw.size() - 2));
      std::size_t pos = 0;
      while (pos < body.size()) {
        while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
        if (pos >= body.size()) break;
        v.arr.push_back(parse_quoted(body, pos, lineno));
        while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
        if (pos < body.size()) {
          if (body[pos] != ',')
            fail(Errc::BadConfig,
                 "config line " + std::to_string(lineno) + ": expected ',' in array");
          ++pos;
        }
      }
      return v;
    }
    if (raw == "true" || raw == "false") {
      v.kind = Kind::Bool;
      v.b = raw == "true";
      return v;
    }
    try {
      std::size_t consumed = 0;
      v.num = std::stod(raw, &consumed);
      if (consumed != raw.size()) throw std::invalid_argument(raw);
      v.kind = Kind::Num;
      return v;
    } catch (const std::logic_error&) {
      fail(Errc::BadConfig,
           "config line " + std::to_string(lineno) + ": cannot parse value '" + raw + "'");
    }
  }

  std::map<std::string, Value> values_;
};

// Everything a full pipeline run needs. Input paths in the file are resolved
// against the config file's own directory; out_dir stays relative to the
// working directory so artifacts land where the command was run.
struct PipelineConfig {
  std::string corpus;
  std::vector<std::string> annotations;
  std::string lexicon;
  std::string emoji_table;
  std::string strategy_rules;
  std::string templates;
  std::vector<std::string> bot_pseudonyms;
  std::int64_t max_gap_minutes = 30;
  std::int64_t window_k = 3;
  double min_success_rate = 0.5;
  std::int64_t min_freq = 1;
  bool merge_episodes = false;
  bool color_instances = true;
  bool emit_map = false;
  std::string out_dir = "out";

  static PipelineConfig from_file(const std::string& path) {
    FlatConfig cfg = FlatConfig::parse_file(path);
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) -> std::string {
      if (p.empty()) return p;
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp.string() : (base / fp).lexically_normal().string();
    };

    PipelineConfig out;
    out.corpus = resolve(cfg.get_string("corpus"));
    for (const auto& a : cfg.get_strings("annotations", {})) out.annotations.push_back(resolve(a));
    out.lexicon = resolve(cfg.get_string("lexicon", ""));
    out.emoji_table = resolve(cfg.get_string("emoji_table", ""));
    out.strategy_rules = resolve(cfg.get_string("strategy_rules", ""));
    out.templates = resolve(cfg.get_string("templates", ""));
    out.bot_pseudonyms = cfg.get_strings("bot_pseudonyms", {});
    out.max_gap_minutes = cfg.get_int("max_gap_minutes", 30);
    out.window_k = cfg.get_int("window_k", 3);
    out.min_success_rate = cfg.get_double("min_success_rate", 0.5);
    out.min_freq = cfg.get_int("min_freq", 1);
    out.merge_episodes = cfg.get_bool("merge_episodes", false);
    out.color_instances = cfg.get_bool("color_instances", true);
    out.out_dir = cfg.get_string("out_dir", "out");
    out.validate();
    return out;
  }

  void validate() const {
    if (corpus.empty()) fail(Errc::BadConfig, "config: corpus path is required");
    auto must_exist = [](const std::string& p, const std::string& what) {
      if (!p.empty() && !std::filesystem::exists(p))
        fail(Errc::BadConfig, "config: " + what + " file '" + p + "' does not exist");
    };
    must_exist(corpus, "corpus");
    for (const auto& a : annotations) must_exist(a, "annotations");
    must_exist(lexicon, "lexicon");
    must_exist(emoji_table, "emoji_table");
    must_exist(strategy_rules, "strategy_rules");
    must_exist(templates, "templates");
    if (max_gap_minutes <= 0) fail(Errc::BadConfig, "config: max_gap_minutes must be positive");
    if (window_k <= 0) fail(Errc::BadConfig, "config: window_k must be positive");
    if (min_success_rate < 0.0 || min_success_rate > 1.0)
      fail(Errc::BadConfig, "config: min_success_rate must lie in [0, 1]");
    if (min_freq < 1) fail(Errc::BadConfig, "config: min_freq must be at least 1");
  }
};

}  // namespace regmine
