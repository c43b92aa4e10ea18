#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "regmine/dfg.hpp"
#include "regmine/errors.hpp"
#include "regmine/patterns.hpp"

namespace regmine {

// ------------------------------------------------------------------- JSON

inline nlohmann::json export_json(const DependencyGraph& g) {
  nlohmann::json j;
  j["episode_id"] = {{"team", g.episode_id.team},
                     {"puzzle", g.episode_id.puzzle},
                     {"seq", g.episode_id.seq}};
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : g.nodes) j["nodes"].push_back({{"label", n.label}, {"freq", n.freq}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back(
        {{"from", e.from}, {"to", e.to}, {"freq", e.freq}, {"seqs", e.seqs}});
  return j;
}

inline DependencyGraph import_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("episode_id") || !j.contains("nodes") || !j.contains("edges"))
    fail(Errc::MalformedLine, "graph document missing required keys");
  DependencyGraph g;
  g.episode_id.team = j["episode_id"].value("team", std::string{});
  g.episode_id.puzzle = j["episode_id"].value("puzzle", std::size_t{0});
  g.episode_id.seq = j["episode_id"].value("seq", std::size_t{0});
  for (const auto& n : j["nodes"]) {
    if (!n.contains("label") || !n.contains("freq"))
      fail(Errc::MalformedLine, "graph node missing label/freq");
    g.nodes.push_back({n["label"].get<std::string>(), n["freq"].get<int>()});
  }
  for (const auto& e : j["edges"]) {
    if (!e.contains("from") || !e.contains("to") || !e.contains("freq") || !e.contains("seqs"))
      fail(Errc::MalformedLine, "graph edge missing fields");
    DfgEdge edge;
    edge.from = e["from"].get<std::string>();
    edge.to = e["to"].get<std::string>();
    edge.freq = e["freq"].get<int>();
    edge.seqs = e["seqs"].get<std::vector<std::size_t>>();
    if (edge.freq != static_cast<int>(edge.seqs.size()))
      fail(Errc::MalformedLine, "edge freq does not match its seqs");
    g.edges.push_back(std::move(edge));
  }
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const DfgNode& a, const DfgNode& b) { return a.label < b.label; });
  std::sort(g.edges.begin(), g.edges.end(), [](const DfgEdge& a, const DfgEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });

  // Start/end are recoverable from sequence numbers on unfiltered graphs.
  if (g.nodes.size() == 1 && g.edges.empty()) {
    g.start_label = g.end_label = g.nodes.front().label;
  } else {
    std::size_t min_seq = 0, max_seq = 0;
    const DfgEdge *first = nullptr, *last = nullptr;
    for (const auto& e : g.edges) {
      for (const std::size_t s : e.seqs) {
        if (!first || s < min_seq) {
          min_seq = s;
          first = &e;
        }
        if (!last || s > max_seq) {
          max_seq = s;
          last = &e;
        }
      }
    }
    if (first) g.start_label = first->from;
    if (last) g.end_label = last->to;
  }
  return g;
}

inline std::string graph_to_string(const DependencyGraph& g) { return export_json(g).dump(2); }

inline DependencyGraph graph_from_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::MalformedLine, "graph document is not valid JSON");
  return import_json(j);
}

// -------------------------------------------------------------------- DOT

using EdgeColorMap = std::map<std::pair<std::string, std::string>, std::string>;

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string join_seqs(const std::vector<std::size_t>& seqs) {
  std::string out;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(seqs[i]);
  }
  return out;
}
}  // namespace detail

// Deterministic DOT rendering: nodes sorted by label, edges by (from, to).
// Edges that belong to a regulation instance take that instance's color.
inline std::string export_dot(const DependencyGraph& g, const EdgeColorMap& colors = {}) {
  std::string out = "digraph dfg {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& n : g.nodes) {
    out += "  " + detail::dot_quote(n.label) + " [label=" +
           detail::dot_quote(n.label + "\nfreq=" + std::to_string(n.freq)) + "];\n";
  }
  for (const auto& e : g.edges) {
    out += "  " + detail::dot_quote(e.from) + " -> " + detail::dot_quote(e.to) + " [label=" +
           detail::dot_quote("f=" + std::to_string(e.freq) + " s=" + detail::join_seqs(e.seqs));
    auto it = colors.find({e.from, e.to});
    if (it != colors.end()) out += ", color=" + detail::dot_quote(it->second) + ", penwidth=2.0";
    out += "];\n";
  }
  out += "}\n";
  return out;
}

inline std::map<std::size_t, std::string> default_instance_palette(std::size_t n) {
  static const std::vector<std::string> cycle = {"deeppink", "gold",      "dodgerblue",
                                                 "seagreen", "firebrick", "purple"};
  std::map<std::size_t, std::string> out;
  for (std::size_t i = 0; i < n; ++i) out[i] = cycle[i % cycle.size()];
  return out;
}

// Maps each instance's path onto graph edges: instance i covers every
// consecutive-event step from its origin to its arrival. When two instances
// share an edge, the later-starting one sets the color.
inline EdgeColorMap instance_edge_colors(const LabeledEpisode& episode,
                                         const std::vector<RegulationInstance>& instances,
                                         const std::map<std::size_t, std::string>& palette) {
  EdgeColorMap out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    auto color = palette.find(i);
    if (color == palette.end()) continue;
    const auto& t = instances[i].transition;
    if (!t.to_event_index) continue;
    for (std::size_t j = t.from_event_index; j < *t.to_event_index; ++j) {
      out[{episode.events[j].label(), episode.events[j + 1].label()}] = color->second;
    }
  }
  return out;
}

}  // namespace regmine
