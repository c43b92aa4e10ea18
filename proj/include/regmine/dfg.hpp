#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "regmine/chat.hpp"
#include "regmine/errors.hpp"

namespace regmine {

struct DfgNode {
  std::string label;
  int freq = 0;

  bool operator==(const DfgNode&) const = default;
};

// seqs are 1-based positions in the episode's event sequence: edge k connects
// labeled event k to event k+1. freq == seqs.size() always.
struct DfgEdge {
  std::string from;
  std::string to;
  int freq = 0;
  std::vector<std::size_t> seqs;

  bool operator==(const DfgEdge&) const = default;
};

enum class GraphKind { Full, Filtered, Merged };

// Directly-follows graph of one labeled episode. Full graphs satisfy flow
// conservation (start +1, end -1, interior balanced); filtered and merged
// graphs keep the shape but not the conservation guarantee.
struct DependencyGraph {
  EpisodeId episode_id;
  std::vector<DfgNode> nodes;  // sorted by label
  std::vector<DfgEdge> edges;  // sorted by (from, to)
  std::string start_label;
  std::string end_label;
  GraphKind kind = GraphKind::Full;

  std::size_t labeled_events() const {
    std::size_t total = 0;
    for (const auto& n : nodes) total += static_cast<std::size_t>(n.freq);
    return total;
  }
};

inline DependencyGraph build_dfg(const LabeledEpisode& episode) {
  if (episode.events.empty())
    fail(Errc::EmptyEpisode, "episode " + episode.id.str() + " has no labeled events");

  DependencyGraph g;
  g.episode_id = episode.id;

  std::map<std::string, int> node_freq;
  std::vector<std::string> labels;
  labels.reserve(episode.events.size());
  for (const auto& ev : episode.events) {
    labels.push_back(ev.label());
    ++node_freq[labels.back()];
  }
  for (const auto& [label, freq] : node_freq) g.nodes.push_back({label, freq});

  std::map<std::pair<std::string, std::string>, DfgEdge> edge_map;
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
    DfgEdge& e = edge_map[{labels[i], labels[i + 1]}];
    e.from = labels[i];
    e.to = labels[i + 1];
    ++e.freq;
    e.seqs.push_back(i + 1);
  }
  for (auto& [_, e] : edge_map) g.edges.push_back(std::move(e));

  g.start_label = labels.front();
  g.end_label = labels.back();
  return g;
}

inline DependencyGraph build_dfg(const EpisodeId& id, const std::vector<std::string>& labels) {
  LabeledEpisode ep;
  ep.id = id;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    LabeledEvent ev;
    ev.index = i;
    ev.msg_id = i;
    const CompositeLabel parsed = parse_label(labels[i]);
    ev.pseudonym = parsed.pseudonym.value_or("");
    ev.event = parsed.event;
    ev.valence = parsed.valence;
    ep.events.push_back(std::move(ev));
  }
  return build_dfg(ep);
}

// Drops edges with freq < min_freq, then nodes left without any incident
// edge — except the start and end nodes, which always survive.
inline DependencyGraph filter_graph(const DependencyGraph& g, int min_freq) {
  DependencyGraph out;
  out.episode_id = g.episode_id;
  out.start_label = g.start_label;
  out.end_label = g.end_label;
  out.kind = GraphKind::Filtered;

  std::map<std::string, bool> keep;
  for (const auto& e : g.edges) {
    if (e.freq >= min_freq) {
      out.edges.push_back(e);
      keep[e.from] = true;
      keep[e.to] = true;
    }
  }
  for (const auto& n : g.nodes) {
    if (keep.count(n.label) || n.label == g.start_label || n.label == g.end_label)
      out.nodes.push_back(n);
  }
  return out;
}

// Corpus-level union: node and edge frequencies are summed; each graph's
// sequence numbers are re-based by the cumulative labeled-event count so they
// stay unique, but they no longer form a single 1..E-1 permutation.
inline DependencyGraph merge_graphs(const std::vector<DependencyGraph>& graphs) {
  DependencyGraph out;
  out.episode_id = EpisodeId{"merged", 0, 0};
  out.kind = GraphKind::Merged;

  std::map<std::string, int> node_freq;
  std::map<std::pair<std::string, std::string>, DfgEdge> edge_map;
  std::size_t offset = 0;
  for (const auto& g : graphs) {
    for (const auto& n : g.nodes) node_freq[n.label] += n.freq;
    for (const auto& e : g.edges) {
      DfgEdge& m = edge_map[{e.from, e.to}];
      m.from = e.from;
      m.to = e.to;
      m.freq += e.freq;
      for (const std::size_t s : e.seqs) m.seqs.push_back(s + offset);
    }
    offset += g.labeled_events();
  }
  for (const auto& [label, freq] : node_freq) out.nodes.push_back({label, freq});
  for (auto& [_, e] : edge_map) {
    std::sort(e.seqs.begin(), e.seqs.end());
    out.edges.push_back(std::move(e));
  }
  return out;
}

}  // namespace regmine
