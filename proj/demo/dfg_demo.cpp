// Builds the dependency graph of a tiny hand-made episode, filters it, and
// prints both JSON and DOT renderings.

#include <iostream>

#include "regmine/dfg.hpp"
#include "regmine/dfg_io.hpp"

int main() {
  using namespace regmine;

  EpisodeId id{"demo", 1, 0};
  DependencyGraph g = build_dfg(id, {
                                        "Getting Puzzle",
                                        "User1-Challenge",
                                        "User2-Failure Negative emotion",
                                        "User2-Failure Negative emotion",
                                        "User1-Challenge",
                                        "User2-Challenge Positive emotion",
                                        "Success",
                                    });

  std::cout << "full graph:\n" << graph_to_string(g) << "\n";
  std::cout << "edges with freq >= 2:\n"
            << graph_to_string(filter_graph(g, 2)) << "\n";
  std::cout << "DOT:\n" << export_dot(g);
  return 0;
}
