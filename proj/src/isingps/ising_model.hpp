#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace isingps {

struct Edge {
  int a = 0;
  int b = 0;          // a < b
  double coupling = 0.0;  // J > 0
};

// Undirected coupling graph with per-site fields. Edges are stored once with
// a < b; absent edges mean zero coupling; J > 0 for stored edges. Immutable
// after construction and freely shareable across threads.
class CouplingGraph {
 public:
  CouplingGraph(int sites, std::vector<Edge> edges, std::vector<double> field);

  // Nearest-neighbour rectangle, site index = x + y*width. With `periodic`,
  // wrap bonds are added; a wrap that lands on an existing bond (extent 2)
  // doubles that bond's coupling, and a wrap onto the same site (extent 1)
  // is dropped.
  static CouplingGraph rectangular(int width, int height, double coupling,
                                   double field, bool periodic);

  int sites() const { return sites_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& field() const { return field_; }
  bool has_field() const;

  // Mean interaction per spin: (1/M) sum_e J_e, i.e. half the per-site mean
  // of the symmetric double sum.
  double mean_coupling() const;

  // Per-site gain g_i = beta * sum_j J_ij.
  std::vector<double> gains(double beta) const;

  // -sum_i h_i s_i - sum_edges J_ij s_i s_j for spins s in {-1, +1}.
  double energy(std::span<const int> spins) const;

 private:
  int sites_;
  std::vector<Edge> edges_;
  std::vector<double> field_;
};

// Observable selection shared by the samplers: explicit site pairs and/or the
// average over all stored edges ("nn").
struct PairSelection {
  bool nn_average = false;
  std::vector<std::pair<int, int>> pairs;

  void validate(const CouplingGraph& graph) const;
};

// Line-oriented model format:
//   sites M
//   edge i j J
//   field i h   |   field * h
//   # comment
// Throws ParseError naming the offending line.
CouplingGraph parse_model(std::istream& in, const std::string& source_name);
CouplingGraph parse_model_file(const std::string& path);

}  // namespace isingps
