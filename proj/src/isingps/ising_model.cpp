#include "isingps/ising_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "isingps/errors.hpp"

namespace isingps {

CouplingGraph::CouplingGraph(int sites, std::vector<Edge> edges, std::vector<double> field)
    : sites_(sites), edges_(std::move(edges)), field_(std::move(field)) {
  if (sites_ < 1) throw std::invalid_argument("CouplingGraph: need at least one site");
  if (field_.size() != static_cast<std::size_t>(sites_))
    throw std::invalid_argument("CouplingGraph: field length must equal site count");
  for (double h : field_)
    if (!std::isfinite(h)) throw std::invalid_argument("CouplingGraph: non-finite field");

  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.a < 0 || e.b >= sites_ || e.a == e.b)
      throw std::invalid_argument("CouplingGraph: edge endpoints out of range");
    if (!(e.coupling > 0.0) || !std::isfinite(e.coupling))
      throw std::invalid_argument("CouplingGraph: couplings must be positive and finite");
    if (!seen.insert({e.a, e.b}).second)
      throw std::invalid_argument("CouplingGraph: duplicate edge");
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return std::pair{x.a, x.b} < std::pair{y.a, y.b}; });
}

CouplingGraph CouplingGraph::rectangular(int width, int height, double coupling,
                                         double field, bool periodic) {
  if (width < 1 || height < 1) throw std::invalid_argument("rectangular: extents must be >= 1");
  if (!(coupling > 0.0)) throw std::invalid_argument("rectangular: coupling must be > 0");

  const int sites = width * height;
  auto index = [width](int x, int y) { return x + y * width; };

  // Accumulate bond weights so degenerate wrap bonds collapse onto the
  // existing edge with doubled coupling.
  std::map<std::pair<int, int>, double> bonds;
  auto add_bond = [&bonds](int i, int j, double J) {
    if (i == j) return;  // extent-1 wrap
    if (i > j) std::swap(i, j);
    bonds[{i, j}] += J;
  };

  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width) add_bond(index(x, y), index(x + 1, y), coupling);
      if (y + 1 < height) add_bond(index(x, y), index(x, y + 1), coupling);
    }
  if (periodic) {
    for (int y = 0; y < height; ++y)
      if (width > 1) add_bond(index(width - 1, y), index(0, y), coupling);
    for (int x = 0; x < width; ++x)
      if (height > 1) add_bond(index(x, height - 1), index(x, 0), coupling);
  }

  std::vector<Edge> edges;
  edges.reserve(bonds.size());
  for (const auto& [key, J] : bonds) edges.push_back({key.first, key.second, J});
  return CouplingGraph(sites, std::move(edges), std::vector<double>(sites, field));
}

bool CouplingGraph::has_field() const {
  return std::any_of(field_.begin(), field_.end(), [](double h) { return h != 0.0; });
}

double CouplingGraph::mean_coupling() const {
  double sum = 0.0;
  for (const auto& e : edges_) sum += e.coupling;
  return sum / sites_;
}

std::vector<double> CouplingGraph::gains(double beta) const {
  std::vector<double> g(static_cast<std::size_t>(sites_), 0.0);
  for (const auto& e : edges_) {
    g[static_cast<std::size_t>(e.a)] += beta * e.coupling;
    g[static_cast<std::size_t>(e.b)] += beta * e.coupling;
  }
  return g;
}

double CouplingGraph::energy(std::span<const int> spins) const {
  if (spins.size() != static_cast<std::size_t>(sites_))
    throw std::invalid_argument("energy: spin count mismatch");
  for (int s : spins)
    if (s != 1 && s != -1) throw std::invalid_argument("energy: spins must be +-1");
  double e = 0.0;
  for (int i = 0; i < sites_; ++i) e -= field_[static_cast<std::size_t>(i)] * spins[static_cast<std::size_t>(i)];
  for (const auto& edge : edges_)
    e -= edge.coupling * spins[static_cast<std::size_t>(edge.a)] * spins[static_cast<std::size_t>(edge.b)];
  return e;
}

void PairSelection::validate(const CouplingGraph& graph) const {
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= graph.sites() || j >= graph.sites() || i == j)
      throw std::invalid_argument("PairSelection: pair out of range");
  }
  if (nn_average && graph.edges().empty())
    throw std::invalid_argument("PairSelection: nn average requested on an edgeless graph");
}

namespace {

[[noreturn]] void fail(const std::string& source, int line, const std::string& message) {
  std::ostringstream os;
  os << source << ":" << line << ": " << message;
  throw ParseError(os.str());
}

}  // namespace

CouplingGraph parse_model(std::istream& in, const std::string& source_name) {
  int sites = -1;
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> seen;
  std::vector<double> field;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::istringstream ls(line);
    std::string keyword;
    if (!(ls >> keyword)) continue;  // blank or comment-only

    if (keyword == "sites") {
      if (sites >= 0) fail(source_name, line_no, "duplicate 'sites' line");
      if (!(ls >> sites) || sites < 1) fail(source_name, line_no, "expected 'sites M' with M >= 1");
      field.assign(static_cast<std::size_t>(sites), 0.0);
    } else if (keyword == "edge") {
      if (sites < 0) fail(source_name, line_no, "'edge' before 'sites'");
      int i = 0, j = 0;
      double J = 0.0;
      if (!(ls >> i >> j >> J)) fail(source_name, line_no, "expected 'edge i j J'");
      if (i == j) fail(source_name, line_no, "self edge not allowed");
      if (i < 0 || j < 0 || i >= sites || j >= sites)
        fail(source_name, line_no, "edge index out of range");
      if (!std::isfinite(J) || J <= 0.0)
        fail(source_name, line_no, "coupling must be positive (zero couplings are simply absent)");
      if (i > j) std::swap(i, j);
      if (!seen.insert({i, j}).second) fail(source_name, line_no, "duplicate edge");
      edges.push_back({i, j, J});
    } else if (keyword == "field") {
      if (sites < 0) fail(source_name, line_no, "'field' before 'sites'");
      std::string target;
      double h = 0.0;
      if (!(ls >> target >> h) || !std::isfinite(h))
        fail(source_name, line_no, "expected 'field i h' or 'field * h'");
      if (target == "*") {
        std::fill(field.begin(), field.end(), h);
      } else {
        int i = -1;
        try {
          std::size_t pos = 0;
          i = std::stoi(target, &pos);
          if (pos != target.size()) i = -1;
        } catch (const std::exception&) {
          i = -1;
        }
        if (i < 0 || i >= sites) fail(source_name, line_no, "field index out of range");
        field[static_cast<std::size_t>(i)] = h;
      }
    } else {
      fail(source_name, line_no, "unknown keyword '" + keyword + "'");
    }
    std::string extra;
    if (ls >> extra) fail(source_name, line_no, "trailing tokens");
  }

  if (sites < 0) throw ParseError(source_name + ": missing 'sites' line");
  return CouplingGraph(sites, std::move(edges), std::move(field));
}

CouplingGraph parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open model file");
  return parse_model(in, path);
}

}  // namespace isingps
