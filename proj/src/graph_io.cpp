#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "lipflat/graph.hpp"

namespace lipflat {

namespace {

bool contiguous_first_class(const Bipartition& parts, std::size_t& n0) {
  n0 = parts.side0.size();
  for (Vertex v = 0; v < parts.color.size(); ++v)
    if ((v < n0) != (parts.color[v] == 0)) return false;
  return true;
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  std::string body = hash == std::string::npos ? line : line.substr(0, hash);
  const auto last = body.find_last_not_of(" \t\r");
  return last == std::string::npos ? std::string{} : body.substr(0, last + 1);
}

}  // namespace

void write_graph(std::ostream& out, const Graph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  std::size_t n0 = 0;
  if (g.bipartition() && contiguous_first_class(*g.bipartition(), n0)) out << "bipartite " << n0 << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph read_graph(std::istream& in, bool two_color) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> n, m;
  BuildOptions options;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (body.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(body);
    if (body.rfind("bipartite", 0) == 0) {
      std::string keyword;
      std::size_t n0 = 0;
      if (!(fields >> keyword >> n0)) throw Error(Errc::parse, "line " + std::to_string(line_no) + ": bad bipartite header");
      options.first_class_size = n0;
      continue;
    }
    long long a = 0, b = 0;
    if (!(fields >> a >> b) || a < 0 || b < 0)
      throw Error(Errc::parse, "line " + std::to_string(line_no) + ": expected two non-negative integers");
    std::string rest;
    if (fields >> rest) throw Error(Errc::parse, "line " + std::to_string(line_no) + ": trailing tokens");
    if (!n) {
      n = static_cast<std::size_t>(a);
      m = static_cast<std::size_t>(b);
      continue;
    }
    edges.emplace_back(static_cast<Vertex>(a), static_cast<Vertex>(b));
  }
  if (!n) throw Error(Errc::parse, "missing 'n m' header");
  if (edges.size() != *m)
    throw Error(Errc::parse, "header declares " + std::to_string(*m) + " edges, found " + std::to_string(edges.size()));
  if (!options.first_class_size) options.two_color = two_color;
  return build_graph(*n, edges, options);
}

Graph load_graph(const std::string& path, bool two_color) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  return read_graph(in, two_color);
}

void save_graph(const std::string& path, const Graph& g) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  write_graph(out, g);
  if (!out) throw Error(Errc::io, "write failed for " + path);
}

}  // namespace lipflat
