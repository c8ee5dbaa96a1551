#include <fstream>
#include <sstream>

#include "cne/cli.hpp"

namespace cne::cli {

std::vector<ReferenceValue> load_reference_values(std::istream& is) {
  std::vector<ReferenceValue> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (f.size() < 5 && std::getline(ss, cell, ',')) f.push_back(cell);
    std::string rest;
    std::getline(ss, rest);
    if (f.size() != 5 || rest.empty()) throw ParseError("reference row needs 6 columns", lineno);
    ReferenceValue v;
    v.table = f[0];
    try {
      v.row = std::stoi(f[1]);
    } catch (const std::exception&) {
      throw ParseError("reference row number is not an integer", lineno);
    }
    v.dataset = f[2];
    v.method = f[3];
    v.field = f[4];
    v.value = rest;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<ReferenceValue> load_reference_values_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open reference values: " + path.string());
  return load_reference_values(in);
}

std::optional<Edge> parse_label_pair(const Graph& g, const std::string& text) {
  std::istringstream ss(text);
  std::string a, b;
  if (!(ss >> a >> b)) return std::nullopt;
  const long u = g.find_label(a), v = g.find_label(b);
  if (u < 0 || v < 0 || u == v) return std::nullopt;
  const auto lo = static_cast<NodeId>(std::min(u, v));
  const auto hi = static_cast<NodeId>(std::max(u, v));
  return Edge{lo, hi};
}

}  // namespace cne::cli
