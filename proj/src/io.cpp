#include "cne/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace cne::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParseError("not a number: '" + s + "'", line);
  return v;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line, int base = 10) {
  std::uint64_t v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (base == 16 && s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) b += 2;
  auto [p, ec] = std::from_chars(b, e, v, base);
  if (ec != std::errc() || p != e || b == e)
    throw ParseError("not an unsigned integer: '" + s + "'", line);
  return v;
}

json config_json(const EmbeddingConfig& c) {
  json j;
  j["dim"] = c.dim;
  j["sigma1"] = c.sigma1;
  j["sigma2"] = c.sigma2;
  j["gamma"] = c.gamma();
  j["prior_pi"] = c.prior_pi ? json(*c.prior_pi) : json(nullptr);
  j["learning_rate"] = c.learning_rate;
  j["max_iter"] = c.max_iter;
  j["ftol"] = c.ftol;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

void write_embedding_csv(std::ostream& os, const Embedding& x, const Graph& g) {
  os << "node,label";
  for (std::size_t c = 0; c < x.dim(); ++c) os << ",x" << c;
  os << '\n';
  for (std::size_t i = 0; i < x.num_nodes(); ++i) {
    os << i << ',' << csv_field(g.label(static_cast<NodeId>(i)));
    for (double v : x.row(i)) os << ',' << format_double(v);
    os << '\n';
  }
}

Embedding read_embedding_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<double>> rows;
  std::size_t dim = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_csv(line);
    if (!header) {
      if (f.size() < 3 || f[0] != "node") throw ParseError("missing embedding header", lineno);
      dim = f.size() - 2;
      header = true;
      continue;
    }
    if (f.size() != dim + 2) throw ParseError("wrong column count", lineno);
    if (parse_uint(f[0], lineno) != rows.size()) throw ParseError("node ids out of order", lineno);
    std::vector<double> r;
    for (std::size_t c = 0; c < dim; ++c) r.push_back(parse_double(f[c + 2], lineno));
    rows.push_back(std::move(r));
  }
  if (!header) throw ParseError("empty embedding file", lineno);
  Embedding x(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < dim; ++c) x(i, c) = rows[i][c];
  return x;
}

void write_probability_csv(std::ostream& os, const LinkProbabilityMatrix& p) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t l = 0; l < p.size(); ++l) {
      if (l) os << ',';
      os << format_double(k == l ? 0.0 : p(k, l));
    }
    os << '\n';
  }
}

void write_diagnostics_json(std::ostream& os, const EmbedResult& r) {
  const auto& d = r.diagnostics;
  json j;
  j["config"] = config_json(r.config);
  j["iterations"] = d.iterations;
  j["final_objective"] = d.final_objective;
  j["converged"] = d.converged;
  j["step_halvings"] = d.step_halvings;
  j["trace_length"] = d.objective_trace.size();
  j["objective_trace"] = d.objective_trace;
  j["kernel"] = d.kernel;
  j["num_nodes"] = r.coords.num_nodes();
  os << j.dump(2) << '\n';
}

void write_ranking_csv(std::ostream& os, const SensitivityRanking& r, const Graph& g) {
  os << "# method=" << to_string(r.method) << " embedding_hash=" << hex64(r.embedding_hash)
     << '\n';
  os << "rank,i,j,label_i,label_j,direction,method,score,disconnects,regularized\n";
  for (const auto& it : r.items) {
    os << it.rank << ',' << it.flip.i << ',' << it.flip.j << ',' << csv_field(g.label(it.flip.i))
       << ',' << csv_field(g.label(it.flip.j)) << ',' << to_string(it.flip.direction) << ','
       << to_string(r.method) << ',' << format_double(it.score) << ',' << (it.disconnects ? 1 : 0)
       << ',' << (it.regularized ? 1 : 0) << '\n';
  }
}

SensitivityRanking read_ranking_csv(std::istream& is) {
  SensitivityRanking r;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> cols;
  auto col = [&](const std::string& name, std::size_t at) {
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] == name) return k;
    throw ParseError("ranking file lacks column '" + name + "'", at);
  };
  std::size_t ci = 0, cj = 0, cdir = 0, cscore = 0, crank = 0, cdisc = 0, creg = 0, cmeth = 0;
  bool have_method = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "method") {
          const auto m = parse_method(val);
          if (!m) throw ParseError("unknown method '" + val + "'", lineno);
          r.method = *m;
          have_method = true;
        } else if (key == "embedding_hash") {
          r.embedding_hash = parse_uint(val, lineno, 16);
        }
      }
      continue;
    }
    const auto f = split_csv(line);
    if (cols.empty()) {
      cols = f;
      ci = col("i", lineno);
      cj = col("j", lineno);
      cdir = col("direction", lineno);
      cscore = col("score", lineno);
      crank = col("rank", lineno);
      cdisc = col("disconnects", lineno);
      creg = col("regularized", lineno);
      cmeth = col("method", lineno);
      continue;
    }
    if (f.size() != cols.size()) throw ParseError("wrong column count", lineno);
    RankedFlip it;
    it.flip.i = static_cast<NodeId>(parse_uint(f[ci], lineno));
    it.flip.j = static_cast<NodeId>(parse_uint(f[cj], lineno));
    if (f[cdir] == "del")
      it.flip.direction = FlipDirection::Deletion;
    else if (f[cdir] == "add")
      it.flip.direction = FlipDirection::Addition;
    else
      throw ParseError("direction must be del or add", lineno);
    it.score = parse_double(f[cscore], lineno);
    it.rank = parse_uint(f[crank], lineno);
    it.disconnects = f[cdisc] == "1";
    it.regularized = f[creg] == "1";
    if (!have_method) {
      const auto m = parse_method(f[cmeth]);
      if (!m) throw ParseError("unknown method '" + f[cmeth] + "'", lineno);
      r.method = *m;
      have_method = true;
    }
    r.items.push_back(it);
  }
  if (cols.empty()) throw ParseError("ranking file has no header", lineno);
  return r;
}

SensitivityRanking read_ranking_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open ranking file: " + path.string());
  return read_ranking_csv(in);
}

void write_ranking_json(std::ostream& os, const SensitivityRanking& r, const Graph& g) {
  json j;
  j["method"] = to_string(r.method);
  j["embedding_hash"] = hex64(r.embedding_hash);
  j["score_unit"] = "nats";
  json items = json::array();
  for (const auto& it : r.items) {
    items.push_back({{"rank", it.rank},
                     {"i", it.flip.i},
                     {"j", it.flip.j},
                     {"label_i", g.label(it.flip.i)},
                     {"label_j", g.label(it.flip.j)},
                     {"direction", to_string(it.flip.direction)},
                     {"score", it.score},
                     {"disconnects", it.disconnects},
                     {"regularized", it.regularized}});
  }
  j["items"] = std::move(items);
  os << j.dump(2) << '\n';
}

std::string format_p_value(double p) {
  if (p < 0.001) return "<0.001";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

void write_comparison_json(std::ostream& os, const RankingComparison& c,
                           const std::string& dataset) {
  json j;
  j["dataset"] = dataset;
  j["candidate"] = to_string(c.candidate.method);
  j["ground_truth"] = to_string(c.ground_truth.method);
  j["ndcg"] = c.ndcg;
  j["p_value"] = c.p_value;
  j["p_value_display"] = format_p_value(c.p_value);
  j["n_samples"] = c.n_samples;
  j["num_flips"] = c.ground_truth.items.size();
  j["gain"] = "linear";
  j["truncation"] = "full-list";
  j["permutation"] = "uniform random orderings of the flip set";
  os << j.dump(2) << '\n';
}

void write_comparison_csv_header(std::ostream& os) {
  os << "dataset,candidate,ground_truth,ndcg,p_value,p_value_display,n_samples,gain\n";
}

void write_comparison_csv_row(std::ostream& os, const RankingComparison& c,
                              const std::string& dataset) {
  os << csv_field(dataset) << ',' << to_string(c.candidate.method) << ','
     << to_string(c.ground_truth.method) << ',' << format_double(c.ndcg) << ','
     << format_double(c.p_value) << ',' << format_p_value(c.p_value) << ',' << c.n_samples
     << ",linear\n";
}

void write_timing_csv(std::ostream& os, const BenchmarkReport& rep) {
  os << "dataset,method,seconds_per_flip,flips_measured,precompute_seconds\n";
  for (const auto& r : rep.records)
    os << csv_field(r.dataset) << ',' << to_string(r.method) << ','
       << format_double(r.seconds_per_flip) << ',' << r.flips_measured << ','
       << format_double(r.precompute_seconds) << '\n';
}

void write_benchmark_json(std::ostream& os, const BenchmarkReport& rep) {
  json j;
  j["kernel"] = rep.kernel;
  j["compiler"] = rep.compiler;
  j["hardware_threads"] = rep.hardware_threads;
  j["threads_used"] = 1;
  j["num_nodes"] = rep.num_nodes;
  j["num_edges"] = rep.num_edges;
  j["dim"] = rep.dim;
  json recs = json::array();
  for (const auto& r : rep.records)
    recs.push_back({{"dataset", r.dataset},
                    {"method", to_string(r.method)},
                    {"seconds_per_flip", r.seconds_per_flip},
                    {"flips_measured", r.flips_measured},
                    {"precompute_seconds", r.precompute_seconds}});
  j["records"] = std::move(recs);
  os << j.dump(2) << '\n';
}

void write_manifest_json(std::ostream& os, const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["dataset"] = {{"path", m.dataset_path}, {"fnv1a64", hex64(m.dataset_hash)}};
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["outputs"] = m.outputs;
  j["tool_version"] = m.tool_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  os << j.dump(2) << '\n';
}

std::uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open file: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize k = 0; k < in.gcount(); ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write file: " + path.string());
  out << contents;
  if (!out) throw FileError("write failed: " + path.string());
}

}  // namespace cne::io
