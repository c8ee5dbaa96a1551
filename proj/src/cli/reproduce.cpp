#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cli_common.hpp"
#include "cne/cli.hpp"
#include "cne/evaluation.hpp"
#include "cne/io.hpp"
#include "cne/sensitivity.hpp"

namespace cne::cli {

namespace fs = std::filesystem;

namespace {

using namespace detail;

const std::map<std::string, std::string>& acquisition_notes() {
  static const std::map<std::string, std::string> notes = {
      {"karate", "Zachary karate club; ships with this repository as data/karate.edgelist."},
      {"polbooks",
       "Krebs political books (105 nodes, 441 edges), distributed as polbooks.gml in Mark "
       "Newman's network data collection. Convert to 'u v' lines and save the 'value' "
       "attribute (l/n/c) as 'node community' lines in polbooks.communities."},
      {"celegans",
       "C. elegans neural network (297 nodes), celegansneural.gml in Mark Newman's network "
       "data collection; drop direction and weights."},
      {"usair", "USAir97 airport network (332 nodes, 2126 edges), e.g. from the Pajek or "
                "Network Repository collections; drop weights."},
      {"mp", "MP network (567 nodes) used for political-affiliation studies; save as an "
             "undirected edge list."},
      {"polblogs",
       "Adamic-Glance political blogs, polblogs.gml in Mark Newman's network data collection; "
       "the largest component (1222 nodes) is used."},
  };
  return notes;
}

std::vector<std::string> default_datasets(const std::string& table) {
  if (table == "t1") return {"karate"};
  if (table == "t3") return {"polbooks"};
  return {"polbooks", "celegans", "usair", "mp", "polblogs"};
}

struct Row {
  std::string dataset;
  std::string row;
  std::string quantity;
  std::string reference;
  std::string reproduced;
  std::string agree;  // yes, no, or - when the value is informational
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

struct Dataset {
  std::string name;
  fs::path path;
  Graph graph;
  std::optional<std::vector<int>> communities;
};

std::optional<Dataset> open_dataset(const std::string& name, std::ostream& err) {
  const auto dir = data_dir();
  const auto path = dir / (name + ".edgelist");
  if (!fs::exists(path)) {
    err << "missing dataset '" << name << "': expected " << path.string() << '\n';
    const auto& notes = acquisition_notes();
    if (auto it = notes.find(name); it != notes.end()) err << "  " << it->second << '\n';
    err << "  Set CNE_DATA_DIR to the directory holding <name>.edgelist and, for case\n"
           "  studies, <name>.communities ('node community' lines).\n";
    return std::nullopt;
  }
  Dataset d;
  d.name = name;
  d.path = path;
  d.graph = largest_connected_component(load_edge_list_file(path.string()).graph);
  const auto comm = dir / (name + ".communities");
  if (fs::exists(comm)) d.communities = load_communities_file(comm.string(), d.graph);
  return d;
}

/// Lookup of rank and score by canonical pair.
class RankIndex {
 public:
  explicit RankIndex(const SensitivityRanking& r) {
    for (const auto& it : r.items) map_[{it.flip.i, it.flip.j}] = &it;
  }
  const RankedFlip* find(const Edge& e) const {
    auto it = map_.find({e.u, e.v});
    return it == map_.end() ? nullptr : it->second;
  }

 private:
  std::map<std::pair<NodeId, NodeId>, const RankedFlip*> map_;
};

std::optional<bool> cross_community(const Dataset& d, NodeId u, NodeId v) {
  if (!d.communities) return std::nullopt;
  const int a = (*d.communities)[u], b = (*d.communities)[v];
  if (a < 0 || b < 0) return std::nullopt;
  return a != b;
}

std::string pair_label(const Graph& g, NodeId u, NodeId v) {
  return g.label(u) + " " + g.label(v);
}

EmbeddingConfig table_config(std::size_t dim, std::uint64_t seed) {
  EmbeddingConfig c;
  c.dim = dim;
  c.seed = seed;
  return c;
}

void save_ranking(const fs::path& dir, const std::string& stem, const SensitivityRanking& r,
                  const Graph& g, io::RunManifest& m) {
  std::ostringstream os;
  io::write_ranking_csv(os, r, g);
  write_output(dir, stem + ".csv", os.str(), m);
}

std::vector<const ReferenceValue*> select(const std::vector<ReferenceValue>& ref,
                                          const std::string& table, const std::string& dataset) {
  std::vector<const ReferenceValue*> out;
  for (const auto& v : ref)
    if (v.table == table && v.dataset == dataset) out.push_back(&v);
  return out;
}

void table1(const Dataset& d, const std::vector<ReferenceValue>& ref, const ReproduceOptions& opt,
            std::vector<Row>& rows, io::RunManifest& m, std::ostream& out) {
  const auto base = embed(d.graph, table_config(2, opt.seed));
  RankOptions ro;
  ro.threads = opt.threads;
  const auto ranking = rank_flips(d.graph, base, Method::RE, ro);
  save_ranking(opt.out_dir, d.name + "_re_d2", ranking, d.graph, m);
  const RankIndex index(ranking);

  std::map<int, std::string> ref_pairs;
  for (const auto* v : select(ref, "t1", d.name))
    if (v->field == "pair") ref_pairs[v->row] = v->value;

  std::size_t overlap = 0;
  for (const auto& [row, text] : ref_pairs) {
    const auto e = parse_label_pair(d.graph, text);
    const RankedFlip* hit = e ? index.find(*e) : nullptr;
    const bool in_top10 = hit && hit->rank <= 10;
    overlap += in_top10;
    rows.push_back({d.name, std::to_string(row), "rank of (" + text + ")", std::to_string(row),
                    hit ? std::to_string(hit->rank) : "absent", yes_no(in_top10)});
    for (const auto* v : select(ref, "t1", d.name))
      if (v->row == row && v->field == "score")
        rows.push_back({d.name, std::to_string(row), "score of (" + text + ")", v->value,
                        hit ? fixed(hit->score, 4) : "absent", "-"});
  }

  const auto& top = ranking.items;
  const std::string rank1 = top.empty() ? "" : pair_label(d.graph, top[0].flip.i, top[0].flip.j);
  const std::string ref1 = ref_pairs.count(1) ? ref_pairs[1] : "";
  rows.push_back({d.name, "1", "rank-1 flip", ref1, rank1, yes_no(rank1 == ref1)});
  rows.push_back({d.name, "1", "rank-1 disconnects", "yes",
                  yes_no(!top.empty() && top[0].disconnects),
                  yes_no(!top.empty() && top[0].disconnects)});
  rows.push_back({d.name, "-", "reference top-5 within reproduced top-10", ">=3",
                  std::to_string(overlap), yes_no(overlap >= 3)});

  std::size_t nonbridge = 0, cross = 0;
  bool known = true;
  for (std::size_t k = 0; k < std::min<std::size_t>(5, top.size()); ++k) {
    if (top[k].disconnects) continue;
    ++nonbridge;
    const auto c = cross_community(d, top[k].flip.i, top[k].flip.j);
    if (!c) known = false;
    cross += c.value_or(false);
  }
  rows.push_back({d.name, "-", "top-5 non-bridge flips cross-community", "all",
                  known ? std::to_string(cross) + "/" + std::to_string(nonbridge) : "n/a",
                  known ? yes_no(cross == nonbridge) : "-"});

  out << d.name << " RE top 5:\n";
  for (std::size_t k = 0; k < std::min<std::size_t>(5, top.size()); ++k)
    out << "  " << top[k].rank << "  (" << pair_label(d.graph, top[k].flip.i, top[k].flip.j)
        << ")  " << fixed(top[k].score, 4) << (top[k].disconnects ? "  [bridge]" : "") << '\n';
}

void table3(const Dataset& d, const std::vector<ReferenceValue>& ref, const ReproduceOptions& opt,
            std::vector<Row>& rows, io::RunManifest& m, std::ostream& out) {
  const auto base = embed(d.graph, table_config(2, opt.seed));
  RankOptions ro;
  ro.threads = opt.threads;
  const auto ranking = rank_flips(d.graph, base, Method::Approx, ro);
  save_ranking(opt.out_dir, d.name + "_approx_d2", ranking, d.graph, m);
  const RankIndex index(ranking);
  const std::size_t total = ranking.items.size();
  const std::size_t band = std::max<std::size_t>(1, total / 10);

  for (const auto* v : select(ref, "t3", d.name)) {
    // group;rank;pair;score;communities
    std::vector<std::string> f;
    std::stringstream ss(v->value);
    std::string cell;
    while (std::getline(ss, cell, ';')) f.push_back(cell);
    if (f.size() != 5) continue;
    const bool sensitive = f[0].ends_with("-s");
    const auto e = parse_label_pair(d.graph, f[2]);
    const RankedFlip* hit = e ? index.find(*e) : nullptr;
    const bool agree =
        hit && (sensitive ? hit->rank <= band : hit->rank + band > total);
    rows.push_back({d.name, std::to_string(v->row), f[0] + " rank of (" + f[2] + ")", f[1],
                    hit ? std::to_string(hit->rank) : "absent", yes_no(agree)});
    if (hit) {
      const auto c = cross_community(d, hit->flip.i, hit->flip.j);
      const bool ref_cross = f[4].size() == 3 && f[4][0] != f[4][2];
      rows.push_back({d.name, std::to_string(v->row), f[0] + " community of (" + f[2] + ")",
                      ref_cross ? "cross" : "within",
                      c ? (*c ? "cross" : "within") : "n/a",
                      c ? yes_no(*c == ref_cross) : "-"});
    }
  }

  std::size_t adds = 0, adds_cross = 0, bottom = 0, bottom_within = 0;
  bool known = d.communities.has_value();
  for (const auto& it : ranking.items) {
    if (adds == 20) break;
    if (it.flip.direction != FlipDirection::Addition) continue;
    ++adds;
    adds_cross += cross_community(d, it.flip.i, it.flip.j).value_or(false);
  }
  for (auto it = ranking.items.rbegin(); it != ranking.items.rend() && bottom < 20; ++it) {
    ++bottom;
    const auto c = cross_community(d, it->flip.i, it->flip.j);
    bottom_within += c && !*c;
  }
  const double fa = adds ? static_cast<double>(adds_cross) / static_cast<double>(adds) : 0.0;
  const double fb = bottom ? static_cast<double>(bottom_within) / static_cast<double>(bottom) : 0.0;
  rows.push_back({d.name, "-", "top-20 additions cross-community fraction", ">=0.8",
                  known ? fixed(fa, 3) : "n/a", known ? yes_no(fa >= 0.8) : "-"});
  rows.push_back({d.name, "-", "bottom-20 flips within-community fraction", ">=0.8",
                  known ? fixed(fb, 3) : "n/a", known ? yes_no(fb >= 0.8) : "-"});
  out << d.name << " Approx: " << total << " flips ranked\n";
}

void table4(const Dataset& d, const std::vector<ReferenceValue>& ref, const ReproduceOptions& opt,
            std::vector<Row>& rows, std::ostringstream& csv, io::RunManifest& m,
            std::ostream& out) {
  const auto base = embed(d.graph, table_config(8, opt.seed));
  RankOptions ro;
  ro.threads = opt.threads;
  std::map<Method, SensitivityRanking> r;
  for (Method meth : {Method::RE, Method::IPRE, Method::Approx}) {
    r[meth] = rank_flips(d.graph, base, meth, ro);
    save_ranking(opt.out_dir, d.name + "_" + to_string(meth) + "_d8", r[meth], d.graph, m);
  }
  const std::pair<Method, Method> pairs[] = {{Method::IPRE, Method::RE},
                                             {Method::Approx, Method::RE},
                                             {Method::Approx, Method::IPRE}};
  for (const auto& [cand, gt] : pairs) {
    const auto c = compare_rankings(r[gt], r[cand], opt.samples, opt.seed);
    io::write_comparison_csv_row(csv, c, d.name);
    const std::string key = std::string(to_string(cand)) + "/" + to_string(gt);
    std::string refv = "n/a";
    for (const auto* v : select(ref, "t4", d.name))
      if (v->method == key && v->field == "ndcg") refv = v->value;
    const bool ok = refv != "n/a" && c.ndcg >= std::stod(refv) - 0.04;
    rows.push_back({d.name, key, "ndcg " + key, refv, fixed(c.ndcg, 4),
                    refv == "n/a" ? "-" : yes_no(ok)});
    rows.push_back({d.name, key, "p-value " + key, "<0.001", io::format_p_value(c.p_value),
                    yes_no(c.p_value < 0.001)});
    out << d.name << " " << key << ": NDCG " << fixed(c.ndcg, 4) << ", p "
        << io::format_p_value(c.p_value) << '\n';
  }
}

void table2(const Dataset& d, const std::vector<ReferenceValue>& ref, const ReproduceOptions& opt,
            std::vector<Row>& rows, std::vector<TimingRecord>& timing, std::ostream& out) {
  const auto rep = benchmark_runtime(d.graph, table_config(8, opt.seed),
                                     {Method::RE, Method::IPRE, Method::Approx}, opt.timing_flips,
                                     opt.seed, d.name);
  std::map<std::string, double> secs;
  for (const auto& rec : rep.records) {
    secs[to_string(rec.method)] = rec.seconds_per_flip;
    timing.push_back(rec);
    std::string refv = "n/a";
    for (const auto* v : select(ref, "t2", d.name))
      if (v->method == to_string(rec.method) && v->field == "seconds") refv = v->value;
    rows.push_back({d.name, to_string(rec.method),
                    std::string("seconds per flip ") + to_string(rec.method), refv,
                    io::format_double(rec.seconds_per_flip), "-"});
    if (rec.method == Method::Approx)
      rows.push_back({d.name, "approx", "Hessian block precompute seconds", "n/a",
                      io::format_double(rec.precompute_seconds), "-"});
  }
  const bool ordered = secs["approx"] < secs["ipre"] && secs["ipre"] < secs["re"];
  rows.push_back({d.name, "-", "ordering approx < ipre < re", "yes", yes_no(ordered),
                  yes_no(ordered)});
  rows.push_back({d.name, "-", "speedup re/approx", "n/a", fixed(secs["re"] / secs["approx"], 1),
                  "-"});
  out << d.name << " seconds per flip: re " << io::format_double(secs["re"]) << ", ipre "
      << io::format_double(secs["ipre"]) << ", approx " << io::format_double(secs["approx"])
      << '\n';
}

}  // namespace

std::size_t reproduce(const ReproduceOptions& opt, std::ostream& out, std::ostream& err) {
  const auto ref = load_reference_values_file(opt.reference_file);
  ensure_dir(opt.out_dir);
  auto manifest = start_manifest("reproduce " + opt.table, 0, nullptr, nullptr, nullptr);
  manifest.argv = opt.argv;
  manifest.seed = opt.seed;
  manifest.config["table"] = opt.table;
  manifest.config["samples"] = std::to_string(opt.samples);
  manifest.config["timing_flips"] = std::to_string(opt.timing_flips);
  manifest.config["reference"] = opt.reference_file.string();
  manifest.config["data_dir"] = data_dir().string();

  const auto names = opt.datasets.empty() ? default_datasets(opt.table) : opt.datasets;
  std::vector<Row> rows;
  std::ostringstream comparisons;
  io::write_comparison_csv_header(comparisons);
  std::vector<TimingRecord> timing;
  std::size_t ran = 0;
  std::string hashes;
  for (const auto& raw : names) {
    std::string name = raw;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const auto d = open_dataset(name, err);
    if (!d) {
      rows.push_back({name, "-", "dataset", "present", "missing", "-"});
      continue;
    }
    hashes += (hashes.empty() ? "" : ",") + name + ":" + io::hex64(io::hash_file(d->path));
    if (opt.table == "t1") table1(*d, ref, opt, rows, manifest, out);
    if (opt.table == "t3") table3(*d, ref, opt, rows, manifest, out);
    if (opt.table == "t4") table4(*d, ref, opt, rows, comparisons, manifest, out);
    if (opt.table == "t2") table2(*d, ref, opt, rows, timing, out);
    ++ran;
  }
  manifest.config["dataset_hashes"] = hashes;

  std::ostringstream csv;
  csv << "table,dataset,row,quantity,reference,reproduced,agree\n";
  for (const auto& r : rows)
    csv << opt.table << ',' << r.dataset << ',' << r.row << ",\"" << r.quantity << "\","
        << r.reference << ',' << r.reproduced << ',' << r.agree << '\n';
  write_output(opt.out_dir, "reproduce_" + opt.table + ".csv", csv.str(), manifest);
  if (opt.table == "t4" && ran > 0)
    write_output(opt.out_dir, "comparison.csv", comparisons.str(), manifest);
  if (opt.table == "t2" && ran > 0) {
    BenchmarkReport rep;
    rep.records = timing;
    std::ostringstream t;
    io::write_timing_csv(t, rep);
    write_output(opt.out_dir, "timing.csv", t.str(), manifest);
  }
  finish_manifest(opt.out_dir, manifest);
  out << "wrote " << (opt.out_dir / ("reproduce_" + opt.table + ".csv")).string() << " ("
      << ran << " of " << names.size() << " datasets)\n";
  return ran;
}

}  // namespace cne::cli
