#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cne/embedding.hpp"
#include "cne/evaluation.hpp"
#include "cne/graph.hpp"
#include "cne/sensitivity.hpp"

namespace cne::io {

/// Doubles are written with %.17g so files round-trip exactly.
std::string format_double(double v);

/// node,label,x0,...,x{d-1}
void write_embedding_csv(std::ostream& os, const Embedding& x, const Graph& g);
Embedding read_embedding_csv(std::istream& is);

/// Dense n x n matrix, no header; the diagonal is written as 0.
void write_probability_csv(std::ostream& os, const LinkProbabilityMatrix& p);

void write_diagnostics_json(std::ostream& os, const EmbedResult& r);

/// A '#' line with method and embedding hash, then a header and one row per
/// flip: rank,i,j,label_i,label_j,direction,method,score,disconnects,regularized.
void write_ranking_csv(std::ostream& os, const SensitivityRanking& r, const Graph& g);
SensitivityRanking read_ranking_csv(std::istream& is);
SensitivityRanking read_ranking_csv_file(const std::filesystem::path& path);

void write_ranking_json(std::ostream& os, const SensitivityRanking& r, const Graph& g);

/// "<0.001" below one in a thousand, the value to 3 decimals otherwise.
std::string format_p_value(double p);

void write_comparison_json(std::ostream& os, const RankingComparison& c,
                           const std::string& dataset);
/// dataset,candidate,ground_truth,ndcg,p_value,p_value_display,n_samples,gain
void write_comparison_csv_header(std::ostream& os);
void write_comparison_csv_row(std::ostream& os, const RankingComparison& c,
                              const std::string& dataset);

/// dataset,method,seconds_per_flip,flips_measured,precompute_seconds
void write_timing_csv(std::ostream& os, const BenchmarkReport& rep);
void write_benchmark_json(std::ostream& os, const BenchmarkReport& rep);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string dataset_path;
  std::uint64_t dataset_hash = 0;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
};

void write_manifest_json(std::ostream& os, const RunManifest& m);

/// FNV-1a 64 over the file bytes.
std::uint64_t hash_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

/// UTC, ISO 8601, second resolution.
std::string utc_timestamp();

/// Opens for writing or throws FileError naming the path.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace cne::io
