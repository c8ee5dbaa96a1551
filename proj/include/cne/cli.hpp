#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cne/graph.hpp"

namespace cne::cli {

/// Exit codes: 0 success, 1 computation failure, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runs one cnesens invocation. Human summaries go to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// $CNE_DATA_DIR if set, else the data directory of the source tree.
std::filesystem::path data_dir();

/// path itself when it exists; otherwise data_dir()/<path>.edgelist for a
/// bare dataset name. Throws FileError naming the argument.
std::filesystem::path resolve_graph_path(const std::string& path);

struct ReferenceValue {
  std::string table;
  int row = 0;
  std::string dataset;
  std::string method;
  std::string field;
  std::string value;
};

std::vector<ReferenceValue> load_reference_values(std::istream& is);
std::vector<ReferenceValue> load_reference_values_file(const std::filesystem::path& path);

/// Parses "u v" into the graph's node ids, or nullopt if a label is unknown.
std::optional<Edge> parse_label_pair(const Graph& g, const std::string& text);

struct ReproduceOptions {
  std::string table;
  std::vector<std::string> datasets;
  std::filesystem::path out_dir;
  std::filesystem::path reference_file;
  std::size_t samples = 1000;
  std::size_t timing_flips = 10;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  /// Recorded in the manifest.
  std::vector<std::string> argv;
};

/// Writes reproduce_<table>.csv and per-dataset artifacts into out_dir.
/// Missing datasets are reported to err with acquisition notes and counted;
/// returns the number of datasets that ran.
std::size_t reproduce(const ReproduceOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace cne::cli
