#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "cne/embedding.hpp"
#include "cne/graph.hpp"
#include "cne/io.hpp"

namespace CLI {
class App;
}

namespace cne::cli::detail {

inline constexpr const char* kToolVersion = "0.1.0";

struct EmbedFlags {
  EmbeddingConfig cfg;
  std::optional<double> prior;
  std::string format = "auto";
  bool lcc = false;
  std::size_t threads = 1;

  EmbeddingConfig config() const;
};

void add_embed_flags(CLI::App& cmd, EmbedFlags& f);

struct LoadedInput {
  std::filesystem::path path;
  Graph graph;
  std::uint64_t hash = 0;
};

LoadedInput load_input(const std::string& arg, const EmbedFlags& f, std::ostream& err);

io::RunManifest start_manifest(const std::string& command, int argc, const char* const* argv,
                               const LoadedInput* in, const EmbeddingConfig* cfg);
void write_output(const std::filesystem::path& dir, const std::string& name,
                  const std::string& contents, io::RunManifest& m);
void finish_manifest(const std::filesystem::path& dir, io::RunManifest& m);
void ensure_dir(const std::filesystem::path& dir);

}  // namespace cne::cli::detail
