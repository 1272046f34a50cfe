#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "narrative/llm/types.hpp"

namespace narrative::report {

std::string_view toolkit_version();

/// SHA-256 of a file's bytes; InputError if unreadable.
std::string file_sha256(const std::filesystem::path& path);

/// Writes text to `path` in binary mode, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string corpus_hash;                    // empty when the command reads no corpus
  std::map<std::string, std::string> inputs;  // role -> sha256
  std::vector<std::string> outputs;           // paths relative to the run directory
  llm::json summary = llm::json::object();
};

/// Writes config.snapshot (pretty JSON) and returns its SHA-256.
std::string write_config_snapshot(const std::filesystem::path& run_dir, const llm::json& config);

/// Writes manifest.json; outputs are sorted and the version is added.
void write_manifest(const std::filesystem::path& run_dir, RunManifest manifest);

/// Renders a chart for every known data file present in the run directory:
/// scores.csv, tp_positions.csv, arc_shares.csv, arousal_curve.csv,
/// valence_curve.csv, ranking_table.csv, pair_table.csv, arc_success.csv.
/// Returns the SVG paths written, relative to the run directory.
std::vector<std::string> render_run(const std::filesystem::path& run_dir);

}  // namespace narrative::report
