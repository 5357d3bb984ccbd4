#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace sepconfig {

inline constexpr const char* kToolVersion = "0.1.0";

/// Append-only directory tree of content-addressed JSON documents:
/// <root>/<kind>/<content-hash>.json. The run id (timestamp plus hash prefix)
/// is stamped into the document but excluded from the content hash, so
/// re-running a command over the same inputs lands on the same file. Writes
/// go through a temp file and rename.
class ArtifactStore {
public:
  explicit ArtifactStore(std::filesystem::path root);

  /// Stamps run_id and tool_version, then persists. Returns the final path.
  std::filesystem::path put(const std::string& kind, nlohmann::ordered_json doc);

  nlohmann::ordered_json get(const std::filesystem::path& path) const;

  const std::filesystem::path& root() const { return root_; }

  /// Hash over the canonical dump with the volatile fields removed.
  static std::string content_hash(nlohmann::ordered_json doc);

  /// UTC timestamp for run ids; honors the SEPCFG_TIMESTAMP override so
  /// replayed runs can be byte-compared.
  static std::string timestamp();

private:
  std::filesystem::path root_;
};

}  // namespace sepconfig
