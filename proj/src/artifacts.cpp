#include "sepconfig/artifacts.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "sepconfig/errors.hpp"
#include "sepconfig/sha256.hpp"

namespace sepconfig {

using nlohmann::ordered_json;

ArtifactStore::ArtifactStore(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

std::string ArtifactStore::content_hash(ordered_json doc) {
  doc.erase("run_id");
  return sha256_hex(doc.dump());
}

std::string ArtifactStore::timestamp() {
  if (const char* forced = std::getenv("SEPCFG_TIMESTAMP")) return forced;
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::filesystem::path ArtifactStore::put(const std::string& kind, ordered_json doc) {
  doc["tool_version"] = kToolVersion;  // versioned before hashing
  const std::string hash = content_hash(doc);
  ordered_json stamped;
  stamped["run_id"] = timestamp() + "-" + hash.substr(0, 12);
  for (auto& [key, value] : doc.items()) {
    if (key == "run_id") continue;
    stamped[key] = std::move(value);
  }

  const auto dir = root_ / kind;
  std::filesystem::create_directories(dir);
  const auto path = dir / (hash + ".json");
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write artifact " + path.string());
    out << stamped.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
  return path;
}

ordered_json ArtifactStore::get(const std::filesystem::path& path) const {
  std::ifstream in(path);
  if (!in) throw Error("cannot open artifact " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("invalid artifact " + path.string() + ": " + e.what());
  }
}

}  // namespace sepconfig
