#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace membrane::expcli {

std::uint64_t fnv64(const void* data, std::size_t bytes);

// Content-addressed store for solver outputs. Keys are descriptive strings
// hashing to file names; payloads carry an embedded checksum, so corrupt
// entries are detected on load, reported, and recomputed. Writes go through
// a temporary file plus rename, safe under concurrent writers.
//
// The MEMBRANE_CACHE_DIR environment variable overrides the configured
// directory. An empty directory disables the cache.
class ColumnCache {
 public:
  explicit ColumnCache(std::string dir);

  bool enabled() const { return !dir_.empty(); }
  const std::string& dir() const { return dir_; }

  std::optional<std::vector<double>> load(const std::string& key) const;
  void store(const std::string& key, const std::vector<double>& values) const;

  std::string path_for(const std::string& key) const;

 private:
  std::string dir_;
};

}  // namespace membrane::expcli
