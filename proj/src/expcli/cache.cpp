#include "expcli/cache.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace membrane::expcli {

namespace {
constexpr char kMagic[4] = {'M', 'L', 'C', '1'};
}

std::uint64_t fnv64(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

ColumnCache::ColumnCache(std::string dir) : dir_(std::move(dir)) {
  if (const char* env = std::getenv("MEMBRANE_CACHE_DIR"); env && *env) dir_ = env;
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::string ColumnCache::path_for(const std::string& key) const {
  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.col",
                static_cast<unsigned long long>(fnv64(key.data(), key.size())));
  return dir_ + "/" + name;
}

std::optional<std::vector<double>> ColumnCache::load(const std::string& key) const {
  if (!enabled()) return std::nullopt;
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;

  char magic[4];
  std::uint64_t count = 0, checksum = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in || std::memcmp(magic, kMagic, 4) != 0 || count > (1ull << 32)) {
    std::cerr << "cache: corrupt header for key `" << key << "`, recomputing\n";
    return std::nullopt;
  }
  std::vector<double> values(count);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  in.read(reinterpret_cast<char*>(&checksum), sizeof(checksum));
  if (!in || checksum != fnv64(values.data(), count * sizeof(double))) {
    std::cerr << "cache: checksum mismatch for key `" << key << "`, recomputing\n";
    return std::nullopt;
  }
  return values;
}

void ColumnCache::store(const std::string& key,
                        const std::vector<double>& values) const {
  if (!enabled()) return;
  const std::string path = path_for(key);
  const std::string tmp =
      path + ".tmp." + std::to_string(static_cast<unsigned long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    std::uint64_t count = values.size();
    std::uint64_t checksum = fnv64(values.data(), count * sizeof(double));
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
    out.write(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace membrane::expcli
