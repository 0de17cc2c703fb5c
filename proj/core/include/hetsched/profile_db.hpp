#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include "hetsched/merkle.hpp"

namespace hetsched {

// Measured subgraph times keyed by (subgraph digest, config key).
// Insert-once: a second put for a key must carry the identical value.
// Reads are concurrent; writes are serialized.
class ProfileDB {
 public:
  ProfileDB() = default;
  ProfileDB(const ProfileDB&) = delete;
  ProfileDB& operator=(const ProfileDB&) = delete;

  std::optional<double> get(const Digest& digest, const std::string& config) const;
  // Throws ValidationError for time <= 0 or a conflicting value.
  void put(const Digest& digest, const std::string& config, double time_us);
  std::size_t size() const;

  // Loads an existing JSON-lines cache (if any) and appends every new entry
  // to it from then on.
  void attach(const std::filesystem::path& path);
  // Writes all entries, sorted by key, as JSON lines.
  void save(const std::filesystem::path& path) const;

 private:
  using Key = std::pair<Digest, std::string>;
  void insert_locked(const Key& key, double time_us);

  mutable std::shared_mutex mutex_;
  std::map<Key, double> entries_;
  std::optional<std::ofstream> journal_;
};

}  // namespace hetsched
