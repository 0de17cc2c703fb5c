#include "hetsched/profile_db.hpp"

#include <nlohmann/json.hpp>

#include "hetsched/error.hpp"

namespace hetsched {

std::optional<double> ProfileDB::get(const Digest& digest, const std::string& config) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(Key{digest, config});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ProfileDB::put(const Digest& digest, const std::string& config, double time_us) {
  if (!(time_us > 0.0)) throw ValidationError("profile time must be positive");
  std::unique_lock lock(mutex_);
  Key key{digest, config};
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    if (it->second != time_us)
      throw ValidationError("conflicting profile entry for " + to_hex(digest) + " on " + config);
    return;
  }
  insert_locked(key, time_us);
  if (journal_) {
    nlohmann::json line{{"digest", to_hex(digest)}, {"config", config}, {"time_us", time_us}};
    *journal_ << line.dump() << '\n';
    journal_->flush();
  }
}

void ProfileDB::insert_locked(const Key& key, double time_us) { entries_.emplace(key, time_us); }

std::size_t ProfileDB::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void ProfileDB::attach(const std::filesystem::path& path) {
  std::unique_lock lock(mutex_);
  if (std::ifstream in{path}) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        Key key{digest_from_hex(j.at("digest").get<std::string>()), j.at("config").get<std::string>()};
        double t = j.at("time_us").get<double>();
        auto it = entries_.find(key);
        if (it != entries_.end() && it->second != t)
          throw ValidationError("conflicting duplicate entry");
        if (!(t > 0.0)) throw ValidationError("non-positive time");
        insert_locked(key, t);
      } catch (const std::exception& e) {
        throw ValidationError(path.string() + ":" + std::to_string(number) + ": " + e.what());
      }
    }
  }
  journal_.emplace(path, std::ios::app);
  if (!*journal_) throw ValidationError("cannot open profile cache " + path.string());
}

void ProfileDB::save(const std::filesystem::path& path) const {
  std::shared_lock lock(mutex_);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (const auto& [key, t] : entries_) {
    nlohmann::json line{{"digest", to_hex(key.first)}, {"config", key.second}, {"time_us", t}};
    out << line.dump() << '\n';
  }
}

}  // namespace hetsched
