#include "isle/memory_model.hpp"

#include "isle/errors.hpp"

namespace isle {

MemoryModel::MemoryModel(std::uint64_t buffer_capacity_words) {
  add_lru_region("buffer", buffer_capacity_words);
}

int MemoryModel::add_lru_region(const std::string& name, std::uint64_t capacity_words) {
  Region r;
  r.stats.name = name;
  r.capacity = capacity_words;
  regions_.push_back(std::move(r));
  return static_cast<int>(regions_.size()) - 1;
}

int MemoryModel::add_stream_region(const std::string& name) {
  Region r;
  r.stats.name = name;
  r.stream = true;
  regions_.push_back(std::move(r));
  return static_cast<int>(regions_.size()) - 1;
}

int MemoryModel::region_id(const std::string& name) const {
  for (size_t i = 0; i < regions_.size(); ++i)
    if (regions_[i].stats.name == name) return static_cast<int>(i);
  throw ConfigError("memory model: no region named " + name);
}

std::uint64_t MemoryModel::buffer_capacity_words() const {
  std::uint64_t total = 0;
  for (const auto& r : regions_) total += r.capacity;
  return total;
}

void MemoryModel::charge_read(Region& r, MatrixTag tag, std::uint32_t words) {
  total_reads_ += words;
  tag_reads_[static_cast<int>(tag)] += words;
  r.stats.reads_words += words;
}

void MemoryModel::charge_write(Region& r, MatrixTag tag, std::uint32_t words) {
  total_writes_ += words;
  tag_writes_[static_cast<int>(tag)] += words;
  r.stats.writes_words += words;
}

void MemoryModel::evict_until_fits(Region& r, std::uint32_t words) {
  while (r.used + words > r.capacity && !r.lru.empty()) {
    Key victim = r.lru.back();
    r.lru.pop_back();
    auto it = r.lines.find(victim);
    if (it->second.dirty) {
      charge_write(r, victim.tag, it->second.words);
      r.evicted_dirty.insert(victim);
    }
    r.used -= it->second.words;
    r.lines.erase(it);
  }
}

bool MemoryModel::touch_resident(Region& r, const Key& key, bool mark_dirty) {
  auto it = r.lines.find(key);
  if (it == r.lines.end()) return false;
  r.lru.splice(r.lru.begin(), r.lru, it->second.lru_it);
  if (mark_dirty) it->second.dirty = true;
  return true;
}

void MemoryModel::insert_line(Region& r, const Key& key, std::uint32_t words, bool dirty,
                              MatrixTag tag) {
  if (words > r.capacity) {  // streaming miss, never cached
    if (dirty) {
      charge_write(r, tag, words);
      r.evicted_dirty.insert(key);
    }
    return;
  }
  evict_until_fits(r, words);
  r.lru.push_front(key);
  r.lines[key] = Line{words, dirty, r.lru.begin()};
  r.used += words;
}

bool MemoryModel::access(const Event& e) {
  if (e.is_write) {
    bool resident = touch_resident(regions_[0], Key{e.tag, e.block}, true);
    if (!resident) write(0, e.tag, e.block, e.words);
    return resident;
  }
  return read(0, e.tag, e.block, e.words);
}

bool MemoryModel::read(int region, MatrixTag tag, std::uint64_t block, std::uint32_t words) {
  Region& r = regions_[region];
  r.stats.read_events++;
  tag_read_events_[static_cast<int>(tag)]++;
  Key key{tag, block};
  if (!r.stream && touch_resident(r, key, false)) {
    r.stats.read_hits++;
    return true;
  }
  charge_read(r, tag, words);
  if (!r.stream) insert_line(r, key, words, false, tag);
  return false;
}

void MemoryModel::write(int region, MatrixTag tag, std::uint64_t block, std::uint32_t words) {
  Region& r = regions_[region];
  if (r.stream) {
    charge_write(r, tag, words);
    return;
  }
  Key key{tag, block};
  if (touch_resident(r, key, true)) return;
  insert_line(r, key, words, true, tag);
}

void MemoryModel::update(int region, MatrixTag tag, std::uint64_t block, std::uint32_t words) {
  Region& r = regions_[region];
  Key key{tag, block};
  if (r.stream) {
    if (r.evicted_dirty.count(key)) charge_read(r, tag, words);
    charge_write(r, tag, words);
    r.evicted_dirty.insert(key);
    return;
  }
  if (touch_resident(r, key, true)) return;
  if (r.evicted_dirty.count(key)) {
    // partial result lives off-chip; fetch before accumulating further
    r.stats.read_events++;
    tag_read_events_[static_cast<int>(tag)]++;
    charge_read(r, tag, words);
  }
  insert_line(r, key, words, true, tag);
}

void MemoryModel::flush() {
  for (auto& r : regions_) {
    for (auto& [key, line] : r.lines)
      if (line.dirty) charge_write(r, key.tag, line.words);
    r.lines.clear();
    r.lru.clear();
    r.used = 0;
  }
}

nlohmann::json MemoryModel::report(const std::string& strategy) const {
  nlohmann::json j;
  j["strategy"] = strategy;
  j["buffer_capacity_words"] = buffer_capacity_words();
  j["reads_words"] = total_reads_;
  j["writes_words"] = total_writes_;
  const char* names[3] = {"A", "XW", "Xo"};
  nlohmann::json breakdown;
  for (int t = 0; t < 3; ++t)
    breakdown[names[t]] = {{"reads_words", tag_reads_[t]}, {"writes_words", tag_writes_[t]}};
  j["breakdown"] = std::move(breakdown);
  auto regions = nlohmann::json::array();
  for (const auto& r : regions_) {
    regions.push_back({{"name", r.stats.name},
                       {"read_events", r.stats.read_events},
                       {"read_hits", r.stats.read_hits},
                       {"reads_words", r.stats.reads_words},
                       {"writes_words", r.stats.writes_words}});
  }
  j["regions"] = std::move(regions);
  return j;
}

}  // namespace isle
