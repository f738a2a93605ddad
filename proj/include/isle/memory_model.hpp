#pragma once

#include <cstdint>
#include <list>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

namespace isle {

enum class MatrixTag : std::uint8_t { A = 0, XW = 1, Xo = 2 };

// Off-chip word counter behind a configurable on-chip buffer. The buffer is
// split into named regions; each region is an LRU over (tag, block) keyed
// entries, or a stream (nothing retained). Reads charge words on miss;
// writes are buffered dirty and charged once per dirty eviction or final
// flush. A block larger than its region's capacity is a streaming miss and
// is never cached.
class MemoryModel {
 public:
  struct Event {
    MatrixTag tag;
    std::uint64_t block;
    std::uint32_t words;
    bool is_write;
  };

  struct RegionStats {
    std::string name;
    std::uint64_t read_events = 0;
    std::uint64_t read_hits = 0;
    std::uint64_t reads_words = 0;
    std::uint64_t writes_words = 0;
  };

  // Single LRU region holding everything.
  explicit MemoryModel(std::uint64_t buffer_capacity_words);
  // Empty model; add regions explicitly.
  MemoryModel() = default;

  int add_lru_region(const std::string& name, std::uint64_t capacity_words);
  int add_stream_region(const std::string& name);
  int region_id(const std::string& name) const;

  // Spec-level entry point against region 0. Returns hit.
  bool access(const Event& e);

  bool read(int region, MatrixTag tag, std::uint64_t block, std::uint32_t words);
  void write(int region, MatrixTag tag, std::uint64_t block, std::uint32_t words);
  // Read-modify-write of an accumulator block. The first touch allocates
  // without a fetch (the partial starts at zero on-chip); once a dirty copy
  // has been evicted, a later touch re-fetches it.
  void update(int region, MatrixTag tag, std::uint64_t block, std::uint32_t words);

  void flush();

  std::uint64_t reads_words() const { return total_reads_; }
  std::uint64_t writes_words() const { return total_writes_; }
  std::uint64_t reads_words(MatrixTag t) const { return tag_reads_[static_cast<int>(t)]; }
  std::uint64_t writes_words(MatrixTag t) const { return tag_writes_[static_cast<int>(t)]; }
  std::uint64_t read_events(MatrixTag t) const { return tag_read_events_[static_cast<int>(t)]; }

  const RegionStats& region_stats(int region) const { return regions_[region].stats; }
  std::uint64_t buffer_capacity_words() const;

  nlohmann::json report(const std::string& strategy) const;

 private:
  struct Key {
    MatrixTag tag;
    std::uint64_t block;
    bool operator==(const Key& o) const { return tag == o.tag && block == o.block; }
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      return std::hash<std::uint64_t>()(k.block * 3 + static_cast<std::uint64_t>(k.tag));
    }
  };
  struct Line {
    std::uint32_t words;
    bool dirty;
    std::list<Key>::iterator lru_it;
  };
  struct Region {
    RegionStats stats;
    bool stream = false;
    std::uint64_t capacity = 0;
    std::uint64_t used = 0;
    std::list<Key> lru;  // front = most recent
    std::unordered_map<Key, Line, KeyHash> lines;
    std::unordered_set<Key, KeyHash> evicted_dirty;  // blocks with off-chip state
  };

  std::vector<Region> regions_;
  std::uint64_t total_reads_ = 0;
  std::uint64_t total_writes_ = 0;
  std::uint64_t tag_reads_[3] = {0, 0, 0};
  std::uint64_t tag_writes_[3] = {0, 0, 0};
  std::uint64_t tag_read_events_[3] = {0, 0, 0};

  void charge_read(Region& r, MatrixTag tag, std::uint32_t words);
  void charge_write(Region& r, MatrixTag tag, std::uint32_t words);
  void evict_until_fits(Region& r, std::uint32_t words);
  bool touch_resident(Region& r, const Key& key, bool mark_dirty);
  void insert_line(Region& r, const Key& key, std::uint32_t words, bool dirty, MatrixTag tag);
};

}  // namespace isle
