#pragma once

// Seed-deterministic lazy bond configurations and sparse cluster exploration
// restricted to arbitrary regions, with truncation-aware connectivity queries.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "percap/geometry.hpp"
#include "percap/rng.hpp"

namespace percap {

// Open-addressing point -> index map. Exploration is the hot path of every
// estimator, so this avoids std::unordered_map's allocation-per-node cost.
// Points live in an external arena; the table stores indices plus their
// cached hashes and compares full coordinates on probe.
class PointIndexMap {
 public:
  explicit PointIndexMap(const std::vector<Point>* arena) : arena_(arena) { rehash(1024); }

  static uint64_t hash_of(const Point& p) {
    rng::Digest d;
    d.absorb(uint64_t(p.dim));
    for (int i = 0; i < p.dim; ++i) d.absorb(uint64_t(p.c[i]));
    return d.lo ^ (d.hi * 0x9E3779B97F4A7C15ull);
  }

  // Index of p if present, else UINT32_MAX.
  uint32_t find(const Point& p) const {
    const uint64_t h = hash_of(p);
    size_t i = h & mask_;
    while (true) {
      const uint32_t slot = slots_[i];
      if (slot == kEmpty) return UINT32_MAX;
      if (hashes_[i] == h && (*arena_)[slot] == p) return slot;
      i = (i + 1) & mask_;
    }
  }

  // Inserts index idx for p (caller has already pushed p into the arena).
  void insert(const Point& p, uint32_t idx) {
    if ((size_ + 1) * 10 >= capacity_ * 7) rehash(capacity_ * 2);
    insert_hashed(hash_of(p), idx);
    ++size_;
  }

  size_t size() const { return size_; }

 private:
  static constexpr uint32_t kEmpty = UINT32_MAX;

  void insert_hashed(uint64_t h, uint32_t idx) {
    size_t i = h & mask_;
    while (slots_[i] != kEmpty) i = (i + 1) & mask_;
    slots_[i] = idx;
    hashes_[i] = h;
  }

  void rehash(size_t cap) {
    std::vector<uint32_t> old_slots = std::move(slots_);
    std::vector<uint64_t> old_hashes = std::move(hashes_);
    capacity_ = cap;
    mask_ = cap - 1;
    slots_.assign(cap, kEmpty);
    hashes_.assign(cap, 0);
    for (size_t i = 0; i < old_slots.size(); ++i) {
      if (old_slots[i] != kEmpty) insert_hashed(old_hashes[i], old_slots[i]);
    }
  }

  const std::vector<Point>* arena_;
  std::vector<uint32_t> slots_;
  std::vector<uint64_t> hashes_;
  size_t capacity_ = 0;
  size_t mask_ = 0;
  size_t size_ = 0;
};

// One percolation configuration: the (master_seed, replica) pair pins the
// state of every edge of the lattice. Edge states are computed on demand by
// a counter-mode keyed hash of the canonical edge encoding; re-querying never
// changes an answer, and distinct replicas are independent streams.
//
// An optional memo caches answered queries. It is off by default: the keyed
// hash is cheaper than a hash-map lookup, so the memo only pays off for
// callers that re-query the same few edges many times.
class Configuration {
 public:
  Configuration(const GraphSpec& spec, uint64_t master_seed, uint64_t replica,
                bool enable_memo = false);

  const GraphSpec& spec() const { return spec_; }
  const NeighborTable& table() const { return table_; }
  uint64_t master_seed() const { return master_seed_; }
  uint64_t replica() const { return replica_; }

  // Edge state through the public edge type.
  bool edge_open(const Edge& e) const;

  // Fast path used by exploration: the edge (base, base + positive_offset).
  bool edge_open_offset(const Point& base, int positive_offset_rank) const {
    rng::Digest d;
    d.absorb(0xED6Eull);
    d.absorb(uint64_t(positive_offset_rank));
    for (int i = 0; i < spec_.dim; ++i) d.absorb(uint64_t(base.c[i]));
    if (memo_) {
      const uint64_t k = d.lo ^ (d.hi << 1 | d.hi >> 63);
      auto it = memo_->find(k);
      if (it != memo_->end()) return it->second;
      const bool open = rng::keyed_unit(edge_key_, d) < spec_.p;
      memo_->emplace(k, open);
      return open;
    }
    return rng::keyed_unit(edge_key_, d) < spec_.p;
  }

  size_t memo_entries() const { return memo_ ? memo_->size() : 0; }

 private:
  GraphSpec spec_;
  NeighborTable table_;
  uint64_t master_seed_;
  uint64_t replica_;
  uint64_t edge_key_;
  mutable std::optional<std::unordered_map<uint64_t, bool>> memo_;
};

// Explored connected component. `vertices` is in BFS admission order;
// `open_edges` holds every open edge among admitted vertices (as index
// pairs), so a truncated cluster is still internally complete.
struct Cluster {
  GraphSpec spec;
  Point origin;
  Region region;
  std::vector<Point> vertices;
  std::vector<std::pair<uint32_t, uint32_t>> open_edges;
  bool truncated = false;
  uint64_t budget_used = 0;

  bool contains(const Point& p) const;
  // One vertex per line, coordinates space-separated, lexicographic order.
  std::string serialize() const;
};

struct ConnectivityVerdict {
  enum class Status { Connected, Disconnected, Truncated };
  Status status = Status::Disconnected;
  Point witness;            // valid when Connected
  uint64_t explored = 0;    // vertices admitted before the verdict

  bool connected() const { return status == Status::Connected; }
  bool truncated() const { return status == Status::Truncated; }
};

// Breadth-first growth of the cluster of x over open edges with both
// endpoints in `region`, admitting at most `budget` vertices. When more of
// the component exists beyond the budget the result carries truncated=true.
Cluster explore(const Configuration& cfg, const Point& x, const Region& region,
                uint64_t budget);

// Budgeted connectivity query with early exit on first contact with target.
ConnectivityVerdict connects(const Configuration& cfg, const Point& x,
                             const std::vector<Point>& target, const Region& region,
                             uint64_t budget);

// Multi-source variant: the event that any source connects to the target set.
ConnectivityVerdict connects_sets(const Configuration& cfg, const std::vector<Point>& sources,
                                  const std::vector<Point>& target, const Region& region,
                                  uint64_t budget);

// Predicate-target variant (e.g. "reached the inner boundary of the box").
template <class TargetPred>
ConnectivityVerdict connects_pred(const Configuration& cfg, const std::vector<Point>& sources,
                                  TargetPred&& is_target, const Region& region, uint64_t budget);

// Cluster vertices on the inner boundary of the (box) exploration region:
// the pioneer points of the cluster.
std::vector<Point> pioneers(const Cluster& cluster);

struct AnnulusCount {
  uint64_t count = 0;
  bool truncated = false;
  uint64_t cluster_size = 0;
};

// Number of vertices of the (budgeted) cluster of z lying in an annulus
// around `center`: inward variant counts in B(center,r) \ B(center,r-L),
// outward variant in B(center,r+L) \ B(center,r).
AnnulusCount annulus_count(const Configuration& cfg, const Point& z, const Point& center,
                           int64_t r, int64_t L, uint64_t budget, bool outward = false);

// ---------------------------------------------------------------------------

template <class TargetPred>
ConnectivityVerdict connects_pred(const Configuration& cfg, const std::vector<Point>& sources,
                                  TargetPred&& is_target, const Region& region, uint64_t budget) {
  ConnectivityVerdict v;
  if (budget < 1) throw std::invalid_argument("connects: budget must be >= 1");
  std::vector<Point> arena;
  PointIndexMap index(&arena);
  std::vector<uint32_t> queue;
  bool saw_overflow = false;
  for (const Point& s : sources) {
    check_point(s, cfg.spec().dim);
    if (!region.contains(s)) throw std::invalid_argument("connects: source not in region");
    if (index.find(s) != UINT32_MAX) continue;
    if (is_target(s)) {
      v.status = ConnectivityVerdict::Status::Connected;
      v.witness = s;
      v.explored = arena.size();
      return v;
    }
    if (arena.size() >= budget) {
      saw_overflow = true;
      continue;
    }
    const uint32_t idx = uint32_t(arena.size());
    arena.push_back(s);
    index.insert(s, idx);
    queue.push_back(idx);
  }
  const NeighborTable& table = cfg.table();
  const auto& offsets = table.offsets();
  for (size_t head = 0; head < queue.size(); ++head) {
    const Point u = arena[queue[head]];
    for (size_t oi = 0; oi < offsets.size(); ++oi) {
      const Point w = u + offsets[oi];
      if (!region.contains(w)) continue;
      if (index.find(w) != UINT32_MAX) continue;
      const bool positive = table.is_positive(oi);
      const Point& base = positive ? u : w;
      if (!cfg.edge_open_offset(base, table.canonical_index(oi))) continue;
      if (is_target(w)) {
        v.status = ConnectivityVerdict::Status::Connected;
        v.witness = w;
        v.explored = arena.size();
        return v;
      }
      if (arena.size() >= budget) {
        saw_overflow = true;
        continue;
      }
      const uint32_t idx = uint32_t(arena.size());
      arena.push_back(w);
      index.insert(w, idx);
      queue.push_back(idx);
    }
  }
  v.status = saw_overflow ? ConnectivityVerdict::Status::Truncated
                          : ConnectivityVerdict::Status::Disconnected;
  v.explored = arena.size();
  return v;
}

}  // namespace percap
