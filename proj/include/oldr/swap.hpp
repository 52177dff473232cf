#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oldr/geometry.hpp"
#include "oldr/plan.hpp"

namespace oldr {

/// One synchronous step: the disc at ring[i] moves to ring[(i + dir) mod 6].
struct RingRotation {
  std::array<int, 6> ring{};
  int dir = 1;
};

/// Union of two hexagon rings sharing exactly two vertices. `verts` lists ring
/// A (rotated to start at a shared vertex) followed by the rest of ring B.
struct SwapRegion {
  int hex_a = -1;
  int hex_b = -1;
  std::array<int, 10> verts{};
  std::array<int, 6> ring_a{};  // canonical rotation of ring A
  std::array<int, 6> ring_b{};  // canonical rotation of ring B
  std::array<int, 6> b_index{};  // region index of each ring_b entry
};

/// Sequential ring rotations whose net effect exchanges two discs.
struct SwapProgram {
  std::vector<RingRotation> steps;
  std::vector<int> footprint;  // sorted vertex ids touched by any step
};

struct SwapSchedule {
  std::vector<int> region;
  /// Each step lists the concurrent moves (from, to).
  std::vector<std::vector<std::pair<int, int>>> steps;
  /// net_permutation[i] = final vertex of the disc that started at region[i].
  std::vector<int> net_permutation;
};

namespace detail {

using PackedState = std::uint64_t;

inline PackedState pack_identity() {
  PackedState s = 0;
  for (int i = 0; i < 10; ++i) s |= static_cast<PackedState>(i) << (4 * i);
  return s;
}

inline int packed_at(PackedState s, int p) { return static_cast<int>((s >> (4 * p)) & 0xF); }

/// Generator g moves the content of position p to perm[g][p].
using GeneratorSet = std::array<std::array<int, 10>, 4>;

inline PackedState apply_generator(PackedState s, const std::array<int, 10>& perm) {
  PackedState out = 0;
  for (int p = 0; p < 10; ++p) out |= static_cast<PackedState>(packed_at(s, p)) << (4 * perm[p]);
  return out;
}

inline GeneratorSet region_generators(const std::array<int, 6>& b_index) {
  GeneratorSet gens;
  for (auto& g : gens)
    for (int p = 0; p < 10; ++p) g[p] = p;
  for (int i = 0; i < 6; ++i) {
    gens[0][i] = (i + 1) % 6;
    gens[1][i] = (i + 5) % 6;
    gens[2][b_index[i]] = b_index[(i + 1) % 6];
    gens[3][b_index[i]] = b_index[(i + 5) % 6];
  }
  return gens;
}

/// Shortest generator word taking the identity arrangement to the one with
/// positions i and j exchanged (bidirectional breadth-first search).
inline std::vector<int> shortest_transposition_word(const std::array<int, 6>& b_index, int i, int j) {
  const GeneratorSet gens = region_generators(b_index);
  const PackedState start = pack_identity();
  PackedState target = start;
  {
    const PackedState mi = 0xFull << (4 * i), mj = 0xFull << (4 * j);
    const PackedState vi = (start & mi) >> (4 * i), vj = (start & mj) >> (4 * j);
    target = (target & ~mi & ~mj) | (vj << (4 * i)) | (vi << (4 * j));
  }
  if (start == target) return {};
  // forward[s] = (predecessor, generator); backward[s] = (successor, generator).
  std::unordered_map<PackedState, std::pair<PackedState, int>> forward, backward;
  forward.emplace(start, std::pair{start, -1});
  backward.emplace(target, std::pair{target, -1});
  std::vector<PackedState> ffront{start}, bfront{target};
  auto inverse = [](int g) { return g ^ 1; };
  while (!ffront.empty() && !bfront.empty()) {
    const bool expand_forward = ffront.size() <= bfront.size();
    auto& front = expand_forward ? ffront : bfront;
    auto& mine = expand_forward ? forward : backward;
    const auto& other = expand_forward ? backward : forward;
    std::vector<PackedState> next;
    std::optional<PackedState> meet;
    for (PackedState s : front) {
      for (int g = 0; g < 4; ++g) {
        // Backward search walks generator inverses.
        const PackedState t = apply_generator(s, gens[expand_forward ? g : inverse(g)]);
        if (mine.count(t)) continue;
        mine.emplace(t, std::pair{s, g});
        next.push_back(t);
        if (!meet && other.count(t)) meet = t;
      }
    }
    front = std::move(next);
    if (meet) {
      std::vector<int> word;
      for (PackedState s = *meet; s != start;) {
        const auto [prev, g] = forward.at(s);
        word.push_back(g);
        s = prev;
      }
      std::reverse(word.begin(), word.end());
      for (PackedState s = *meet; s != target;) {
        const auto [next_state, g] = backward.at(s);
        word.push_back(g);
        s = next_state;
      }
      return word;
    }
  }
  throw Error(ErrorKind::internal, "swap search exhausted " + std::to_string(forward.size() + backward.size()) +
                                       " states without reaching the transposition");
}

/// Process-wide cache of words keyed by region structure and position pair.
inline const std::vector<int>& cached_word(const std::array<int, 6>& b_index, int i, int j) {
  static std::mutex mu;
  static std::map<std::tuple<std::array<int, 6>, int, int>, std::vector<int>> cache;
  if (i > j) std::swap(i, j);
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::tuple{b_index, i, j};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, shortest_transposition_word(b_index, i, j)).first;
  return it->second;
}

}  // namespace detail

/// Precomputed two-hexagon regions of a grid and transposition programs between
/// arbitrary non-frozen vertices.
class SwapEngine {
 public:
  explicit SwapEngine(const TriGrid& g) : g_(g) {
    for (const auto& cover : g.hex.covers)
      for (const auto& hx : cover) hexes_.push_back(hx);
    std::sort(hexes_.begin(), hexes_.end(), [](const Hexagon& a, const Hexagon& b) { return a.center_id < b.center_id; });
    std::vector<int> hex_at(g.size(), -1);
    for (std::size_t h = 0; h < hexes_.size(); ++h) hex_at[hexes_[h].center_id] = static_cast<int>(h);
    vertex_regions_.resize(g.size());
    frozen_.assign(g.size(), 0);
    for (int f : g.hex.frozen) frozen_[f] = 1;
    for (std::size_t h = 0; h < hexes_.size(); ++h) {
      const LatticePoint c = hexes_[h].center;
      std::vector<LatticePoint> offsets(kDirections.begin(), kDirections.end());
      for (int d = 0; d < 6; ++d) offsets.push_back(kDirections[d] + kDirections[(d + 1) % 6]);
      for (const auto& off : offsets) {
        const int cid = g.id_at(c + off);
        if (cid < 0 || hex_at[cid] < 0 || hex_at[cid] <= static_cast<int>(h)) continue;
        add_region(static_cast<int>(h), hex_at[cid]);
      }
    }
  }

  const TriGrid& grid() const { return g_; }
  const std::vector<SwapRegion>& regions() const { return regions_; }
  const std::vector<Hexagon>& hexagons() const { return hexes_; }
  bool frozen(int v) const { return frozen_[v] != 0; }

  /// Regions containing both vertices.
  std::vector<int> common_regions(int u, int v) const {
    std::vector<int> out;
    for (int r : vertex_regions_[u])
      if (std::binary_search(vertex_regions_[v].begin(), vertex_regions_[v].end(), r)) out.push_back(r);
    return out;
  }

  /// Program exchanging the discs on u and v inside one region.
  SwapProgram region_program(int region, int u, int v) const {
    const SwapRegion& R = regions_[region];
    const int i = index_in(R, u), j = index_in(R, v);
    SwapProgram p;
    for (int gen : detail::cached_word(R.b_index, i, j)) {
      RingRotation rot;
      rot.ring = gen < 2 ? R.ring_a : R.ring_b;
      rot.dir = (gen % 2 == 0) ? 1 : -1;
      p.steps.push_back(rot);
    }
    p.footprint.assign(R.verts.begin(), R.verts.end());
    std::sort(p.footprint.begin(), p.footprint.end());
    return p;
  }

  /// Program exchanging the discs on u and v; falls back to conjugating
  /// region swaps along a shortest path that avoids frozen vertices.
  const SwapProgram& program(int u, int v) {
    if (u > v) std::swap(u, v);
    const auto key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
    auto it = programs_.find(key);
    if (it != programs_.end()) return it->second;
    if (frozen(u) || frozen(v)) throw Error(ErrorKind::internal, "swap requested on a frozen vertex");
    SwapProgram p;
    const auto common = common_regions(u, v);
    if (!common.empty()) {
      p = region_program(common.front(), u, v);
    } else {
      const auto path = free_path(u, v);
      std::vector<std::pair<int, int>> seq;
      for (std::size_t k = 0; k + 1 < path.size(); ++k) seq.emplace_back(path[k], path[k + 1]);
      for (std::size_t k = path.size() - 2; k-- > 0;) seq.emplace_back(path[k], path[k + 1]);
      std::vector<int> fp;
      for (auto [a, b] : seq) {
        const auto& sub = program(a, b);
        p.steps.insert(p.steps.end(), sub.steps.begin(), sub.steps.end());
        fp.insert(fp.end(), sub.footprint.begin(), sub.footprint.end());
      }
      std::sort(fp.begin(), fp.end());
      fp.erase(std::unique(fp.begin(), fp.end()), fp.end());
      p.footprint = std::move(fp);
    }
    return programs_.emplace(key, std::move(p)).first->second;
  }

  /// Longest program length handed out so far.
  int max_program_length() const {
    int best = 0;
    for (const auto& [k, p] : programs_) best = std::max(best, static_cast<int>(p.steps.size()));
    return best;
  }

 private:
  static int index_in(const SwapRegion& R, int v) {
    for (int i = 0; i < 10; ++i)
      if (R.verts[i] == v) return i;
    throw Error(ErrorKind::internal, "vertex not in swap region");
  }

  void add_region(int ha, int hb) {
    const auto& A = hexes_[ha].ring;
    const auto& B = hexes_[hb].ring;
    std::vector<int> shared;
    for (int a : A)
      if (std::find(B.begin(), B.end(), a) != B.end()) shared.push_back(a);
    if (shared.size() != 2) return;
    auto is_shared = [&](int v) { return v == shared[0] || v == shared[1]; };
    auto canonical = [&](const std::array<int, 6>& ring) {
      // Start at the shared vertex whose forward gap to the other is shorter.
      for (int gap = 1; gap <= 3; ++gap)
        for (int s = 0; s < 6; ++s)
          if (is_shared(ring[s]) && is_shared(ring[(s + gap) % 6])) {
            std::array<int, 6> out;
            for (int k = 0; k < 6; ++k) out[k] = ring[(s + k) % 6];
            return out;
          }
      throw Error(ErrorKind::internal, "shared vertices missing from hexagon ring");
    };
    SwapRegion R;
    R.hex_a = ha;
    R.hex_b = hb;
    R.ring_a = canonical(A);
    R.ring_b = canonical(B);
    int n = 0;
    for (int v : R.ring_a) R.verts[n++] = v;
    for (int v : R.ring_b)
      if (!is_shared(v)) R.verts[n++] = v;
    for (int k = 0; k < 6; ++k) R.b_index[k] = index_in(R, R.ring_b[k]);
    const int id = static_cast<int>(regions_.size());
    regions_.push_back(R);
    for (int v : R.verts) vertex_regions_[v].push_back(id);
  }

  std::vector<int> free_path(int u, int v) const {
    std::vector<int> parent(g_.size(), -1);
    std::vector<int> queue{u};
    parent[u] = u;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int x = queue[h];
      if (x == v) break;
      for (int y : g_.adjacency[x])
        if (parent[y] < 0 && !frozen(y)) {
          parent[y] = x;
          queue.push_back(y);
        }
    }
    if (parent[v] < 0) throw Error(ErrorKind::internal, "no frozen-free path for swap");
    std::vector<int> path{v};
    while (path.back() != u) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
  }

  const TriGrid& g_;
  std::vector<Hexagon> hexes_;
  std::vector<SwapRegion> regions_;
  std::vector<std::vector<int>> vertex_regions_;
  std::vector<char> frozen_;
  std::unordered_map<std::uint64_t, SwapProgram> programs_;
};

/// Applies one ring rotation to an occupancy array (disc id per vertex).
inline void apply_rotation(std::vector<int>& occ, const RingRotation& rot) {
  std::array<int, 6> held;
  for (int i = 0; i < 6; ++i) held[i] = occ[rot.ring[i]];
  for (int i = 0; i < 6; ++i) occ[rot.ring[((i + rot.dir) % 6 + 6) % 6]] = held[i];
}

/// Schedule exchanging the discs on a and b using the region of hexagons A and B.
inline SwapSchedule find_swap_schedule(const TriGrid& g, const Hexagon& A, const Hexagon& B, int a, int b) {
  SwapEngine engine(g);
  int region = -1;
  for (std::size_t r = 0; r < engine.regions().size(); ++r) {
    const auto& R = engine.regions()[r];
    const auto& ha = engine.hexagons()[R.hex_a];
    const auto& hb = engine.hexagons()[R.hex_b];
    if ((ha.center_id == A.center_id && hb.center_id == B.center_id) ||
        (ha.center_id == B.center_id && hb.center_id == A.center_id))
      region = static_cast<int>(r);
  }
  if (region < 0) throw Error(ErrorKind::bounds, "hexagons do not share exactly two vertices");
  const auto& R = engine.regions()[region];
  SwapSchedule s;
  s.region.assign(R.verts.begin(), R.verts.end());
  std::vector<int> occ(g.size(), -1);
  for (int i = 0; i < 10; ++i) occ[R.verts[i]] = i;
  if (a != b) {
    for (const auto& rot : engine.region_program(region, a, b).steps) {
      std::vector<std::pair<int, int>> moves;
      for (int i = 0; i < 6; ++i) moves.emplace_back(rot.ring[i], rot.ring[((i + rot.dir) % 6 + 6) % 6]);
      s.steps.push_back(std::move(moves));
      apply_rotation(occ, rot);
    }
  }
  s.net_permutation.assign(10, -1);
  for (int v : R.verts)
    if (occ[v] >= 0) s.net_permutation[occ[v]] = v;
  return s;
}

}  // namespace oldr
