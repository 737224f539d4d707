#pragma once

// Seeded welded-tree instances and their classical adjacency oracle. A welded
// tree of height n joins two full binary trees leaf-to-leaf with a random
// cycle that alternates sides. Vertices carry random distinct 2n-bit names;
// the entrance is fixed at 0...0 and 1...1 is the non-vertex symbol. The only
// query-counted access to the structure is oracle_query / is_exit.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace weldedwalk {

using VertexName = std::uint64_t;
using VertexId = std::uint32_t;

inline constexpr VertexId kNoVertex = 0xffffffffu;
inline constexpr const char* kRngId = "mt19937_64-v1";

struct QueryLedger {
  std::uint64_t classical_queries = 0;
  std::uint64_t quantum_oracle_calls = 0;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TimeoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace rngdetail {

// Bounded draws and shuffles are written out by hand so that instances are
// bit-identical across standard libraries (std::uniform_int_distribution is
// not portable).
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t mask = bound <= 1 ? 0 : ~std::uint64_t{0} >> std::countl_zero(bound - 1);
  for (;;) {
    const std::uint64_t x = rng() & mask;
    if (x < bound) return x;
  }
}

template <class T>
inline void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_below(rng, i)]);
  }
}

}  // namespace rngdetail

class WeldedTree {
 public:
  static WeldedTree generate(std::uint32_t n, std::uint64_t seed);
  static WeldedTree load(std::istream& in);
  static WeldedTree load(const std::string& path);

  void save(std::ostream& out) const;
  void save(const std::string& path) const;

  std::uint32_t n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& rng_algorithm() const { return rng_id_; }
  std::size_t vertex_count() const { return names_.size(); }
  VertexName bottom() const { return (VertexName{1} << (2 * n_)) - 1; }
  VertexName entrance_name() const { return 0; }
  VertexName exit_name() const { return names_[exit_id()]; }
  VertexId entrance_id() const { return 0; }
  VertexId exit_id() const { return (VertexId{1} << (n_ + 1)) - 1; }

  // --- query-counted oracle surface ---
  std::array<VertexName, 3> oracle_query(QueryLedger& ledger, VertexName u) const {
    ledger.classical_queries += 1;
    const auto it = name_to_id_.find(u);
    if (it == name_to_id_.end()) return {bottom(), bottom(), bottom()};
    return adj_names_[it->second];
  }

  bool is_exit(QueryLedger& ledger, VertexName u) const {
    const auto row = oracle_query(ledger, u);
    int bottoms = 0;
    for (const auto v : row) bottoms += (v == bottom());
    return bottoms == 1 && u != entrance_name();
  }

  // --- structural access for simulators (not query-counted) ---
  VertexName name_of(VertexId id) const { return names_[id]; }
  VertexId id_of(VertexName u) const {
    const auto it = name_to_id_.find(u);
    return it == name_to_id_.end() ? kNoVertex : it->second;
  }
  std::uint32_t layer_of(VertexId id) const { return layer_[id]; }
  const std::array<VertexName, 3>& row(VertexId id) const { return adj_names_[id]; }
  std::uint32_t parent_port(VertexId id) const { return parent_port_[id]; }
  std::uint32_t degree(VertexId id) const {
    return (id == entrance_id() || id == exit_id()) ? 2 : 3;
  }

  bool operator==(const WeldedTree& o) const {
    return n_ == o.n_ && seed_ == o.seed_ && rng_id_ == o.rng_id_ && names_ == o.names_ &&
           layer_ == o.layer_ && adj_names_ == o.adj_names_ && parent_port_ == o.parent_port_;
  }

  void validate() const;

 private:
  WeldedTree() = default;
  void index_names();

  std::uint32_t n_ = 0;
  std::uint64_t seed_ = 0;
  std::string rng_id_ = kRngId;
  std::vector<VertexName> names_;                  // id -> name
  std::vector<std::uint32_t> layer_;               // id -> layer 0..2n+1
  std::vector<std::array<VertexName, 3>> adj_names_;
  std::vector<std::uint8_t> parent_port_;          // slot towards the nearer root
  std::unordered_map<VertexName, VertexId> name_to_id_;
};

// Internal ids are layer-ordered. The left tree is heap-numbered from the
// entrance (layer k occupies ids 2^k-1 .. 2^{k+1}-2); the right tree is
// heap-numbered from the exit with ids offset by 2^{n+1}-1, its depth-d layer
// sitting at graph layer 2n+1-d.
inline WeldedTree WeldedTree::generate(std::uint32_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("WeldedTree::generate: n must be >= 1");
  if (n > 28) throw CapacityError("WeldedTree::generate: n too large to materialise");
  const std::uint64_t half = (std::uint64_t{1} << (n + 1)) - 1;
  const std::uint64_t total = 2 * half;
  const std::uint64_t name_space = std::uint64_t{1} << (2 * n);
  if (total > name_space - 2) {
    throw CapacityError("WeldedTree::generate: 2n-bit names cannot cover " +
                        std::to_string(total) + " vertices at n=" + std::to_string(n));
  }

  WeldedTree t;
  t.n_ = n;
  t.seed_ = seed;
  std::mt19937_64 rng(seed);

  // distinct random names; entrance fixed at 0, all-ones reserved
  t.names_.assign(total, 0);
  std::unordered_set<VertexName> used;
  used.insert(0);
  used.insert(name_space - 1);
  for (std::uint64_t id = 1; id < total; ++id) {
    VertexName u;
    do {
      u = rngdetail::uniform_below(rng, name_space);
    } while (used.count(u));
    used.insert(u);
    t.names_[id] = u;
  }

  // layers and id-space adjacency in canonical slot order (parent first)
  const VertexId L = static_cast<VertexId>(half);
  auto left_id = [](std::uint32_t k, std::uint64_t i) {
    return static_cast<VertexId>((std::uint64_t{1} << k) - 1 + i);
  };
  auto right_id = [L](std::uint32_t d, std::uint64_t i) {
    return static_cast<VertexId>(L + (std::uint64_t{1} << d) - 1 + i);
  };
  t.layer_.assign(total, 0);
  std::vector<std::array<VertexId, 3>> adj(total, {kNoVertex, kNoVertex, kNoVertex});
  for (std::uint32_t k = 0; k <= n; ++k) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << k); ++i) {
      const VertexId u = left_id(k, i);
      t.layer_[u] = k;
      adj[u][0] = k == 0 ? kNoVertex : left_id(k - 1, i >> 1);
      if (k < n) {
        adj[u][1] = left_id(k + 1, 2 * i);
        adj[u][2] = left_id(k + 1, 2 * i + 1);
      }
    }
  }
  for (std::uint32_t d = 0; d <= n; ++d) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << d); ++i) {
      const VertexId u = right_id(d, i);
      t.layer_[u] = 2 * n + 1 - d;
      adj[u][0] = d == 0 ? kNoVertex : right_id(d - 1, i >> 1);
      if (d < n) {
        adj[u][1] = right_id(d + 1, 2 * i);
        adj[u][2] = right_id(d + 1, 2 * i + 1);
      }
    }
  }

  // random alternating cycle: independent uniform permutations of the two
  // leaf layers, connected L[j] - R[j] - L[j+1] - ... - R[m-1] - L[0]
  const std::uint64_t m = std::uint64_t{1} << n;
  std::vector<VertexId> sigma(m), tau(m);
  for (std::uint64_t i = 0; i < m; ++i) sigma[i] = left_id(n, i);
  for (std::uint64_t i = 0; i < m; ++i) tau[i] = right_id(n, i);
  rngdetail::shuffle(sigma, rng);
  rngdetail::shuffle(tau, rng);
  for (std::uint64_t j = 0; j < m; ++j) {
    const VertexId l0 = sigma[j], r0 = tau[j], l1 = sigma[(j + 1) % m];
    adj[r0][1] = l0;
    adj[r0][2] = l1;
    adj[l0][2] = r0;            // slot 1 filled by the predecessor edge
    adj[l1][1] = r0;
  }

  // randomly permute the three slots of every row; remember where the
  // root-facing slot went
  t.adj_names_.assign(total, {0, 0, 0});
  t.parent_port_.assign(total, 0);
  const VertexName bot = t.bottom();
  for (std::uint64_t id = 0; id < total; ++id) {
    std::array<std::uint32_t, 3> perm{0, 1, 2};
    std::vector<std::uint32_t> p(perm.begin(), perm.end());
    rngdetail::shuffle(p, rng);
    for (std::uint32_t s = 0; s < 3; ++s) {
      const VertexId nb = adj[id][p[s]];
      t.adj_names_[id][s] = nb == kNoVertex ? bot : t.names_[nb];
      if (p[s] == 0) t.parent_port_[id] = static_cast<std::uint8_t>(s);
    }
  }

  t.index_names();
  return t;
}

inline void WeldedTree::index_names() {
  name_to_id_.clear();
  name_to_id_.reserve(names_.size() * 2);
  for (VertexId id = 0; id < names_.size(); ++id) name_to_id_[names_[id]] = id;
}

namespace graphdetail {

inline std::string hex_name(VertexName v, std::uint32_t n) {
  const std::uint32_t w = (2 * n + 3) / 4;
  std::ostringstream os;
  os << std::hex << v;
  std::string s = os.str();
  return std::string(w > s.size() ? w - s.size() : 0, '0') + s;
}

}  // namespace graphdetail

inline void WeldedTree::save(std::ostream& out) const {
  out << "weldedtree v1 n=" << n_ << " seed=" << seed_ << " rng=" << rng_id_ << "\n";
  for (VertexId id = 0; id < names_.size(); ++id) {
    out << graphdetail::hex_name(names_[id], n_);
    for (const auto g : adj_names_[id]) out << ' ' << graphdetail::hex_name(g, n_);
    out << " layer=" << layer_[id] << "\n";
  }
}

inline void WeldedTree::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("save: cannot open " + tmp);
    save(out);
  }
  std::filesystem::rename(tmp, path);
}

inline WeldedTree WeldedTree::load(std::istream& in) {
  WeldedTree t;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: empty file");
  {
    std::istringstream hs(line);
    std::string magic, ver, nf, sf, rf;
    hs >> magic >> ver >> nf >> sf >> rf;
    if (magic != "weldedtree" || ver != "v1" || nf.rfind("n=", 0) != 0 ||
        sf.rfind("seed=", 0) != 0 || rf.rfind("rng=", 0) != 0) {
      throw ParseError("line 1: bad header");
    }
    try {
      t.n_ = static_cast<std::uint32_t>(std::stoul(nf.substr(2)));
      t.seed_ = std::stoull(sf.substr(5));
    } catch (const std::exception&) {
      throw ParseError("line 1: bad header numbers");
    }
    t.rng_id_ = rf.substr(4);
    if (t.n_ < 1 || t.n_ > 28) throw ParseError("line 1: n out of range");
  }
  const std::uint64_t total = 2 * ((std::uint64_t{1} << (t.n_ + 1)) - 1);
  const VertexName bot = (VertexName{1} << (2 * t.n_)) - 1;
  t.names_.reserve(total);
  t.adj_names_.reserve(total);
  t.layer_.reserve(total);
  std::uint64_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name, g1, g2, g3, lf;
    if (!(ls >> name >> g1 >> g2 >> g3 >> lf) || lf.rfind("layer=", 0) != 0) {
      throw ParseError("line " + std::to_string(lineno) + ": malformed vertex row");
    }
    auto parse_hex = [&](const std::string& s) -> VertexName {
      VertexName v = 0;
      if (s.empty() || s.size() > 16) {
        throw ParseError("line " + std::to_string(lineno) + ": bad name " + s);
      }
      for (const char c : s) {
        const int d = (c >= '0' && c <= '9')   ? c - '0'
                      : (c >= 'a' && c <= 'f') ? c - 'a' + 10
                      : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                               : -1;
        if (d < 0) throw ParseError("line " + std::to_string(lineno) + ": bad name " + s);
        v = (v << 4) | static_cast<VertexName>(d);
      }
      if (v > bot) throw ParseError("line " + std::to_string(lineno) + ": name exceeds 2n bits");
      return v;
    };
    t.names_.push_back(parse_hex(name));
    t.adj_names_.push_back({parse_hex(g1), parse_hex(g2), parse_hex(g3)});
    std::uint32_t layer = 0;
    try {
      layer = static_cast<std::uint32_t>(std::stoul(lf.substr(6)));
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(lineno) + ": bad layer");
    }
    if (layer > 2 * t.n_ + 1) throw ParseError("line " + std::to_string(lineno) + ": bad layer");
    t.layer_.push_back(layer);
    if (t.names_.size() > total) {
      throw ParseError("line " + std::to_string(lineno) + ": too many vertices");
    }
  }
  if (t.names_.size() != total) {
    throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(total) +
                     " vertices, got " + std::to_string(t.names_.size()));
  }

  // duplicates reported at the line of the second occurrence
  t.name_to_id_.reserve(total * 2);
  for (VertexId id = 0; id < t.names_.size(); ++id) {
    if (!t.name_to_id_.emplace(t.names_[id], id).second) {
      throw ParseError("line " + std::to_string(id + 2) + ": duplicate name " +
                       graphdetail::hex_name(t.names_[id], t.n_));
    }
  }

  // parent ports follow from layers: the unique neighbour one layer closer
  // to the nearer root; for the roots themselves, the non-vertex slot
  t.parent_port_.assign(total, 0);
  for (VertexId id = 0; id < t.names_.size(); ++id) {
    const std::uint32_t layer = t.layer_[id];
    int port = -1;
    for (std::uint32_t s = 0; s < 3; ++s) {
      const VertexName g = t.adj_names_[id][s];
      if (layer == 0 || layer == 2 * t.n_ + 1) {
        if (g == bot) port = static_cast<int>(s);
        continue;
      }
      const auto it = t.name_to_id_.find(g);
      if (it == t.name_to_id_.end()) continue;
      const std::uint32_t nl = t.layer_[it->second];
      const std::uint32_t toward = layer <= t.n_ ? layer - 1 : layer + 1;
      if (nl == toward) port = static_cast<int>(s);
    }
    if (port < 0) {
      throw ParseError("line " + std::to_string(id + 2) + ": no root-facing slot");
    }
    t.parent_port_[id] = static_cast<std::uint8_t>(port);
  }

  t.validate();
  return t;
}

inline WeldedTree WeldedTree::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load: cannot open " + path);
  return load(in);
}

inline void WeldedTree::validate() const {
  const std::uint64_t total = vertex_count();
  const VertexName bot = bottom();
  auto fail = [&](VertexId id, const std::string& what) {
    throw ParseError("line " + std::to_string(id + 2) + ": " + what);
  };
  if (names_[0] != 0 || layer_[0] != 0) fail(0, "entrance must be the all-zero name at layer 0");

  // rows must appear in the canonical layer-ordered id layout
  const std::uint64_t half = (std::uint64_t{1} << (n_ + 1)) - 1;
  for (VertexId id = 0; id < total; ++id) {
    const std::uint64_t h = id < half ? id : id - half;
    const auto depth = static_cast<std::uint32_t>(std::bit_width(h + 1) - 1);
    const std::uint32_t expect = id < half ? depth : 2 * n_ + 1 - depth;
    if (layer_[id] != expect) fail(id, "vertex out of layer order");
  }

  for (VertexId id = 0; id < total; ++id) {
    if (names_[id] == bot) fail(id, "vertex uses the reserved all-ones name");
    int bottoms = 0;
    for (std::uint32_t s = 0; s < 3; ++s) {
      const VertexName g = adj_names_[id][s];
      if (g == bot) {
        ++bottoms;
        continue;
      }
      const auto it = name_to_id_.find(g);
      if (it == name_to_id_.end()) fail(id, "neighbour is not a vertex");
      const VertexId v = it->second;
      if (v == id) fail(id, "self-loop");
      const std::uint32_t dl = layer_[id] > layer_[v] ? layer_[id] - layer_[v]
                                                      : layer_[v] - layer_[id];
      if (dl != 1) fail(id, "edge does not connect adjacent layers");
      bool back = false;
      for (const auto gg : adj_names_[v]) back = back || gg == names_[id];
      if (!back) fail(id, "asymmetric adjacency");
    }
    const bool is_root = layer_[id] == 0 || layer_[id] == 2 * n_ + 1;
    if (bottoms != (is_root ? 1 : 0)) fail(id, "wrong number of non-vertex slots");
  }

  // the middle edges must form a single cycle alternating between layers
  // n and n+1
  const std::uint64_t cycle_len = std::uint64_t{2} << n_;
  std::uint64_t steps = 0;
  VertexId start = kNoVertex;
  for (VertexId id = 0; id < total && start == kNoVertex; ++id) {
    if (layer_[id] == n_) start = id;
  }
  VertexId prev = start;
  VertexId cur = kNoVertex;
  for (std::uint32_t s = 0; s < 3; ++s) {
    if (s == parent_port_[start]) continue;
    cur = name_to_id_.at(adj_names_[start][s]);
    break;
  }
  ++steps;
  while (cur != start) {
    if (layer_[cur] != n_ && layer_[cur] != n_ + 1) fail(cur, "cycle leaves the middle layers");
    if (layer_[cur] == layer_[prev]) fail(cur, "cycle does not alternate sides");
    VertexId next = kNoVertex;
    for (std::uint32_t s = 0; s < 3; ++s) {
      if (s == parent_port_[cur]) continue;
      const VertexId cand = name_to_id_.at(adj_names_[cur][s]);
      if (cand != prev) next = cand;
    }
    if (next == kNoVertex) fail(cur, "broken middle cycle");
    prev = cur;
    cur = next;
    ++steps;
    if (steps > cycle_len) throw ParseError("line 1: middle cycle too long");
  }
  if (steps != cycle_len) throw ParseError("line 1: middle edges form more than one cycle");
}

struct BaselineResult {
  VertexName exit_name = 0;
  std::uint64_t distinct_queries = 0;
};

// Classical reference: a seeded uniform random walk from the entrance that
// queries each visited vertex once and stops at the exit.
inline BaselineResult classical_baseline(const WeldedTree& tree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  QueryLedger ledger;
  std::unordered_map<VertexName, std::array<VertexName, 3>> memo;
  const VertexName bot = tree.bottom();
  const std::uint64_t cap = 10ull * (std::uint64_t{1} << (2 * tree.n()));
  VertexName cur = tree.entrance_name();
  for (std::uint64_t steps = 0;; ++steps) {
    if (steps > cap) throw TimeoutError("classical_baseline: step cap exceeded");
    auto it = memo.find(cur);
    if (it == memo.end()) {
      it = memo.emplace(cur, tree.oracle_query(ledger, cur)).first;
    }
    const auto& row = it->second;
    int bottoms = 0;
    for (const auto v : row) bottoms += (v == bot);
    if (bottoms == 1 && cur != tree.entrance_name()) {
      return BaselineResult{cur, ledger.classical_queries};
    }
    std::array<VertexName, 3> genuine{};
    std::uint64_t d = 0;
    for (const auto v : row) {
      if (v != bot) genuine[d++] = v;
    }
    cur = genuine[rngdetail::uniform_below(rng, d)];
  }
}

}  // namespace weldedwalk
