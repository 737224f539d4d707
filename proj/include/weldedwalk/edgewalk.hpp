#pragma once

// Full-space coined-walk simulator on a concrete welded tree, restricted to
// the span of genuine directed edges (the walk started from the entrance
// never leaves it). Slots are (vertex, port) with ports running over the
// non-bottom adjacency entries in row order; one step is the per-vertex
// Grover coin followed by the flip-flop shift.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "weldedwalk/graph.hpp"
#include "weldedwalk/reduced.hpp"

namespace weldedwalk {

struct EdgeState {
  std::vector<double> amp;  // indexed by slot
};

struct ReducedCoefficients {
  std::vector<double> coeff;  // length 4n+2
  double residual = 0.0;      // norm of the component outside the subspace
};

class EdgeWalker {
 public:
  explicit EdgeWalker(const WeldedTree& tree, std::uint32_t oracle_calls_per_step = 4)
      : tree_(&tree), cost_per_step_(oracle_calls_per_step) {
    const std::size_t nv = tree.vertex_count();
    offset_.resize(nv + 1);
    offset_[0] = 0;
    for (VertexId u = 0; u < nv; ++u) offset_[u + 1] = offset_[u] + tree.degree(u);
    head_.resize(offset_[nv]);
    port_of_slot_.assign(offset_[nv], 0);
    std::vector<std::array<std::uint32_t, 3>> slot_to_port(nv, {0, 0, 0});
    for (VertexId u = 0; u < nv; ++u) {
      std::uint32_t port = 0;
      for (std::uint32_t s = 0; s < 3; ++s) {
        const VertexName g = tree.row(u)[s];
        if (g == tree.bottom()) continue;
        slot_to_port[u][s] = port;
        head_[offset_[u] + port] = tree.id_of(g);
        port_of_slot_[offset_[u] + port] = s;
        ++port;
      }
    }
    reverse_.resize(offset_[nv]);
    for (VertexId u = 0; u < nv; ++u) {
      for (std::uint32_t p = 0; p < tree.degree(u); ++p) {
        const VertexId v = head_[offset_[u] + p];
        std::uint32_t back = 0;
        for (std::uint32_t s = 0; s < 3; ++s) {
          if (tree.row(v)[s] == tree.name_of(u)) back = slot_to_port[v][s];
        }
        reverse_[offset_[u] + p] = offset_[v] + back;
      }
    }
  }

  const WeldedTree& tree() const { return *tree_; }
  std::size_t slot_count() const { return head_.size(); }
  std::size_t slot(VertexId u, std::uint32_t port) const { return offset_[u] + port; }
  std::size_t reverse_slot(std::size_t s) const { return reverse_[s]; }
  std::uint32_t oracle_calls_per_step() const { return cost_per_step_; }

  // slot of the directed edge leaving u towards the nearer root
  std::size_t parent_slot(VertexId u) const {
    const std::uint32_t root_slot = tree_->parent_port(u);
    std::uint32_t port = 0;
    for (std::uint32_t s = 0; s < root_slot; ++s) {
      if (tree_->row(u)[s] != tree_->bottom()) ++port;
    }
    return offset_[u] + port;
  }

  EdgeState initial_state(QueryLedger& ledger) const {
    ledger.quantum_oracle_calls += 2;  // state preparation from |s, bottom>
    EdgeState st;
    st.amp.assign(slot_count(), 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    st.amp[slot(tree_->entrance_id(), 0)] = r;
    st.amp[slot(tree_->entrance_id(), 1)] = r;
    return st;
  }

  // coin: Grover diffusion over each vertex's genuine ports (a swap at the
  // two roots); shift: exchange every directed edge with its reverse
  template <class T>
  void coin(std::vector<T>& amp) const {
    const std::size_t nv = tree_->vertex_count();
    for (VertexId u = 0; u < nv; ++u) {
      const std::size_t base = offset_[u];
      if (tree_->degree(u) == 2) {
        std::swap(amp[base], amp[base + 1]);
      } else {
        const T s = (amp[base] + amp[base + 1] + amp[base + 2]) * (2.0 / 3.0);
        amp[base] = s - amp[base];
        amp[base + 1] = s - amp[base + 1];
        amp[base + 2] = s - amp[base + 2];
      }
    }
  }

  template <class T>
  void shift(std::vector<T>& amp) const {
    for (std::size_t s = 0; s < reverse_.size(); ++s) {
      const std::size_t r = reverse_[s];
      if (s < r) std::swap(amp[s], amp[r]);
    }
  }

  template <class T>
  void step_amplitudes(std::vector<T>& amp) const {
    coin(amp);
    shift(amp);
  }

  template <class T>
  void step_amplitudes_inverse(std::vector<T>& amp) const {
    shift(amp);
    coin(amp);
  }

  void walk_step(EdgeState& st, QueryLedger& ledger) const {
    if (st.amp.size() != slot_count()) throw std::invalid_argument("walk_step: bad state");
    step_amplitudes(st.amp);
    ledger.quantum_oracle_calls += cost_per_step_;
  }

  double vertex_probability(const EdgeState& st, VertexName u) const {
    const VertexId id = tree_->id_of(u);
    if (id == kNoVertex) return 0.0;
    double p = 0.0;
    for (std::uint32_t port = 0; port < tree_->degree(id); ++port) {
      const double a = st.amp[slot(id, port)];
      p += a * a;
    }
    return p;
  }

  // inner products with the invariant-subspace basis; the basis is layer
  // uniform, so coefficients only need each vertex's root-facing slot
  ReducedCoefficients project_reduced(const EdgeState& st) const {
    const std::uint32_t n = tree_->n();
    ReducedCoefficients rc;
    rc.coeff.assign(4 * static_cast<std::size_t>(n) + 2, 0.0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    rc.coeff[0] = (st.amp[slot(tree_->entrance_id(), 0)] +
                   st.amp[slot(tree_->entrance_id(), 1)]) * inv_sqrt2;
    rc.coeff[4 * n + 1] = (st.amp[slot(tree_->exit_id(), 0)] +
                           st.amp[slot(tree_->exit_id(), 1)]) * inv_sqrt2;
    const std::size_t nv = tree_->vertex_count();
    std::vector<double> parent_sum(2 * n + 2, 0.0);
    std::vector<double> child_sum(2 * n + 2, 0.0);
    for (VertexId u = 0; u < nv; ++u) {
      const std::uint32_t layer = tree_->layer_of(u);
      if (layer == 0 || layer == 2 * n + 1) continue;
      const std::size_t ps = parent_slot(u);
      parent_sum[layer] += st.amp[ps];
      for (std::uint32_t port = 0; port < 3; ++port) {
        const std::size_t s = slot(u, port);
        if (s != ps) child_sum[layer] += st.amp[s];
      }
    }
    for (std::uint32_t layer = 1; layer <= 2 * n; ++layer) {
      const std::uint32_t depth = layer <= n ? layer : 2 * n + 1 - layer;
      const double vcount = std::ldexp(1.0, static_cast<int>(depth));
      const double pnorm = 1.0 / std::sqrt(vcount);
      const double cnorm = 1.0 / std::sqrt(2.0 * vcount);
      if (layer <= n) {
        rc.coeff[2 * layer - 1] = parent_sum[layer] * pnorm;  // |k,L>
        rc.coeff[2 * layer] = child_sum[layer] * cnorm;       // |k,R>
      } else {
        rc.coeff[2 * layer - 1] = child_sum[layer] * cnorm;   // |k,L>
        rc.coeff[2 * layer] = parent_sum[layer] * pnorm;      // |k,R>
      }
    }

    // residual computed slot-by-slot against the reconstructed projection;
    // a norm-difference shortcut would drown in cancellation noise
    double res2 = 0.0;
    const double inv2 = 1.0 / std::sqrt(2.0);
    for (VertexId u = 0; u < nv; ++u) {
      const std::uint32_t layer = tree_->layer_of(u);
      if (layer == 0 || layer == 2 * n + 1) {
        const std::size_t base = slot(u, 0);
        const double c = layer == 0 ? rc.coeff[0] : rc.coeff[4 * n + 1];
        for (std::uint32_t port = 0; port < 2; ++port) {
          const double d = st.amp[base + port] - c * inv2;
          res2 += d * d;
        }
        continue;
      }
      const std::uint32_t depth = layer <= n ? layer : 2 * n + 1 - layer;
      const double vcount = std::ldexp(1.0, static_cast<int>(depth));
      const double pw = 1.0 / std::sqrt(vcount);
      const double cw = 1.0 / std::sqrt(2.0 * vcount);
      const double pc = layer <= n ? rc.coeff[2 * layer - 1] : rc.coeff[2 * layer];
      const double cc = layer <= n ? rc.coeff[2 * layer] : rc.coeff[2 * layer - 1];
      const std::size_t ps = parent_slot(u);
      for (std::uint32_t port = 0; port < 3; ++port) {
        const std::size_t s = slot(u, port);
        const double want = s == ps ? pc * pw : cc * cw;
        const double d = st.amp[s] - want;
        res2 += d * d;
      }
    }
    rc.residual = std::sqrt(res2);
    return rc;
  }

 private:
  const WeldedTree* tree_;
  std::uint32_t cost_per_step_;
  std::vector<std::size_t> offset_;
  std::vector<VertexId> head_;
  std::vector<std::size_t> reverse_;
  std::vector<std::uint8_t> port_of_slot_;

 public:
  std::uint32_t row_slot_of(std::size_t s) const { return port_of_slot_[s]; }
  VertexId head_of(std::size_t s) const { return head_[s]; }
  VertexId tail_of(std::size_t s) const {
    // binary search over offsets
    std::size_t lo = 0, hi = offset_.size() - 1;
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (offset_[mid] <= s) lo = mid;
      else hi = mid;
    }
    return static_cast<VertexId>(lo);
  }
};

}  // namespace weldedwalk
