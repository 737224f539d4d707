#pragma once

// Deterministic amplitude amplification (phase-matched Grover iteration) on
// top of the predetermined walk: A = U_walk^T1 U_p prepares a known overlap
// p_T1 with the target, and T2 generalized iterations
//   G(alpha, beta) = A S_0(beta) A^dag S_t(alpha)
// with alpha = -beta = 2 arcsin(sin(pi/(4 T2 + 2)) / sin(theta)) drive the
// target amplitude to modulus 1. The walk space is extended by one slot for
// the preparation source |s, bottom>; U_p is completed to a unitary as the
// transposition of that slot with the initial walk state.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "weldedwalk/edgewalk.hpp"
#include "weldedwalk/graph.hpp"
#include "weldedwalk/reduced.hpp"

namespace weldedwalk {

using Complex = std::complex<double>;

struct AmplifyPlan {
  std::uint32_t n = 0;
  Window window = Window::Conjecture;
  std::uint32_t T1 = 0;
  double p_T1 = 0.0;       // |<4n+1| M_U^T1 |0>|
  double signed_amp = 0.0; // the same amplitude with its sign
  double theta = 0.0;      // arcsin(p_T1)
  std::uint32_t T2 = 0;
  double alpha = 0.0;
  double beta = 0.0;
};

// theta, T2, alpha, beta from a known overlap p in (0, 1]. The phase-matched
// choice alpha = -beta makes the T2-th iterate land exactly on the target;
// the sign of the prepared amplitude never enters (the target phase gate is
// a projector, invariant under flipping the target's sign convention).
inline void set_plan_parameters(AmplifyPlan& plan, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("set_plan_parameters: overlap must be positive");
  plan.p_T1 = p;
  plan.theta = std::asin(std::min(1.0, p));
  if (p >= 1.0) {
    plan.T2 = 0;  // already certain, no iterations
    plan.alpha = 0.0;
    plan.beta = 0.0;
    return;
  }
  const double pi = std::numbers::pi;
  plan.T2 = static_cast<std::uint32_t>(std::ceil((pi / 2.0 - plan.theta) / (2.0 * plan.theta)));
  plan.alpha = 2.0 * std::asin(std::sin(pi / (4.0 * plan.T2 + 2.0)) / std::sin(plan.theta));
  plan.beta = -plan.alpha;
}

inline AmplifyPlan make_plan(std::uint32_t n, Window window) {
  const auto pre = predetermine_T(n, window);
  AmplifyPlan plan;
  plan.n = n;
  plan.window = window;
  plan.T1 = pre.T1;
  plan.signed_amp = pre.signed_amp;
  set_plan_parameters(plan, pre.p_T1);
  return plan;
}

// Oracle-call accounting: applications are counted and the total is priced
// under a chosen walk-step convention (2 queries per step from the operator
// identity, 4 from the two-query state preparation used twice inside the
// coin). U_p costs 2, S_t costs 2 (it checks the three neighbours), S_0 is
// free.
struct OpCounts {
  std::uint64_t u_p = 0;
  std::uint64_t walk_steps = 0;
  std::uint64_t s_t = 0;

  std::uint64_t oracle_calls(std::uint32_t per_step) const {
    return 2 * u_p + per_step * walk_steps + 2 * s_t;
  }
};

struct AmplifyResult {
  double final_target_prob = 0.0;
  OpCounts counts;
};

// --- reduced mode: walk space of dimension 4n+2 plus the source slot ---

class ReducedAmplifier {
 public:
  ReducedAmplifier(const AmplifyPlan& plan) : plan_(plan), model_(build_reduced(plan.n)) {}

  std::size_t dim() const { return model_.dim() + 1; }
  std::size_t source_index() const { return model_.dim(); }
  std::size_t target_index() const { return model_.target_index(); }
  const OpCounts& counts() const { return counts_; }
  const ReducedModel& model() const { return model_; }

  std::vector<Complex> source_state() const {
    std::vector<Complex> v(dim(), Complex{0.0, 0.0});
    v[source_index()] = 1.0;
    return v;
  }

  void apply_Up(std::vector<Complex>& v) {
    std::swap(v[0], v[source_index()]);
    counts_.u_p += 1;
  }

  // the walk acts on the first 4n+2 entries and never touches the source slot
  void apply_A(std::vector<Complex>& v) {
    apply_Up(v);
    for (std::uint32_t i = 0; i < plan_.T1; ++i) apply_walk_step(v, model_.n);
    counts_.walk_steps += plan_.T1;
  }

  void apply_A_dagger(std::vector<Complex>& v) {
    for (std::uint32_t i = 0; i < plan_.T1; ++i) apply_walk_step_inverse(v, model_.n);
    counts_.walk_steps += plan_.T1;
    apply_Up(v);
  }

  void apply_St(std::vector<Complex>& v, double alpha) {
    v[target_index()] *= std::polar(1.0, alpha);
    counts_.s_t += 1;
  }

  void apply_S0(std::vector<Complex>& v, double beta) {
    v[source_index()] *= std::polar(1.0, -beta);
  }

  void grover_iterate(std::vector<Complex>& v) {
    apply_St(v, plan_.alpha);
    apply_A_dagger(v);
    apply_S0(v, plan_.beta);
    apply_A(v);
  }

  AmplifyResult run() {
    auto v = source_state();
    apply_A(v);
    for (std::uint32_t i = 0; i < plan_.T2; ++i) grover_iterate(v);
    AmplifyResult r;
    r.final_target_prob = std::norm(v[target_index()]);
    r.counts = counts_;
    return r;
  }

 private:
  AmplifyPlan plan_;
  ReducedModel model_;
  OpCounts counts_;
};

// --- instance mode: concrete tree, complex edge amplitudes plus the source ---

struct ExtendedEdgeState {
  std::vector<Complex> amp;
  Complex source{0.0, 0.0};
};

class EdgeAmplifier {
 public:
  EdgeAmplifier(const EdgeWalker& walker, const AmplifyPlan& plan)
      : walker_(&walker), plan_(plan) {
    if (walker.tree().n() != plan.n) throw std::invalid_argument("EdgeAmplifier: n mismatch");
  }

  const OpCounts& counts() const { return counts_; }

  ExtendedEdgeState source_state() const {
    ExtendedEdgeState st;
    st.amp.assign(walker_->slot_count(), Complex{0.0, 0.0});
    st.source = 1.0;
    return st;
  }

  // transposition of the source slot with the initial walk state
  // (1/sqrt2 on the two entrance slots)
  void apply_Up(ExtendedEdgeState& st) {
    const auto& t = walker_->tree();
    const double r = 1.0 / std::sqrt(2.0);
    const std::size_t s0 = walker_->slot(t.entrance_id(), 0);
    const std::size_t s1 = walker_->slot(t.entrance_id(), 1);
    const Complex overlap = (st.amp[s0] + st.amp[s1]) * r;
    const Complex delta = st.source - overlap;
    st.amp[s0] += delta * r;
    st.amp[s1] += delta * r;
    st.source = overlap;
    counts_.u_p += 1;
  }

  void apply_A(ExtendedEdgeState& st) {
    apply_Up(st);
    for (std::uint32_t i = 0; i < plan_.T1; ++i) walker_->step_amplitudes(st.amp);
    counts_.walk_steps += plan_.T1;
  }

  void apply_A_dagger(ExtendedEdgeState& st) {
    for (std::uint32_t i = 0; i < plan_.T1; ++i) walker_->step_amplitudes_inverse(st.amp);
    counts_.walk_steps += plan_.T1;
    apply_Up(st);
  }

  void apply_St(ExtendedEdgeState& st, double alpha) {
    const auto& t = walker_->tree();
    const Complex phase = std::polar(1.0, alpha);
    for (std::uint32_t port = 0; port < 2; ++port) {
      st.amp[walker_->slot(t.exit_id(), port)] *= phase;
    }
    counts_.s_t += 1;
  }

  void apply_S0(ExtendedEdgeState& st, double beta) { st.source *= std::polar(1.0, -beta); }

  void grover_iterate(ExtendedEdgeState& st) {
    apply_St(st, plan_.alpha);
    apply_A_dagger(st);
    apply_S0(st, plan_.beta);
    apply_A(st);
  }

  ExtendedEdgeState evolve() {
    auto st = source_state();
    apply_A(st);
    for (std::uint32_t i = 0; i < plan_.T2; ++i) grover_iterate(st);
    return st;
  }

  double exit_probability(const ExtendedEdgeState& st) const {
    const auto& t = walker_->tree();
    double p = 0.0;
    for (std::uint32_t port = 0; port < 2; ++port) {
      p += std::norm(st.amp[walker_->slot(t.exit_id(), port)]);
    }
    return p;
  }

  // measure the vertex register: per-vertex probability, the source slot
  // counting towards the entrance
  VertexName sample_vertex(const ExtendedEdgeState& st, std::uint64_t sample_seed) const {
    const auto& t = walker_->tree();
    std::mt19937_64 rng(sample_seed);
    // draw u uniform in [0,1) from 53 random bits
    const double u = std::ldexp(static_cast<double>(rng() >> 11), -53);
    double acc = 0.0;
    for (VertexId id = 0; id < t.vertex_count(); ++id) {
      double p = 0.0;
      for (std::uint32_t port = 0; port < t.degree(id); ++port) {
        p += std::norm(st.amp[walker_->slot(id, port)]);
      }
      if (id == t.entrance_id()) p += std::norm(st.source);
      acc += p;
      if (u < acc) return t.name_of(id);
    }
    return t.name_of(t.vertex_count() - 1);
  }

 private:
  const EdgeWalker* walker_;
  AmplifyPlan plan_;
  OpCounts counts_;
};

struct DeterministicRunReport {
  AmplifyPlan plan;
  double final_prob = 0.0;
  std::uint64_t oracle_calls_conv2 = 0;
  std::uint64_t oracle_calls_conv4 = 0;
};

inline DeterministicRunReport run_deterministic_reduced(std::uint32_t n, Window window) {
  DeterministicRunReport rep;
  rep.plan = make_plan(n, window);
  ReducedAmplifier amp(rep.plan);
  const auto res = amp.run();
  rep.final_prob = res.final_target_prob;
  rep.oracle_calls_conv2 = res.counts.oracle_calls(2);
  rep.oracle_calls_conv4 = res.counts.oracle_calls(4);
  return rep;
}

struct InstanceRunReport {
  DeterministicRunReport base;
  VertexName exit_found = 0;
  std::uint32_t hits = 0;    // samples that returned the true exit
  std::uint32_t samples = 0;
};

inline InstanceRunReport run_deterministic_instance(const WeldedTree& tree, Window window,
                                                    std::uint32_t samples,
                                                    std::uint64_t sample_seed) {
  InstanceRunReport rep;
  rep.base.plan = make_plan(tree.n(), window);
  const EdgeWalker walker(tree);
  EdgeAmplifier amp(walker, rep.base.plan);
  const auto st = amp.evolve();
  rep.base.final_prob = amp.exit_probability(st);
  rep.base.oracle_calls_conv2 = amp.counts().oracle_calls(2);
  rep.base.oracle_calls_conv4 = amp.counts().oracle_calls(4);
  rep.samples = samples;
  for (std::uint32_t i = 0; i < samples; ++i) {
    const VertexName got = amp.sample_vertex(st, sample_seed + i);
    if (got == tree.exit_name()) rep.hits += 1;
    rep.exit_found = got;
  }
  return rep;
}

}  // namespace weldedwalk
