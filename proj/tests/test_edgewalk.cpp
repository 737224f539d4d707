#include "weldedwalk/edgewalk.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace weldedwalk;

namespace {

double state_norm2(const EdgeState& st) {
  double s = 0.0;
  for (const double a : st.amp) s += a * a;
  return s;
}

}  // namespace

TEST(EdgeWalker, SlotLayoutAndReverseInvolution) {
  const auto t = WeldedTree::generate(3, 21);
  const EdgeWalker w(t);
  EXPECT_EQ(w.slot_count(), 6u * 16u - 8u);  // 6*2^{n+1} - 8
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    const std::size_t r = w.reverse_slot(s);
    EXPECT_EQ(w.reverse_slot(r), s);
    EXPECT_EQ(w.head_of(s), w.tail_of(r));
    EXPECT_EQ(w.tail_of(s), w.head_of(r));
  }
}

TEST(EdgeWalker, InitialState) {
  const auto t = WeldedTree::generate(2, 4);
  const EdgeWalker w(t);
  QueryLedger ledger;
  const auto st = w.initial_state(ledger);
  EXPECT_EQ(ledger.quantum_oracle_calls, 2u);
  int nonzero = 0;
  for (const double a : st.amp) {
    if (a != 0.0) {
      ++nonzero;
      EXPECT_NEAR(a, 1.0 / std::sqrt(2.0), 1e-15);
    }
  }
  EXPECT_EQ(nonzero, 2);
  EXPECT_NEAR(state_norm2(st), 1.0, 1e-15);
  EXPECT_NEAR(w.vertex_probability(st, t.entrance_name()), 1.0, 1e-15);

  const auto rc = w.project_reduced(st);
  EXPECT_NEAR(rc.coeff[0], 1.0, 1e-15);
  EXPECT_LT(rc.residual, 1e-12);
  for (std::size_t k = 1; k < rc.coeff.size(); ++k) EXPECT_EQ(rc.coeff[k], 0.0);
}

TEST(EdgeWalker, DoubleShiftIsIdentity) {
  const auto t = WeldedTree::generate(2, 4);
  const EdgeWalker w(t);
  QueryLedger ledger;
  auto st = w.initial_state(ledger);
  w.walk_step(st, ledger);
  const auto before = st.amp;
  w.shift(st.amp);
  w.shift(st.amp);
  EXPECT_EQ(st.amp, before);
}

TEST(EdgeWalker, CoinPreservesBlockNorms) {
  const auto t = WeldedTree::generate(3, 10);
  const EdgeWalker w(t);
  std::vector<double> amp(w.slot_count());
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss;
  for (auto& a : amp) a = gauss(rng);
  auto block_norms = [&]() {
    std::vector<double> out;
    for (VertexId u = 0; u < t.vertex_count(); ++u) {
      double s = 0.0;
      for (std::uint32_t p = 0; p < t.degree(u); ++p) s += amp[w.slot(u, p)] * amp[w.slot(u, p)];
      out.push_back(s);
    }
    return out;
  };
  const auto before = block_norms();
  w.coin(amp);
  const auto after = block_norms();
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(after[i], before[i], 1e-12);
}

TEST(EdgeWalker, OneStepLiftsReducedBasis) {
  const auto t = WeldedTree::generate(2, 8);
  const EdgeWalker w(t);
  QueryLedger ledger;
  auto st = w.initial_state(ledger);
  w.walk_step(st, ledger);
  const auto rc = w.project_reduced(st);
  EXPECT_LT(rc.residual, 1e-12);
  EXPECT_NEAR(rc.coeff[1], 1.0, 1e-12);  // M_U e0 = e1
  for (std::size_t k = 0; k < rc.coeff.size(); ++k) {
    if (k != 1) {
      EXPECT_NEAR(rc.coeff[k], 0.0, 1e-12);
    }
  }
  EXPECT_EQ(ledger.quantum_oracle_calls, 2u + 4u);
}

TEST(EdgeWalker, CostConventionConfigurable) {
  const auto t = WeldedTree::generate(2, 8);
  const EdgeWalker w2(t, 2);
  QueryLedger ledger;
  auto st = w2.initial_state(ledger);
  w2.walk_step(st, ledger);
  w2.walk_step(st, ledger);
  EXPECT_EQ(ledger.quantum_oracle_calls, 2u + 2u * 2u);
}

TEST(EdgeWalker, MatchesReducedModelAcrossSeeds) {
  for (std::uint32_t n : {2u, 3u, 4u, 5u, 6u}) {
    const auto m = build_reduced(n);
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
      const auto t = WeldedTree::generate(n, seed);
      const EdgeWalker w(t);
      QueryLedger ledger;
      auto st = w.initial_state(ledger);
      auto rs = initial_state_float(m);
      for (std::uint32_t step_i = 1; step_i <= 3 * n; ++step_i) {
        w.walk_step(st, ledger);
        step(m, rs);
        const double p_full = w.vertex_probability(st, t.exit_name());
        const double amp = rs.amp[m.target_index()];
        EXPECT_NEAR(p_full, amp * amp, 1e-10) << "n=" << n << " t=" << step_i;
        const auto rc = w.project_reduced(st);
        EXPECT_LT(rc.residual, 1e-10);
        for (std::size_t k = 0; k < rc.coeff.size(); ++k) {
          EXPECT_NEAR(rc.coeff[k], rs.amp[k], 1e-10);
        }
      }
    }
  }
}

TEST(EdgeWalker, ProbabilitiesSumToOne) {
  const auto t = WeldedTree::generate(4, 33);
  const EdgeWalker w(t);
  QueryLedger ledger;
  auto st = w.initial_state(ledger);
  for (int i = 0; i < 10; ++i) w.walk_step(st, ledger);
  double total = 0.0;
  for (VertexId id = 0; id < t.vertex_count(); ++id) {
    total += w.vertex_probability(st, t.name_of(id));
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(EdgeWalker, UnitarityOverManySteps) {
  const auto t = WeldedTree::generate(5, 2);
  const EdgeWalker w(t);
  QueryLedger ledger;
  auto st = w.initial_state(ledger);
  for (std::uint32_t i = 0; i < 10 * t.n(); ++i) w.walk_step(st, ledger);
  EXPECT_NEAR(state_norm2(st), 1.0, 1e-10);
}

TEST(EdgeWalker, SeedIndependentExitProbability) {
  const std::uint32_t n = 4, steps = 9;
  double first = -1.0;
  for (std::uint64_t seed : {10ull, 20ull, 30ull, 40ull}) {
    const auto t = WeldedTree::generate(n, seed);
    const EdgeWalker w(t);
    QueryLedger ledger;
    auto st = w.initial_state(ledger);
    for (std::uint32_t i = 0; i < steps; ++i) w.walk_step(st, ledger);
    const double p = w.vertex_probability(st, t.exit_name());
    if (first < 0) first = p;
    EXPECT_NEAR(p, first, 1e-10);
  }
}

TEST(EdgeWalker, NonUniformStateLeavesSubspace) {
  const auto t = WeldedTree::generate(3, 5);
  const EdgeWalker w(t);
  EdgeState st;
  st.amp.assign(w.slot_count(), 0.0);
  // a single directed edge inside layer 1 breaks layer uniformity
  VertexId u = kNoVertex;
  for (VertexId id = 0; id < t.vertex_count(); ++id) {
    if (t.layer_of(id) == 1) {
      u = id;
      break;
    }
  }
  st.amp[w.slot(u, 0)] = 1.0;
  const auto rc = w.project_reduced(st);
  EXPECT_GT(rc.residual, 0.1);
}

TEST(EdgeWalker, StepInverseUndoesStep) {
  const auto t = WeldedTree::generate(3, 14);
  const EdgeWalker w(t);
  std::vector<double> amp(w.slot_count());
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss;
  for (auto& a : amp) a = gauss(rng);
  const auto orig = amp;
  w.step_amplitudes(amp);
  w.step_amplitudes_inverse(amp);
  for (std::size_t i = 0; i < amp.size(); ++i) EXPECT_NEAR(amp[i], orig[i], 1e-13);
}
