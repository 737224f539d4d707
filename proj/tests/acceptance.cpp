// Acceptance suite: every release criterion runs here at its stated
// tolerance and prints one PASS/FAIL line. Keep these independent of the
// unit suites; each criterion states its own numbers.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <vector>

#include "weldedwalk/amplify.hpp"
#include "weldedwalk/edgewalk.hpp"
#include "weldedwalk/exact.hpp"
#include "weldedwalk/graph.hpp"
#include "weldedwalk/reduced.hpp"
#include "weldedwalk/spectrum.hpp"

using namespace weldedwalk;

namespace {

constexpr double kPi = std::numbers::pi;

void criterion(int id, const std::string& name, bool pass, const std::string& detail) {
  std::ostringstream os;
  os << "[CRITERION " << id << "] " << name << ": " << (pass ? "PASS" : "FAIL");
  if (!detail.empty()) os << " -- " << detail;
  std::cout << os.str() << std::endl;
  EXPECT_TRUE(pass) << os.str();
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BigInt abs_big(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

}  // namespace

TEST(Acceptance, Criterion1_ExactAmplitudeTable) {
  struct Row {
    std::uint32_t n;
    std::uint32_t T;
    BigInt published_odd;
    std::uint64_t published_two;
    std::uint32_t published_three;
  };
  const std::vector<Row> rows = {
      {50, 109, BigInt(19) * 38861, 152, 108},
      {100, 215, BigInt(318388779301LL), 300, 214},
      {150, 323, BigInt(274739) * BigInt(1231103390273LL), 451, 322},
  };
  bool pass = true;
  std::ostringstream detail;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& row : rows) {
    const auto pre = predetermine_T(row.n, Window::Conjecture);
    const bool t_ok = pre.T1 == row.T;
    const auto ex = target_amplitude_exact(build_reduced(row.n), pre.T1);
    const auto fp = fingerprint(ex);
    const bool divisible = fp.odd_part % row.published_odd == 0;
    pass = pass && t_ok && divisible;
    // constant-factor convention report: published / derived as an exact
    // rational (the derived value is ground truth)
    const BigInt derived_num = abs_big(fp.has_sqrt2_factor ? ex.b : ex.a);
    BigInt pub_num = row.published_odd << row.published_two;
    BigInt lhs = pub_num * detail::pow3(ex.e);
    BigInt rhs = derived_num * detail::pow3(row.published_three);
    const BigInt g = boost::multiprecision::gcd(lhs, rhs);
    detail << "n=" << row.n << ": T=" << pre.T1 << " fp=" << to_string(fp)
           << " published/derived=" << (lhs / g) << "/" << (rhs / g) << "; ";
  }
  const double elapsed = seconds_since(t0);
  const bool fast_enough = elapsed < 10.0;
  pass = pass && fast_enough;
  detail << "elapsed=" << elapsed << "s (<10s incl. n=150)";
  criterion(1, "exact amplitude table reproduction", pass, detail.str());
}

TEST(Acceptance, Criterion2_ScanWindow) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = conjecture_scan(6, 500);  // includes the stretch range
  const double elapsed = seconds_since(t0);
  bool all_pass = true, ratio_ok = true;
  double r200 = 0.0;
  for (const auto& r : rows) {
    all_pass = all_pass && r.pass;
    if (r.n >= 50) ratio_ok = ratio_ok && r.T_over_n >= 2.10 && r.T_over_n <= 2.30;
    if (r.n == 200) r200 = r.T_over_n;
  }
  const double limit = 3.0 / std::sqrt(2.0);
  const bool approach_ok = std::abs(r200 - limit) / limit <= 0.015;
  const bool fast_enough = elapsed < 60.0;
  std::ostringstream detail;
  detail << "all n in [6,500] pass; T/n at 200 = " << r200 << " vs " << limit
         << "; elapsed=" << elapsed << "s";
  criterion(2, "conjectured step-window scan", all_pass && ratio_ok && approach_ok && fast_enough,
            detail.str());
}

TEST(Acceptance, Criterion3_FullVsReducedEquivalence) {
  bool pass = true;
  double worst_prob = 0.0, worst_residual = 0.0;
  for (std::uint32_t n = 2; n <= 8; ++n) {
    const auto m = build_reduced(n);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto tree = WeldedTree::generate(n, seed);
      const EdgeWalker walker(tree);
      QueryLedger ledger;
      auto st = walker.initial_state(ledger);
      auto rs = initial_state_float(m);
      for (std::uint32_t t = 1; t <= 3 * n; ++t) {
        walker.walk_step(st, ledger);
        step(m, rs);
        const double p_full = walker.vertex_probability(st, tree.exit_name());
        const double amp = rs.amp[m.target_index()];
        worst_prob = std::max(worst_prob, std::abs(p_full - amp * amp));
        worst_residual = std::max(worst_residual, walker.project_reduced(st).residual);
        if (t % 2 == 0 || t < 2 * n) {
          pass = pass && p_full == 0.0 && amp == 0.0;
        }
      }
    }
  }
  pass = pass && worst_prob < 1e-10 && worst_residual < 1e-10;
  std::ostringstream detail;
  detail << "max |p_full - p_reduced| = " << worst_prob << ", max residual = " << worst_residual
         << ", exact zeros at even/early steps";
  criterion(3, "full vs reduced walk equivalence", pass, detail.str());
}

TEST(Acceptance, Criterion4_SpectralDecomposition) {
  bool pass = true;
  double worst_eig = 0.0, worst_norm = 0.0;
  for (std::uint32_t n = 1; n <= 100; ++n) {
    worst_eig = std::max(worst_eig, eigenpair_residual_max(n));
    const auto sp = build_spectrum(n);
    for (const auto& e : sp.pairs) {
      const auto u = materialize_eigenvector(n, e);
      double direct = 0.0;
      for (const auto& c : u) direct += std::norm(c);
      worst_norm = std::max(worst_norm, std::abs(direct / e.norm_sq - 1.0));
    }
  }
  pass = pass && worst_eig < 1e-9 && worst_norm < 1e-9;

  double worst_rec = 0.0;
  for (std::uint32_t n = 1; n <= 50; ++n) {
    worst_rec = std::max(worst_rec, reconstruct_check(n));
  }
  pass = pass && worst_rec < 1e-8;

  double worst_aorth = 0.0, worst_jeig = 0.0, worst_conn = 0.0, worst_pat = 0.0,
         worst_scale = 0.0;
  for (std::uint32_t n = 1; n <= 50; ++n) {
    const auto rep = jordan_cross_check(n);
    worst_aorth = std::max(worst_aorth, rep.a_orthonormal_err);
    worst_jeig = std::max(worst_jeig, rep.eigen_residual);
    worst_conn = std::max(worst_conn, rep.connection_err);
    worst_pat = std::max(worst_pat, rep.j_pattern_err);
    worst_scale = std::max(worst_scale, rep.norm_scaling_err);
    pass = pass && rep.has_plus_minus_one;
  }
  pass = pass && worst_aorth < 1e-12 && worst_jeig < 1e-9 && worst_conn < 1e-9 &&
         worst_pat < 1e-12 && worst_scale < 1e-9;

  std::ostringstream detail;
  detail << "eig residual " << worst_eig << " (n<=100), reconstruction " << worst_rec
         << " (n<=50), norm err " << worst_norm << ", A^T A err " << worst_aorth
         << ", J eig residual " << worst_jeig << ", connection err " << worst_conn;
  criterion(4, "spectral decomposition and tridiagonal cross-checks", pass, detail.str());
}

TEST(Acceptance, Criterion5_ClosedFormAmplitude) {
  double worst = 0.0;
  for (std::uint32_t n = 1; n <= 20; ++n) {
    const auto m = build_reduced(n);
    auto s = initial_state_float(m);
    for (std::uint32_t t = 1; t <= 10 * n; ++t) {
      step(m, s);
      if (t % 2 == 1) {
        worst = std::max(worst, std::abs(closed_form_A(n, t) - s.amp[m.target_index()]));
      }
    }
  }
  std::ostringstream detail;
  detail << "max |closed form - matrix power| = " << worst
         << " over n<=20, odd t<=10n (plus-family summation)";
  criterion(5, "closed-form target amplitude", worst < 1e-9, detail.str());
}

TEST(Acceptance, Criterion6_PhaseGap) {
  const double limit = kPi - 2.0 * std::atan(std::sqrt(3.0) / (std::sqrt(2.0) - 1.0));
  const double slope = std::sqrt(6.0 / 7.0);
  bool bound_ok = true;
  std::uint32_t violations = 0, last_violation = 1;
  double last_margin = 0.0;
  for (std::uint32_t n = 2; n <= 500; ++n) {
    const auto r = phase_gap(n);
    bound_ok = bound_ok && n * r.delta_theta >= limit - 1e-9;
    if (r.delta_E_S < slope * r.delta_theta) {
      ++violations;
      last_violation = n;
      last_margin = r.delta_E_S - slope * r.delta_theta;
    }
  }
  const bool relation_ok = violations == 0 || last_violation <= 10;
  std::ostringstream detail;
  detail << "n*Delta_theta >= " << limit << (bound_ok ? " holds" : " VIOLATED")
         << " for all n in [2,500]";
  if (relation_ok) {
    detail << "; Delta E_S >= sqrt(6/7)*Delta_theta for all n > " << last_violation;
  } else {
    detail << "; strict Delta E_S >= sqrt(6/7)*Delta_theta fails for " << violations
           << " of 499 sizes, last at n=" << last_violation << " (margin " << last_margin
           << "): no small threshold exists -- the minimizing pair straddles the"
           << " selection-window boundary, where the angle map's mean slope dips"
           << " just below sqrt(6/7)";
  }
  criterion(6, "phase-gap lower bounds", bound_ok && relation_ok, detail.str());
}

TEST(Acceptance, Criterion7_AverageBoundAndTheorem) {
  bool avg_ok = true;
  for (std::uint32_t n = 10; n <= 100; ++n) {
    const auto k = static_cast<std::uint32_t>(std::ceil(std::log2(5.0 * n)));
    const auto T = static_cast<std::uint32_t>(std::ceil(3.6 * n));
    const auto rep = average_probability(n, T, k);
    avg_ok = avg_ok && rep.exact_average >= rep.lower_bound;
  }
  bool thm_ok = true;
  for (std::uint32_t n = 6; n <= 200; ++n) {
    thm_ok = thm_ok && theorem_check(n).pass;
  }
  std::ostringstream detail;
  detail << "exact averages >= closed-form bounds for n in [10,100]; max odd-step success"
         << " probability > 1/(20n) for n in [6,200]";
  criterion(7, "averaged probability bound and success threshold", avg_ok && thm_ok,
            detail.str());
}

TEST(Acceptance, Criterion8_DeterministicCertaintyAndInstances) {
  bool reduced_ok = true;
  for (std::uint32_t n = 2; n <= 50; ++n) {
    const auto rep = run_deterministic_reduced(n, Window::Conjecture);
    reduced_ok = reduced_ok && rep.final_prob >= 1.0 - 1e-9;
  }
  bool instance_ok = true;
  for (std::uint32_t n = 2; n <= 10; ++n) {
    const auto tree = WeldedTree::generate(n, 1000 + n);
    const auto rep = run_deterministic_instance(tree, Window::Conjecture, 100, 42);
    instance_ok = instance_ok && rep.hits == 100 && rep.base.final_prob >= 1.0 - 1e-9;
  }
  std::ostringstream detail;
  detail << "reduced final probability >= 1-1e-9 for n in [2,50]; instance samples 100/100"
         << " for n in [2,10]";
  criterion(8, "deterministic amplification certainty", reduced_ok && instance_ok, detail.str());
}

TEST(Acceptance, Criterion8_QueryScalingFit) {
  // the stated envelope: totals within a factor of 2 of c * n^1.5 * log2(n)
  // for n in [10,200], both cost conventions
  bool pass = true;
  std::ostringstream detail;
  for (const std::uint32_t conv : {2u, 4u}) {
    std::vector<double> ratios;
    for (std::uint32_t n = 10; n <= 200; ++n) {
      const auto plan = make_plan(n, Window::Conjecture);
      OpCounts counts;
      counts.u_p = 2ull * plan.T2 + 1;
      counts.walk_steps = (2ull * plan.T2 + 1) * plan.T1;
      counts.s_t = plan.T2;
      const double total = static_cast<double>(counts.oracle_calls(conv));
      ratios.push_back(total / (std::pow(n, 1.5) * std::log2(static_cast<double>(n))));
    }
    const double rmin = *std::min_element(ratios.begin(), ratios.end());
    const double rmax = *std::max_element(ratios.begin(), ratios.end());
    const double c_fit = std::sqrt(rmin * rmax);  // optimal envelope constant
    const double dev = std::sqrt(rmax / rmin);    // best achievable deviation
    pass = pass && dev <= 2.0;
    detail << "conv" << conv << ": c_fit=" << c_fit << " worst deviation " << dev << "x; ";
  }
  // diagnostic: the conjectured n^{4/3} envelope over the same data
  {
    std::vector<double> ratios;
    for (std::uint32_t n = 10; n <= 200; ++n) {
      const auto plan = make_plan(n, Window::Conjecture);
      const double total = 2.0 * (2 * plan.T2 + 1) + 4.0 * (2 * plan.T2 + 1) * plan.T1 +
                           2.0 * plan.T2;
      ratios.push_back(total / std::pow(n, 4.0 / 3.0));
    }
    const double rmin = *std::min_element(ratios.begin(), ratios.end());
    const double rmax = *std::max_element(ratios.begin(), ratios.end());
    detail << "n^{4/3} envelope deviation " << std::sqrt(rmax / rmin)
           << "x (diagnostic; observed amplitudes stay well above the guaranteed"
           << " 1/sqrt(20n), so measured cost grows ~n^{4/3}, not n^{1.5} log n)";
  }
  criterion(8, "oracle-call totals fit c*n^1.5*log2(n) within 2x", pass, detail.str());
}

TEST(Acceptance, Criterion9_PropertySuite) {
  // walk unitarity over 10n steps
  bool unit_ok = true;
  for (std::uint32_t n = 2; n <= 8; ++n) {
    const auto tree = WeldedTree::generate(n, 7);
    const EdgeWalker walker(tree);
    QueryLedger ledger;
    auto st = walker.initial_state(ledger);
    for (std::uint32_t i = 0; i < 10 * n; ++i) walker.walk_step(st, ledger);
    double norm2 = 0.0;
    for (const double a : st.amp) norm2 += a * a;
    unit_ok = unit_ok && std::abs(norm2 - 1.0) < 1e-10;
  }
  {
    const auto m = build_reduced(100);
    auto s = initial_state_float(m);
    run(m, s, 1000);
    double norm2 = 0.0;
    for (const double a : s.amp) norm2 += a * a;
    unit_ok = unit_ok && std::abs(norm2 - 1.0) < 1e-10;
  }

  // generator invariants
  bool gen_ok = true;
  for (std::uint32_t n = 2; n <= 6; ++n) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      try {
        WeldedTree::generate(n, seed).validate();
      } catch (const std::exception&) {
        gen_ok = false;
      }
    }
  }

  // exact/float agreement per component
  bool exact_ok = true;
  double worst = 0.0;
  for (std::uint32_t n = 1; n <= 100; ++n) {
    const auto m = build_reduced(n);
    auto fs = initial_state_float(m);
    auto es = initial_state_exact(m);
    for (std::uint32_t t = 1; t <= 3 * n; ++t) {
      step(m, fs);
      step(m, es);
    }
    for (std::size_t i = 0; i < m.dim(); ++i) {
      worst = std::max(worst, std::abs(to_float(es.amp[i]) - fs.amp[i]));
    }
  }
  exact_ok = worst < 1e-10;

  std::ostringstream detail;
  detail << "unitarity drift < 1e-10 over 10n steps; generator invariants hold; exact/float"
         << " max deviation " << worst << " (n<=100, t<=3n)";
  criterion(9, "property suite", unit_ok && gen_ok && exact_ok, detail.str());
}
