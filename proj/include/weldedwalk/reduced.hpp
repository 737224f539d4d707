#pragma once

// The (4n+2)-dimensional invariant-subspace model of the coined walk on a
// welded tree of height n. Basis ordering: index 0 = |0,R>, indices
// 2k-1, 2k = |k,L>, |k,R> for k = 1..2n, index 4n+1 = |2n+1,L>. One walk step
// applies the block-diagonal coin M_C followed by the pair swap M_S, all
// matrix-free in O(n).

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "weldedwalk/exact.hpp"

namespace weldedwalk {

// p is the weight of the root-facing direction at every internal vertex,
// q the weight of the cycle-facing pair.
struct WalkParams {
  static constexpr double p = 1.0 / 3.0;
  static constexpr double q = 2.0 / 3.0;
};

inline constexpr double kOneThird = 1.0 / 3.0;
inline const double kTwoSqrt2Third = 2.0 * std::sqrt(2.0) / 3.0;  // 2*sqrt(pq)

struct ReducedModel {
  std::uint32_t n = 0;
  std::size_t dim() const { return 4 * static_cast<std::size_t>(n) + 2; }
  std::size_t target_index() const { return dim() - 1; }
};

inline ReducedModel build_reduced(std::uint32_t n) {
  if (n < 1) throw std::invalid_argument("build_reduced: n must be >= 1");
  return ReducedModel{n};
}

template <class Scalar>
struct ReducedState {
  std::vector<Scalar> amp;
  std::uint32_t steps_applied = 0;
};

inline ReducedState<double> initial_state_float(const ReducedModel& m) {
  ReducedState<double> s;
  s.amp.assign(m.dim(), 0.0);
  s.amp[0] = 1.0;
  return s;
}

inline ReducedState<std::complex<double>> initial_state_complex(const ReducedModel& m) {
  ReducedState<std::complex<double>> s;
  s.amp.assign(m.dim(), {0.0, 0.0});
  s.amp[0] = 1.0;
  return s;
}

inline ReducedState<ExactAmplitude> initial_state_exact(const ReducedModel& m) {
  ReducedState<ExactAmplitude> s;
  s.amp.assign(m.dim(), ExactAmplitude(0, 0, 0));
  s.amp[0] = ExactAmplitude(1, 0, 0);
  return s;
}

// Coin: diag(1, R_A x n, R_A' x n, 1) on index pairs (2k-1, 2k);
//   R_A  = [[-1/3, 2sqrt2/3], [2sqrt2/3,  1/3]]   (left tree)
//   R_A' = [[ 1/3, 2sqrt2/3], [2sqrt2/3, -1/3]]   (right tree)
// Shift: swap index pairs (2k, 2k+1) for k = 0..2n.
template <class T>
inline void apply_walk_step(std::vector<T>& v, std::uint32_t n) {
  const std::size_t dim = 4 * static_cast<std::size_t>(n) + 2;
  for (std::uint32_t k = 1; k <= 2 * n; ++k) {
    T& x = v[2 * k - 1];
    T& y = v[2 * k];
    const T xs = x, ys = y;
    if (k <= n) {
      x = -kOneThird * xs + kTwoSqrt2Third * ys;
      y = kTwoSqrt2Third * xs + kOneThird * ys;
    } else {
      x = kOneThird * xs + kTwoSqrt2Third * ys;
      y = kTwoSqrt2Third * xs - kOneThird * ys;
    }
  }
  for (std::size_t i = 0; i + 1 < dim; i += 2) {
    std::swap(v[i], v[i + 1]);
  }
}

template <class T>
inline void apply_walk_step_inverse(std::vector<T>& v, std::uint32_t n) {
  const std::size_t dim = 4 * static_cast<std::size_t>(n) + 2;
  for (std::size_t i = 0; i + 1 < dim; i += 2) {
    std::swap(v[i], v[i + 1]);
  }
  for (std::uint32_t k = 1; k <= 2 * n; ++k) {
    T& x = v[2 * k - 1];
    T& y = v[2 * k];
    const T xs = x, ys = y;
    if (k <= n) {
      x = -kOneThird * xs + kTwoSqrt2Third * ys;
      y = kTwoSqrt2Third * xs + kOneThird * ys;
    } else {
      x = kOneThird * xs + kTwoSqrt2Third * ys;
      y = kTwoSqrt2Third * xs - kOneThird * ys;
    }
  }
}

template <class T>
inline void step(const ReducedModel& m, ReducedState<T>& s) {
  if (s.amp.size() != m.dim()) throw std::invalid_argument("step: dimension mismatch");
  apply_walk_step(s.amp, m.n);
  s.steps_applied += 1;
}

// Exact step. Every component is multiplied by a denominator-3 token, so the
// exponent rises by exactly one across the whole vector; the two identity
// diagonal entries of the coin advance as 3/3.
inline void step(const ReducedModel& m, ReducedState<ExactAmplitude>& s) {
  if (s.amp.size() != m.dim()) throw std::invalid_argument("step: dimension mismatch");
  auto& v = s.amp;
  const std::uint32_t n = m.n;
  for (std::uint32_t k = 1; k <= 2 * n; ++k) {
    ExactAmplitude& x = v[2 * k - 1];
    ExactAmplitude& y = v[2 * k];
    const EntryToken diag = (k <= n) ? EntryToken::MinusOneThird : EntryToken::PlusOneThird;
    const EntryToken anti = (k <= n) ? EntryToken::PlusOneThird : EntryToken::MinusOneThird;
    ExactAmplitude nx = exact_add(exact_mul_entry(x, diag), exact_mul_entry(y, EntryToken::TwoSqrt2Third));
    ExactAmplitude ny = exact_add(exact_mul_entry(x, EntryToken::TwoSqrt2Third), exact_mul_entry(y, anti));
    x = std::move(nx);
    y = std::move(ny);
  }
  v[0] = ExactAmplitude(3 * v[0].a, 3 * v[0].b, v[0].e + 1);
  const std::size_t last = m.target_index();
  v[last] = ExactAmplitude(3 * v[last].a, 3 * v[last].b, v[last].e + 1);
  for (std::size_t i = 0; i + 1 < m.dim(); i += 2) {
    std::swap(v[i], v[i + 1]);
  }
  s.steps_applied += 1;
}

template <class T>
inline ReducedState<T>& run(const ReducedModel& m, ReducedState<T>& s, std::uint32_t t) {
  for (std::uint32_t i = 0; i < t; ++i) step(m, s);
  return s;
}

inline double target_amplitude_float(const ReducedModel& m, std::uint32_t t) {
  auto s = initial_state_float(m);
  run(m, s, t);
  return s.amp[m.target_index()];
}

inline ExactAmplitude target_amplitude_exact(const ReducedModel& m, std::uint32_t t) {
  auto s = initial_state_exact(m);
  run(m, s, t);
  return s.amp[m.target_index()];
}

// Exact unit-norm check: sum over components of (a + b*sqrt2)^2 must equal
// 3^(2e), i.e. sum(a^2 + 2 b^2) == 3^(2e) and sum(2 a b) == 0.
inline bool exact_norm_is_one(const ReducedState<ExactAmplitude>& s) {
  BigInt rational = 0;
  BigInt irrational = 0;
  std::uint32_t e = s.amp.empty() ? 0 : s.amp[0].e;
  for (const auto& c : s.amp) {
    if (c.e != e) return false;
    rational += c.a * c.a + 2 * c.b * c.b;
    irrational += 2 * c.a * c.b;
  }
  return irrational == 0 && rational == detail::pow3(2 * e);
}

// Dense (4n+2)^2 matrix of one walk step, for cross-checks at small n.
inline std::vector<std::vector<double>> dense_walk_matrix(const ReducedModel& m) {
  const std::size_t d = m.dim();
  std::vector<std::vector<double>> cols(d, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> v(d, 0.0);
    v[j] = 1.0;
    apply_walk_step(v, m.n);
    cols[j] = v;
  }
  // return row-major
  std::vector<std::vector<double>> rows(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) rows[i][j] = cols[j][i];
  return rows;
}

enum class Window { Theorem, Conjecture };

struct WindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Predetermined {
  std::uint32_t T1 = 0;  // odd
  double p_T1 = 0.0;     // |<4n+1| M_U^T1 |0>|, amplitude modulus
  double signed_amp = 0.0;
};

// Window bounds on the step count. The theorem window is the open interval
// 2n < T < 3.6 n log2(5n); the conjecture window is the closed [2n, 2.5n].
inline std::uint32_t window_upper(std::uint32_t n, Window w) {
  if (w == Window::Conjecture) return (5 * n) / 2;  // floor(2.5 n), inclusive
  const double hi = 3.6 * n * std::log2(5.0 * n);
  return static_cast<std::uint32_t>(std::ceil(hi)) - 1;  // strict upper bound
}

inline Predetermined predetermine_T(std::uint32_t n, Window w) {
  const ReducedModel m = build_reduced(n);
  const std::uint32_t lo = 2 * n + 1;  // first odd step count in either window
  std::uint32_t hi = window_upper(n, w);
  if (hi % 2 == 0) --hi;
  if (hi < lo) {
    throw WindowError("predetermine_T: no odd step count in window for n=" + std::to_string(n));
  }
  auto s = initial_state_float(m);
  Predetermined best;
  double best_p = -1.0;
  for (std::uint32_t t = 1; t <= hi; ++t) {
    step(m, s);
    if (t % 2 == 1 && t >= lo) {
      const double amp = s.amp[m.target_index()];
      const double p = std::abs(amp);
      if (p > best_p) {
        best_p = p;
        best = Predetermined{t, p, amp};
      }
    }
  }
  return best;
}

struct ScanRow {
  std::uint32_t n = 0;
  std::uint32_t T = 0;
  double P_T = 0.0;
  double T_over_n = 0.0;
  double n_inv_cuberoot = 0.0;
  bool pass = false;
};

inline ScanRow scan_row(std::uint32_t n) {
  const Predetermined p = predetermine_T(n, Window::Conjecture);
  ScanRow r;
  r.n = n;
  r.T = p.T1;
  r.P_T = p.p_T1;
  r.T_over_n = static_cast<double>(p.T1) / n;
  r.n_inv_cuberoot = std::pow(static_cast<double>(n), -1.0 / 3.0);
  r.pass = r.P_T > r.n_inv_cuberoot;
  return r;
}

inline std::vector<ScanRow> conjecture_scan(std::uint32_t n_min, std::uint32_t n_max) {
  if (n_min < 3 || n_min > n_max) {
    throw std::invalid_argument("conjecture_scan: need 3 <= n_min <= n_max");
  }
  std::vector<ScanRow> rows;
  rows.reserve(n_max - n_min + 1);
  for (std::uint32_t n = n_min; n <= n_max; ++n) rows.push_back(scan_row(n));
  return rows;
}

struct FrameRow {
  std::uint32_t T = 0;
  std::uint32_t k = 0;
  double amplitude = 0.0;
};

// Full-state dump at T = 0 and every odd T <= T_max; rows with amplitude
// exactly zero are omitted (the parity structure keeps those zeros exact).
inline std::vector<FrameRow> emit_frames(std::uint32_t n, std::uint32_t t_max) {
  const ReducedModel m = build_reduced(n);
  auto s = initial_state_float(m);
  std::vector<FrameRow> rows;
  auto dump = [&](std::uint32_t t) {
    for (std::uint32_t k = 0; k < m.dim(); ++k) {
      if (s.amp[k] != 0.0) rows.push_back(FrameRow{t, k, s.amp[k]});
    }
  };
  dump(0);
  for (std::uint32_t t = 1; t <= t_max; ++t) {
    step(m, s);
    if (t % 2 == 1) dump(t);
  }
  return rows;
}

}  // namespace weldedwalk
