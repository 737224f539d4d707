#pragma once

// Closed-form spectral machinery for the reduced walk matrix M_U = M_S M_C.
//
// The coin factors as M_C = 2 A A^T - I for an orthonormal-column matrix A,
// so eigenpairs of M_U come from the tridiagonal J = A^T M_S A: every
// eigenvalue lambda of J with |lambda| < 1 lifts to the conjugate pair
// exp(+-i arccos lambda) with eigenvectors u = Av - exp(+-i phi) M_S Av, and
// lambda = +-1 lift directly. Eigenvalues are lambda = 2 sqrt(pq) cos theta
// where theta runs over the roots of
//     sqrt(q) sin((n+1)theta) + sigma sqrt(p) sin(n theta) = 0,  sigma = +-1,
// and eigenvector components are monic second-kind Chebyshev values.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "weldedwalk/reduced.hpp"

namespace weldedwalk {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Monic Chebyshev polynomial of the second kind: U_{-1} = 0, U_0 = 1,
// U_i = x U_{i-1} - U_{i-2}; equals sin((i+1) acos(x/2)) / sin(acos(x/2))
// inside [-2, 2].
inline double chebyshev_U(int i, double x) {
  if (i < -1) throw std::invalid_argument("chebyshev_U: i must be >= -1");
  if (i == -1) return 0.0;
  if (i == 0) return 1.0;
  if (std::abs(x) < 2.0) {
    const double theta = std::acos(x / 2.0);
    const double s = std::sin(theta);
    if (s > 1e-8) return std::sin((i + 1) * theta) / s;
  }
  double um1 = 0.0, u = 1.0;
  for (int j = 1; j <= i; ++j) {
    const double next = x * u - um1;
    um1 = u;
    u = next;
  }
  return u;
}

namespace specdetail {

inline double secular(std::uint32_t n, int sigma, double theta) {
  return std::sqrt(WalkParams::q) * std::sin((n + 1.0) * theta) +
         sigma * std::sqrt(WalkParams::p) * std::sin(n * theta);
}

}  // namespace specdetail

// The n roots in (0, pi) of sqrt(q) sin((n+1)t) + sigma sqrt(p) sin(nt) = 0,
// found by a sign-change scan over a uniform grid followed by bisection. The
// grid is refined (up to four times) if the expected count is missed.
inline std::vector<double> theta_roots(std::uint32_t n, int sigma) {
  if (n < 1) throw std::invalid_argument("theta_roots: n must be >= 1");
  if (sigma != 1 && sigma != -1) throw std::invalid_argument("theta_roots: sigma must be +-1");
  const double pi = std::numbers::pi;
  for (int refine = 0; refine < 5; ++refine) {
    const std::size_t grid = (std::size_t{8} << refine) * (n + 1);
    std::vector<double> roots;
    double prev_t = pi / grid;
    double prev_f = specdetail::secular(n, sigma, prev_t);
    for (std::size_t i = 2; i < grid; ++i) {
      const double t = pi * static_cast<double>(i) / grid;
      const double f = specdetail::secular(n, sigma, t);
      if (prev_f == 0.0) {
        roots.push_back(prev_t);
      } else if (f != 0.0 && std::signbit(f) != std::signbit(prev_f)) {
        double a = prev_t, b = t;
        double fa = prev_f;
        while (b - a > 1e-14) {
          const double mid = 0.5 * (a + b);
          const double fm = specdetail::secular(n, sigma, mid);
          if (fm == 0.0) {
            a = b = mid;
            break;
          }
          if (std::signbit(fm) == std::signbit(fa)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        roots.push_back(0.5 * (a + b));
      }
      prev_t = t;
      prev_f = f;
    }
    if (roots.size() == n) return roots;
  }
  throw NumericalError("theta_roots: root count mismatch persisted after refinement");
}

struct EigenPair {
  enum class Kind { PlusOne, MinusOne, Oscillatory };
  Kind kind = Kind::Oscillatory;
  int k = 0;           // 2..n+1 within its family
  int sigma = 0;       // root family sign
  int branch = +1;     // e^{+i phi} or e^{-i phi}
  double theta = 0.0;  // root in (0, pi); unused for the +-1 pairs
  double lambda = 0.0;
  double phi = 0.0;    // arccos(lambda) in [0, pi]
  double norm_sq = 0.0;  // closed-form squared norm of the unnormalised u
  double overlap = 0.0;  // <target| u><u |initial> / norm_sq

  double signed_angle() const { return branch < 0 ? -phi : phi; }
};

struct Spectrum {
  std::uint32_t n = 0;
  double p = WalkParams::p;
  double q = WalkParams::q;
  std::vector<EigenPair> pairs;  // 4n+2 entries, all angles distinct
};

inline double plus_minus_one_norm_sq(std::uint32_t n) {
  // 2/(p-q) (2p - (q/p)^n), positive since both factors are negative
  const double p = WalkParams::p, q = WalkParams::q;
  return 2.0 / (p - q) * (2.0 * p - std::pow(q / p, static_cast<double>(n)));
}

inline double oscillatory_norm_sq(std::uint32_t n, int sigma, double theta) {
  const double p = WalkParams::p, q = WalkParams::q;
  const double lambda = 2.0 * std::sqrt(p * q) * std::cos(theta);
  const double s = std::sin(theta);
  const double tail = sigma * std::sqrt(q / p) * std::sin(2.0 * (n + 1.0) * theta) / (2.0 * s);
  const double one_minus_l2 = 1.0 - lambda * lambda;
  return 2.0 * one_minus_l2 * one_minus_l2 / (q * s * s) * (n + tail);
}

inline Spectrum build_spectrum(std::uint32_t n) {
  Spectrum sp;
  sp.n = n;
  sp.pairs.reserve(4 * static_cast<std::size_t>(n) + 2);

  EigenPair plus;
  plus.kind = EigenPair::Kind::PlusOne;
  plus.lambda = 1.0;
  plus.phi = 0.0;
  plus.norm_sq = plus_minus_one_norm_sq(n);
  plus.overlap = 1.0 / plus.norm_sq;
  sp.pairs.push_back(plus);

  EigenPair minus;
  minus.kind = EigenPair::Kind::MinusOne;
  minus.lambda = -1.0;
  minus.phi = std::numbers::pi;
  minus.norm_sq = plus_minus_one_norm_sq(n);
  minus.overlap = -1.0 / minus.norm_sq;
  sp.pairs.push_back(minus);

  for (const int sigma : {+1, -1}) {
    const auto roots = theta_roots(n, sigma);
    for (std::size_t idx = 0; idx < roots.size(); ++idx) {
      const double theta = roots[idx];
      const double lambda = 2.0 * std::sqrt(WalkParams::p * WalkParams::q) * std::cos(theta);
      const double norm_sq = oscillatory_norm_sq(n, sigma, theta);
      for (const int branch : {+1, -1}) {
        EigenPair e;
        e.kind = EigenPair::Kind::Oscillatory;
        e.k = static_cast<int>(idx) + 2;
        e.sigma = sigma;
        e.branch = branch;
        e.theta = theta;
        e.lambda = lambda;
        e.phi = std::acos(lambda);
        e.norm_sq = norm_sq;
        e.overlap = sigma * (1.0 - lambda * lambda) / norm_sq;
        sp.pairs.push_back(e);
      }
    }
  }
  return sp;
}

// --- closed-form eigenvector components (Chebyshev form) ---

// v lives in the 2(n+1)-dimensional J-space; second half by centrosymmetry
// with the family sign.
inline std::vector<double> eigenvector_v(std::uint32_t n, const EigenPair& e) {
  const std::size_t dim = 2 * static_cast<std::size_t>(n) + 2;
  std::vector<double> v(dim, 0.0);
  const double p = WalkParams::p, q = WalkParams::q;
  if (e.kind == EigenPair::Kind::Oscillatory) {
    const double x = e.lambda / std::sqrt(p * q);
    v[0] = 1.0;
    for (std::uint32_t j = 1; j <= n; ++j) {
      v[j] = e.lambda / std::sqrt(p) * chebyshev_U(static_cast<int>(j) - 1, x) -
             1.0 / std::sqrt(q) * chebyshev_U(static_cast<int>(j) - 2, x);
    }
    for (std::uint32_t j = 0; j <= n; ++j) v[dim - 1 - j] = e.sigma * v[j];
  } else {
    const int sign = e.kind == EigenPair::Kind::PlusOne ? +1 : -1;
    v[0] = 1.0;
    double pw = 1.0;
    for (std::uint32_t j = 1; j <= n; ++j) {
      pw *= sign * std::sqrt(q / p);
      v[j] = pw / std::sqrt(q);
    }
    for (std::uint32_t j = 0; j <= n; ++j) v[dim - 1 - j] = sign * v[j];
  }
  return v;
}

// A maps the J-space into the walk space; column layout mirrors the coin
// blocks (root column, sqrt(p)/sqrt(q) pairs, centrosymmetric second half).
inline std::vector<double> apply_A(std::uint32_t n, const std::vector<double>& v) {
  const std::size_t d = 4 * static_cast<std::size_t>(n) + 2;
  std::vector<double> out(d, 0.0);
  const double sp = std::sqrt(WalkParams::p), sq = std::sqrt(WalkParams::q);
  out[0] = v[0];
  for (std::uint32_t j = 1; j <= n; ++j) {
    out[2 * j - 1] = sp * v[j];
    out[2 * j] = sq * v[j];
  }
  for (std::uint32_t j = 1; j <= n; ++j) {
    out[4 * n + 2 - 2 * j] = sp * v[2 * n + 1 - j];
    out[4 * n + 1 - 2 * j] = sq * v[2 * n + 1 - j];
  }
  out[4 * n + 1] = v[2 * n + 1];
  return out;
}

template <class T>
inline void apply_MS(std::vector<T>& v) {
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) std::swap(v[i], v[i + 1]);
}

// Unnormalised eigenvector of M_U: u = Av - e^{i phi} M_S Av for the
// oscillatory pairs, u = Av for lambda = +-1.
inline std::vector<std::complex<double>> materialize_eigenvector(std::uint32_t n,
                                                                 const EigenPair& e) {
  const auto v = eigenvector_v(n, e);
  const auto a = apply_A(n, v);
  std::vector<std::complex<double>> u(a.size());
  if (e.kind != EigenPair::Kind::Oscillatory) {
    for (std::size_t i = 0; i < a.size(); ++i) u[i] = a[i];
    return u;
  }
  auto b = a;
  apply_MS(b);
  const std::complex<double> phase = std::polar(1.0, e.signed_angle());
  for (std::size_t i = 0; i < a.size(); ++i) u[i] = a[i] - phase * b[i];
  return u;
}

inline std::complex<double> eigenvalue_of(const EigenPair& e) {
  return std::polar(1.0, e.signed_angle());
}

// max over eigenpairs of ||M_U u - e^{i phi} u|| / ||u||, matrix-free
inline double eigenpair_residual_max(std::uint32_t n) {
  const auto sp = build_spectrum(n);
  double worst = 0.0;
  for (const auto& e : sp.pairs) {
    auto u = materialize_eigenvector(n, e);
    std::vector<double> re(u.size()), im(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      re[i] = u[i].real();
      im[i] = u[i].imag();
    }
    apply_walk_step(re, n);
    apply_walk_step(im, n);
    const auto ev = eigenvalue_of(e);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const std::complex<double> got(re[i], im[i]);
      const auto diff = got - ev * u[i];
      num += std::norm(diff);
      den += std::norm(u[i]);
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return worst;
}

// Dense reconstruction residual max_ij |M_U - sum_j e^{i phi_j} |E_j><E_j||.
inline double reconstruct_check(std::uint32_t n) {
  if (n > 200) throw std::invalid_argument("reconstruct_check: dense check capped at n=200");
  const auto m = build_reduced(n);
  const auto mu = dense_walk_matrix(m);
  const std::size_t d = m.dim();
  std::vector<std::vector<std::complex<double>>> acc(
      d, std::vector<std::complex<double>>(d, {0.0, 0.0}));
  const auto sp = build_spectrum(n);
  for (const auto& e : sp.pairs) {
    auto u = materialize_eigenvector(n, e);
    double nrm = 0.0;
    for (const auto& c : u) nrm += std::norm(c);
    nrm = std::sqrt(nrm);
    for (auto& c : u) c /= nrm;
    const auto ev = eigenvalue_of(e);
    for (std::size_t i = 0; i < d; ++i) {
      const auto row = ev * u[i];
      for (std::size_t j = 0; j < d; ++j) acc[i][j] += row * std::conj(u[j]);
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      worst = std::max(worst, std::abs(acc[i][j] - mu[i][j]));
    }
  }
  return worst;
}

// Target amplitude after an odd number of steps, in closed form. The sum runs
// over the sigma = +1 root family; the minus family and the conjugate
// branches fold into the factor 4 (equivalently the 2q / (1 - lambda^2)
// weight below), and every term cancels for even t.
inline double closed_form_A(std::uint32_t n, std::uint32_t t) {
  if (t % 2 == 0) return 0.0;
  const double p = WalkParams::p, q = WalkParams::q;
  double total = (p - q) / (2.0 * p - std::pow(q / p, static_cast<double>(n)));
  const auto roots = theta_roots(n, +1);
  for (const double theta : roots) {
    const double lambda = 2.0 * std::sqrt(p * q) * std::cos(theta);
    const double s = std::sin(theta);
    const double tail = std::sqrt(q / p) * std::sin(2.0 * (n + 1.0) * theta) / (2.0 * s);
    total += 2.0 * q * std::cos(t * std::acos(lambda)) / (1.0 - lambda * lambda) * s * s /
             (n + tail);
  }
  return total;
}

// --- phase gap (angles of the eigenvalues) ---

inline double g_of_theta(double theta) {
  return std::acos(2.0 * std::sqrt(WalkParams::p * WalkParams::q) * std::cos(theta));
}

inline double g_derivative(double theta) {
  const double pq4 = 4.0 * WalkParams::p * WalkParams::q;
  const double c = std::cos(theta);
  return std::sqrt(pq4) * std::sin(theta) / std::sqrt(1.0 - pq4 * c * c);
}

struct PhaseGapReport {
  double delta_theta = 0.0;
  double delta_E_S = 0.0;
  double bound = 0.0;  // (pi - 2 theta0)/n with tan(theta0) = sqrt3/(sqrt2 - 1)
};

namespace specdetail {

inline double circular_gap(double x, double y) {
  const double two_pi = 2.0 * std::numbers::pi;
  double d = std::fmod(std::abs(x - y), two_pi);
  return std::min(d, two_pi - d);
}

struct AngleEntry {
  double angle = 0.0;
  bool in_S = false;
  std::size_t root_id = 0;  // identifies the generating root; +-1 pairs get their own ids
};

inline std::vector<AngleEntry> signed_angles(const Spectrum& sp, double s_lo, double s_hi) {
  std::vector<AngleEntry> list;
  list.reserve(sp.pairs.size());
  std::size_t id = 0;
  for (const auto& e : sp.pairs) {
    AngleEntry a;
    a.angle = e.signed_angle();
    a.in_S = e.kind == EigenPair::Kind::Oscillatory && e.theta > s_lo && e.theta < s_hi;
    // conjugate branches of one root share an id only when the angles
    // coincide (they never do here since phi != 0, pi for oscillatory pairs)
    a.root_id = id++;
    list.push_back(a);
  }
  return list;
}

}  // namespace specdetail

inline PhaseGapReport phase_gap(std::uint32_t n, double s_lo = std::numbers::pi / 3.0,
                                double s_hi = 2.0 * std::numbers::pi / 3.0) {
  PhaseGapReport r;
  const double theta0 = std::atan(std::sqrt(3.0) / (std::sqrt(2.0) - 1.0));
  r.bound = (std::numbers::pi - 2.0 * theta0) / n;

  std::vector<double> all_roots;
  std::vector<double> s_roots;
  for (const int sigma : {+1, -1}) {
    for (const double t : theta_roots(n, sigma)) {
      all_roots.push_back(t);
      if (t > s_lo && t < s_hi) s_roots.push_back(t);
    }
  }
  double dtheta = std::numbers::pi;
  for (const double a : s_roots) {
    for (const double b : all_roots) {
      if (a == b) continue;
      dtheta = std::min(dtheta, std::abs(a - b));
    }
  }
  r.delta_theta = dtheta;

  const auto sp = build_spectrum(n);
  const auto angles = specdetail::signed_angles(sp, s_lo, s_hi);
  double des = 2.0 * std::numbers::pi;
  for (const auto& a : angles) {
    if (!a.in_S) continue;
    for (const auto& b : angles) {
      if (a.root_id == b.root_id) continue;
      des = std::min(des, specdetail::circular_gap(a.angle, b.angle));
    }
  }
  r.delta_E_S = des;
  return r;
}

// --- averaged success probability (sum of k i.i.d. uniform steps in [T]) ---

struct AverageProbabilityReport {
  double exact_average = 0.0;
  double lower_bound = 0.0;
  double sum_S = 0.0;      // sum over S of |y_j^* c_j|^2
  double error_term = 0.0; // (pi / (T Delta E_S))^k
};

inline AverageProbabilityReport average_probability(std::uint32_t n, std::uint32_t T,
                                                    std::uint32_t k,
                                                    double s_lo = std::numbers::pi / 3.0,
                                                    double s_hi = 2.0 * std::numbers::pi / 3.0) {
  if (T < 1 || k < 1) throw std::invalid_argument("average_probability: need T, k >= 1");
  const auto sp = build_spectrum(n);
  const auto angles = specdetail::signed_angles(sp, s_lo, s_hi);
  const std::size_t d = angles.size();
  std::vector<double> prod(d);
  for (std::size_t j = 0; j < d; ++j) prod[j] = sp.pairs[j].overlap;

  // D(x) = (1/T) sum_{t<T} e^{ixt}; exact average is
  //   sum_{j,j'} P_j P_{j'} D(phi_j - phi_{j'})^k
  auto D = [T](double x) -> std::complex<double> {
    if (x == 0.0) return {1.0, 0.0};
    const std::complex<double> eix = std::polar(1.0, x);
    const std::complex<double> eixT = std::polar(1.0, x * T);
    return (1.0 - eixT) / (static_cast<double>(T) * (1.0 - eix));
  };
  std::complex<double> total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t l = 0; l < d; ++l) {
      std::complex<double> base = D(angles[j].angle - angles[l].angle);
      std::complex<double> powk = 1.0;
      for (std::uint32_t i = 0; i < k; ++i) powk *= base;
      total += prod[j] * prod[l] * powk;
    }
  }

  AverageProbabilityReport rep;
  rep.exact_average = total.real();
  for (std::size_t j = 0; j < d; ++j) {
    if (angles[j].in_S) rep.sum_S += prod[j] * prod[j];
  }
  const auto gap = phase_gap(n, s_lo, s_hi);
  rep.error_term = std::pow(std::numbers::pi / (T * gap.delta_E_S), static_cast<double>(k));
  rep.lower_bound = rep.sum_S - rep.error_term;
  return rep;
}

struct TheoremCheckReport {
  double max_p = 0.0;
  std::uint32_t argmax_t = 0;
  double bound = 0.0;
  bool pass = false;
};

// max over odd t in [2n, ceil(3.6 n log2(5n))] of the target probability,
// compared against 1/(20n)
inline TheoremCheckReport theorem_check(std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("theorem_check: n must be >= 2");
  const auto m = build_reduced(n);
  const auto hi = static_cast<std::uint32_t>(std::ceil(3.6 * n * std::log2(5.0 * n)));
  auto s = initial_state_float(m);
  TheoremCheckReport rep;
  rep.bound = 1.0 / (20.0 * n);
  for (std::uint32_t t = 1; t <= hi; ++t) {
    step(m, s);
    if (t % 2 == 1 && t >= 2 * n) {
      const double amp = s.amp[m.target_index()];
      if (amp * amp > rep.max_p) {
        rep.max_p = amp * amp;
        rep.argmax_t = t;
      }
    }
  }
  rep.pass = rep.max_p > rep.bound;
  return rep;
}

// --- dense cross-checks against the J-space picture ---

namespace specdetail {

// cyclic Jacobi eigenvalues of a symmetric matrix; plenty for the
// cross-check sizes (a few hundred rows)
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t m = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) off = std::max(off, std::abs(a[i][j]));
    if (off < 1e-15) break;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (std::abs(a[i][j]) < 1e-18) continue;
        const double tau = (a[j][j] - a[i][i]) / (2.0 * a[i][j]);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t r = 0; r < m; ++r) {
          const double ari = a[r][i], arj = a[r][j];
          a[r][i] = c * ari - s * arj;
          a[r][j] = s * ari + c * arj;
        }
        for (std::size_t r = 0; r < m; ++r) {
          const double air = a[i][r], ajr = a[j][r];
          a[i][r] = c * air - s * ajr;
          a[j][r] = s * air + c * ajr;
        }
      }
    }
  }
  std::vector<double> eig(m);
  for (std::size_t i = 0; i < m; ++i) eig[i] = a[i][i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

inline std::vector<std::vector<double>> dense_A(std::uint32_t n) {
  const std::size_t rows = 4 * static_cast<std::size_t>(n) + 2;
  const std::size_t cols = 2 * static_cast<std::size_t>(n) + 2;
  std::vector<std::vector<double>> A(rows, std::vector<double>(cols, 0.0));
  for (std::size_t c = 0; c < cols; ++c) {
    std::vector<double> e(cols, 0.0);
    e[c] = 1.0;
    const auto col = apply_A(n, e);
    for (std::size_t r = 0; r < rows; ++r) A[r][c] = col[r];
  }
  return A;
}

}  // namespace specdetail

struct JordanReport {
  double a_orthonormal_err = 0.0;   // max |A^T A - I|
  double j_pattern_err = 0.0;       // max |J - expected tridiagonal|
  double eigen_residual = 0.0;      // max ||J v - lambda v|| / ||v||
  double norm_scaling_err = 0.0;    // | ||u||^2 - 2 (1-lambda^2) ||v||^2 | relative
  double connection_err = 0.0;      // arccos(lambda) = 2 arccos(s), compared as
                                    // lambda vs 2 s^2 - 1 (acos near s=1 would
                                    // square-root the rounding noise)
  bool has_plus_minus_one = false;  // +-1 appear among J's eigenvalues
};

inline JordanReport jordan_cross_check(std::uint32_t n) {
  if (n > 100) throw std::invalid_argument("jordan_cross_check: dense check capped at n=100");
  JordanReport rep;
  const double p = WalkParams::p, q = WalkParams::q;
  const std::size_t rows = 4 * static_cast<std::size_t>(n) + 2;
  const std::size_t cols = 2 * static_cast<std::size_t>(n) + 2;
  const auto A = specdetail::dense_A(n);

  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double dot = 0.0;
      for (std::size_t r = 0; r < rows; ++r) dot += A[r][i] * A[r][j];
      rep.a_orthonormal_err = std::max(rep.a_orthonormal_err,
                                       std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }

  // J = A^T M_S A
  std::vector<std::vector<double>> MSA(rows, std::vector<double>(cols, 0.0));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t swapped = r % 2 == 0 ? r + 1 : r - 1;
    MSA[r] = A[swapped];
  }
  std::vector<std::vector<double>> J(cols, std::vector<double>(cols, 0.0));
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double dot = 0.0;
      for (std::size_t r = 0; r < rows; ++r) dot += A[r][i] * MSA[r][j];
      J[i][j] = dot;
    }
  }

  // expected tridiagonal pattern: super-diagonal sqrt(p), sqrt(pq) x (n-1),
  // q, sqrt(pq) x (n-1), sqrt(p); zero diagonal
  {
    std::vector<double> super(cols - 1, std::sqrt(p * q));
    super.front() = std::sqrt(p);
    super.back() = std::sqrt(p);
    super[n] = q;
    for (std::size_t i = 0; i < cols; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        double want = 0.0;
        if (j == i + 1) want = super[i];
        if (i == j + 1) want = super[j];
        rep.j_pattern_err = std::max(rep.j_pattern_err, std::abs(J[i][j] - want));
      }
    }
  }

  const auto sp = build_spectrum(n);
  std::vector<double> j_eigenvalues;
  bool saw_plus = false, saw_minus = false;
  for (const auto& e : sp.pairs) {
    if (e.kind == EigenPair::Kind::Oscillatory && e.branch < 0) continue;  // one per root
    const auto v = eigenvector_v(n, e);
    double vnorm2 = 0.0;
    for (const double c : v) vnorm2 += c * c;
    double res2 = 0.0;
    for (std::size_t i = 0; i < cols; ++i) {
      double jv = 0.0;
      for (std::size_t j = 0; j < cols; ++j) jv += J[i][j] * v[j];
      const double diff = jv - e.lambda * v[i];
      res2 += diff * diff;
    }
    rep.eigen_residual = std::max(rep.eigen_residual, std::sqrt(res2 / vnorm2));
    if (e.kind == EigenPair::Kind::PlusOne) saw_plus = true;
    if (e.kind == EigenPair::Kind::MinusOne) saw_minus = true;
    if (e.kind == EigenPair::Kind::Oscillatory) {
      j_eigenvalues.push_back(e.lambda);
      // ||u||^2 = 2 (1 - lambda^2) ||v||^2 for the oscillatory lifts
      const auto u = materialize_eigenvector(n, e);
      double unorm2 = 0.0;
      for (const auto& c : u) unorm2 += std::norm(c);
      const double want = 2.0 * (1.0 - e.lambda * e.lambda) * vnorm2;
      rep.norm_scaling_err = std::max(rep.norm_scaling_err,
                                      std::abs(unorm2 - want) / want);
    }
  }
  rep.has_plus_minus_one = saw_plus && saw_minus;

  // singular values of D = A^T B (B holds the paired |+> columns of M_S);
  // each J eigenvalue above -1 must satisfy arccos(lambda) = 2 arccos(s)
  {
    const std::size_t bcols = 2 * static_cast<std::size_t>(n) + 1;
    std::vector<std::vector<double>> D(cols, std::vector<double>(bcols, 0.0));
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t c = 0; c < bcols; ++c) {
      // B column c has 1/sqrt2 at rows 2c and 2c+1
      for (std::size_t i = 0; i < cols; ++i) D[i][c] = r * (A[2 * c][i] + A[2 * c + 1][i]);
    }
    std::vector<std::vector<double>> DtD(bcols, std::vector<double>(bcols, 0.0));
    for (std::size_t i = 0; i < bcols; ++i) {
      for (std::size_t j = 0; j < bcols; ++j) {
        double dot = 0.0;
        for (std::size_t r2 = 0; r2 < cols; ++r2) dot += D[r2][i] * D[r2][j];
        DtD[i][j] = dot;
      }
    }
    const auto mu = specdetail::jacobi_eigenvalues(DtD);  // mu = s^2
    std::vector<double> lam = j_eigenvalues;
    lam.push_back(1.0);  // the +1 eigenpair participates; -1 lives in the cokernel
    for (const double l : lam) {
      double best = HUGE_VAL;
      for (const double m2 : mu) {
        best = std::min(best, std::abs(l - (2.0 * m2 - 1.0)));
      }
      rep.connection_err = std::max(rep.connection_err, best);
    }
  }
  return rep;
}

}  // namespace weldedwalk
