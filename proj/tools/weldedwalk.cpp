// Batch front-end for the welded-tree walk suite. Every subcommand is
// deterministic given its flags; outputs embed the invoking configuration as
// a leading comment and are replaced atomically.

#include <atomic>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "weldedwalk/amplify.hpp"
#include "weldedwalk/edgewalk.hpp"
#include "weldedwalk/exact.hpp"
#include "weldedwalk/graph.hpp"
#include "weldedwalk/reduced.hpp"
#include "weldedwalk/spectrum.hpp"

namespace ww = weldedwalk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return std::string(buf);
}

// buffered output committed atomically (temp file + rename), stdout if no
// path was given
class Output {
 public:
  explicit Output(std::string path) : path_(std::move(path)) {}

  template <class T>
  Output& operator<<(const T& v) {
    buf_ << v;
    return *this;
  }

  void commit() {
    if (path_.empty()) {
      std::cout << buf_.str();
      return;
    }
    const std::string tmp = path_ + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open " + tmp);
      out << buf_.str();
    }
    std::filesystem::rename(tmp, path_);
  }

 private:
  std::string path_;
  std::ostringstream buf_;
};

template <class F>
void parallel_over_n(std::uint32_t lo, std::uint32_t hi, F&& fn) {
  const std::uint32_t count = hi - lo + 1;
  const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), count));
  std::atomic<std::uint32_t> next{lo};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::uint32_t n = next.fetch_add(1);
        if (n > hi) break;
        fn(n);
      }
    });
  }
  for (auto& t : pool) t.join();
}

struct CommonArgs {
  std::uint32_t n = 0;
  std::uint32_t n_min = 0, n_max = 0;
  std::uint64_t seed = 0;
  std::uint32_t steps = 0;
  std::uint32_t samples = 100;
  bool exact = false;
  std::string window = "conjecture";
  std::uint32_t cost = 4;
  std::string out;
  std::string in;
  std::string mode = "reduced";

  ww::Window window_kind() const {
    return window == "theorem" ? ww::Window::Theorem : ww::Window::Conjecture;
  }
};

std::string config_comment(const std::string& sub, const CommonArgs& a,
                           const std::vector<std::string>& used) {
  std::ostringstream os;
  os << "# weldedwalk " << sub;
  for (const auto& u : used) {
    if (u == "n") os << " --n " << a.n;
    if (u == "range") os << " --n-min " << a.n_min << " --n-max " << a.n_max;
    if (u == "seed") os << " --seed " << a.seed;
    if (u == "steps") os << " --steps " << a.steps;
    if (u == "samples") os << " --samples " << a.samples;
    if (u == "exact" && a.exact) os << " --exact";
    if (u == "window") os << " --window " << a.window;
    if (u == "cost") os << " --cost " << a.cost;
    if (u == "mode") os << " --mode " << a.mode;
  }
  if (!a.out.empty()) os << " --out " << a.out;
  os << "\n";
  return os.str();
}

int cmd_gen(const CommonArgs& a) {
  const auto tree = ww::WeldedTree::generate(a.n, a.seed);
  if (a.out.empty()) {
    tree.save(std::cout);
  } else {
    tree.save(a.out);
  }
  std::cerr << "generated welded tree n=" << a.n << " seed=" << a.seed << " ("
            << tree.vertex_count() << " vertices)\n";
  return kExitOk;
}

int cmd_walk_full(const CommonArgs& a) {
  const auto tree =
      a.in.empty() ? ww::WeldedTree::generate(a.n, a.seed) : ww::WeldedTree::load(a.in);
  const ww::EdgeWalker walker(tree, a.cost);
  ww::QueryLedger ledger;
  auto st = walker.initial_state(ledger);
  for (std::uint32_t t = 0; t < a.steps; ++t) walker.walk_step(st, ledger);
  const auto rc = walker.project_reduced(st);
  double norm2 = 0.0;
  for (const double v : st.amp) norm2 += v * v;

  std::cout << config_comment("walk-full", a, {"n", "seed", "steps", "cost"});
  std::cout << "n=" << tree.n() << " seed=" << tree.seed() << " steps=" << a.steps
            << fmt(" exit_probability=%.17g", walker.vertex_probability(st, tree.exit_name()))
            << fmt(" subspace_residual=%.3e", rc.residual) << fmt(" norm=%.17g", norm2)
            << " oracle_calls=" << ledger.quantum_oracle_calls << "\n";
  if (!a.out.empty()) {
    Output csv(a.out);
    csv << config_comment("walk-full", a, {"n", "seed", "steps", "cost"});
    csv << "vertex_hex,port,amplitude\n";
    for (ww::VertexId id = 0; id < tree.vertex_count(); ++id) {
      for (std::uint32_t port = 0; port < tree.degree(id); ++port) {
        const double amp = st.amp[walker.slot(id, port)];
        if (amp == 0.0) continue;
        csv << ww::graphdetail::hex_name(tree.name_of(id), tree.n()) << "," << port
            << fmt(",%.17g\n", amp);
      }
    }
    csv.commit();
  }
  return kExitOk;
}

int cmd_walk_reduced(const CommonArgs& a) {
  const auto model = ww::build_reduced(a.n);
  std::cout << config_comment("walk-reduced", a, {"n", "steps", "exact"});
  const double amp = ww::target_amplitude_float(model, a.steps);
  std::cout << "n=" << a.n << " T=" << a.steps << fmt(" target_amplitude=%.17g\n", amp);
  if (a.exact) {
    const auto ex = ww::target_amplitude_exact(model, a.steps);
    std::cout << "exact: " << ww::to_string(ex) << "\n";
    std::cout << fmt("exact_as_float: %.17g\n", ww::to_float(ex));
    if (!ex.is_zero() && (ex.a == 0 || ex.b == 0)) {
      std::cout << "fingerprint: " << ww::to_string(ww::fingerprint(ex)) << "\n";
    }
  }
  return kExitOk;
}

int cmd_predetermine(const CommonArgs& a) {
  const auto pre = ww::predetermine_T(a.n, a.window_kind());
  std::cout << config_comment("predetermine", a, {"n", "window"});
  std::cout << "n,T1,p_T1\n";
  std::cout << a.n << "," << pre.T1 << fmt(",%.17g\n", pre.p_T1);
  return kExitOk;
}

int cmd_scan(const CommonArgs& a) {
  std::vector<ww::ScanRow> rows(a.n_max - a.n_min + 1);
  parallel_over_n(a.n_min, a.n_max, [&](std::uint32_t n) { rows[n - a.n_min] = ww::scan_row(n); });
  Output out(a.out);
  out << config_comment("scan", a, {"range"});
  out << "n,T,P_T,T_over_n,n_inv_cuberoot,pass\n";
  bool all_pass = true;
  for (const auto& r : rows) {
    all_pass = all_pass && r.pass;
    out << r.n << "," << r.T << fmt(",%.17g,%.17g,%.17g,", r.P_T, r.T_over_n, r.n_inv_cuberoot)
        << (r.pass ? "true" : "false") << "\n";
  }
  out.commit();
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_table(const CommonArgs& a) {
  const auto pre = ww::predetermine_T(a.n, ww::Window::Conjecture);
  std::cout << config_comment("table", a, {"n", "exact"});
  std::cout << "n=" << a.n << " T=" << pre.T1 << fmt(" P_T=%.17g\n", pre.p_T1);
  if (a.exact) {
    const auto ex = ww::target_amplitude_exact(ww::build_reduced(a.n), pre.T1);
    std::cout << "exact: " << ww::to_string(ex) << "\n";
    std::cout << "fingerprint: " << ww::to_string(ww::fingerprint(ex)) << "\n";
  }
  return kExitOk;
}

int cmd_spectrum(const CommonArgs& a) {
  const auto sp = ww::build_spectrum(a.n);
  Output out(a.out);
  out << config_comment("spectrum", a, {"n"});
  out << "kind,k,sigma,theta,lambda,phi,norm_sq,overlap\n";
  for (const auto& e : sp.pairs) {
    const char* kind = e.kind == ww::EigenPair::Kind::PlusOne    ? "plus_one"
                       : e.kind == ww::EigenPair::Kind::MinusOne ? "minus_one"
                                                                 : "oscillatory";
    const char* sigma = e.sigma >= 0 ? "+" : "-";
    out << kind << "," << e.k << "," << sigma << ","
        << fmt("%.15g,%.15g,%.15g,%.15g,%.15g\n", e.theta, e.lambda, e.signed_angle(),
               e.norm_sq, e.overlap);
  }
  out.commit();
  return kExitOk;
}

int cmd_gap_check(const CommonArgs& a) {
  Output out(a.out);
  out << config_comment("gap-check", a, {"range"});
  out << "n,delta_theta,delta_E_S,bound,pass\n";
  bool all_pass = true;
  for (std::uint32_t n = a.n_min; n <= a.n_max; ++n) {
    const auto r = ww::phase_gap(n);
    const bool pass = r.delta_theta >= r.bound - 1e-9;
    all_pass = all_pass && pass;
    out << n << fmt(",%.15g,%.15g,%.15g,", r.delta_theta, r.delta_E_S, r.bound)
        << (pass ? "true" : "false") << "\n";
  }
  out.commit();
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_avg_bound(const CommonArgs& a) {
  Output out(a.out);
  out << config_comment("avg-bound", a, {"range"});
  out << "n,k,T,exact_avg,lower_bound,pass\n";
  bool all_pass = true;
  for (std::uint32_t n = a.n_min; n <= a.n_max; ++n) {
    const auto k = static_cast<std::uint32_t>(std::ceil(std::log2(5.0 * n)));
    const auto T = static_cast<std::uint32_t>(std::ceil(3.6 * n));
    const auto rep = ww::average_probability(n, T, k);
    const bool pass = rep.exact_average >= rep.lower_bound;
    all_pass = all_pass && pass;
    out << n << "," << k << "," << T << fmt(",%.17g,%.17g,", rep.exact_average, rep.lower_bound)
        << (pass ? "true" : "false") << "\n";
  }
  out.commit();
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_theorem_check(const CommonArgs& a) {
  std::vector<ww::TheoremCheckReport> rows(a.n_max - a.n_min + 1);
  parallel_over_n(a.n_min, a.n_max,
                  [&](std::uint32_t n) { rows[n - a.n_min] = ww::theorem_check(n); });
  Output out(a.out);
  out << config_comment("theorem-check", a, {"range"});
  out << "n,max_p,bound,pass\n";
  bool all_pass = true;
  for (std::uint32_t n = a.n_min; n <= a.n_max; ++n) {
    const auto& r = rows[n - a.n_min];
    all_pass = all_pass && r.pass;
    out << n << fmt(",%.17g,%.17g,", r.max_p, r.bound) << (r.pass ? "true" : "false") << "\n";
  }
  out.commit();
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_frames(const CommonArgs& a) {
  const auto rows = ww::emit_frames(a.n, a.steps);
  Output out(a.out);
  out << config_comment("frames", a, {"n", "steps"});
  out << "T,k,amplitude\n";
  for (const auto& r : rows) {
    out << r.T << "," << r.k << fmt(",%.17g\n", r.amplitude);
  }
  out.commit();
  return kExitOk;
}

int cmd_deterministic(const CommonArgs& a) {
  std::cout << config_comment("deterministic", a,
                              {"n", "window", "cost", "mode", "seed", "samples"});
  std::cout << "n,T1,p_T1,T2,alpha,final_prob,oracle_calls_conv2,oracle_calls_conv4\n";
  ww::DeterministicRunReport rep;
  std::uint32_t hits = 0;
  ww::VertexName exit_found = 0;
  if (a.mode == "instance") {
    const auto tree = ww::WeldedTree::generate(a.n, a.seed);
    const auto inst = ww::run_deterministic_instance(tree, a.window_kind(), a.samples, a.seed);
    rep = inst.base;
    hits = inst.hits;
    exit_found = inst.exit_found;
  } else {
    rep = ww::run_deterministic_reduced(a.n, a.window_kind());
  }
  std::cout << a.n << "," << rep.plan.T1 << fmt(",%.17g,", rep.plan.p_T1) << rep.plan.T2
            << fmt(",%.15g,%.17g,", rep.plan.alpha, rep.final_prob) << rep.oracle_calls_conv2
            << "," << rep.oracle_calls_conv4 << "\n";
  if (a.mode == "instance") {
    std::cout << "exit_name=" << ww::graphdetail::hex_name(exit_found, a.n) << " hits=" << hits
              << "/" << a.samples << "\n";
    if (hits != a.samples) return kExitCheckFailed;
  }
  return rep.final_prob >= 1.0 - 1e-9 ? kExitOk : kExitCheckFailed;
}

int cmd_baseline(const CommonArgs& a) {
  const auto tree = ww::WeldedTree::generate(a.n, a.seed);
  Output out(a.out);
  out << config_comment("baseline", a, {"n", "seed", "samples"});
  out << "n,walk_seed,queries\n";
  std::vector<std::uint64_t> queries;
  for (std::uint32_t i = 0; i < a.samples; ++i) {
    const auto r = ww::classical_baseline(tree, a.seed + i);
    queries.push_back(r.distinct_queries);
    out << a.n << "," << a.seed + i << "," << r.distinct_queries << "\n";
  }
  std::sort(queries.begin(), queries.end());
  out << "# median_queries=" << queries[queries.size() / 2] << "\n";
  out.commit();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coined-quantum-walk simulation suite for the welded tree problem"};
  app.require_subcommand(1);

  CommonArgs a;
  auto add_range = [&](CLI::App* sub) {
    sub->add_option("--n-min", a.n_min, "smallest tree height")->required();
    sub->add_option("--n-max", a.n_max, "largest tree height")->required();
  };
  const auto window_values = CLI::IsMember({"conjecture", "theorem"});
  const auto cost_values = CLI::IsMember({2, 4});

  auto* gen = app.add_subcommand("gen", "generate a welded-tree instance file");
  gen->add_option("--n", a.n, "tree height")->required();
  gen->add_option("--seed", a.seed, "instance seed");
  gen->add_option("--out", a.out, "instance file path (stdout if omitted)");

  auto* wf = app.add_subcommand("walk-full", "full edge-space walk on a concrete instance");
  wf->add_option("--n", a.n);
  wf->add_option("--seed", a.seed);
  wf->add_option("--steps", a.steps)->required();
  wf->add_option("--cost", a.cost)->check(cost_values);
  wf->add_option("--in", a.in, "instance file to load instead of generating");
  wf->add_option("--out", a.out, "optional state dump CSV");

  auto* wr = app.add_subcommand("walk-reduced", "reduced-model walk");
  wr->add_option("--n", a.n)->required();
  wr->add_option("--steps", a.steps)->required();
  wr->add_flag("--exact", a.exact, "also run with exact scalars");

  auto* pd = app.add_subcommand("predetermine", "largest target amplitude in the step window");
  pd->add_option("--n", a.n)->required();
  pd->add_option("--window", a.window)->check(window_values);

  auto* sc = app.add_subcommand("scan", "per-n best odd step count and amplitude");
  add_range(sc);
  sc->add_option("--out", a.out);

  auto* tb = app.add_subcommand("table", "exact target amplitude at the best step count");
  tb->add_option("--n", a.n)->required();
  tb->add_flag("--exact", a.exact);

  auto* sp = app.add_subcommand("spectrum", "eigenvalue angles and overlaps");
  sp->add_option("--n", a.n)->required();
  sp->add_option("--out", a.out);

  auto* gc = app.add_subcommand("gap-check", "phase-gap lower bound check");
  add_range(gc);
  gc->add_option("--out", a.out);

  auto* ab = app.add_subcommand("avg-bound", "averaged success probability vs closed-form bound");
  add_range(ab);
  ab->add_option("--out", a.out);

  auto* tc = app.add_subcommand("theorem-check", "max success probability vs 1/(20n)");
  add_range(tc);
  tc->add_option("--out", a.out);

  auto* fr = app.add_subcommand("frames", "full state dumps for odd step counts");
  fr->add_option("--n", a.n)->required();
  fr->add_option("--steps", a.steps)->required();
  fr->add_option("--out", a.out);

  auto* dt = app.add_subcommand("deterministic", "amplitude-amplified end-to-end run");
  dt->add_option("--n", a.n)->required();
  dt->add_option("--window", a.window)->check(window_values);
  dt->add_option("--cost", a.cost)->check(cost_values);
  dt->add_option("--mode", a.mode)->check(CLI::IsMember({"reduced", "instance"}));
  dt->add_option("--seed", a.seed, "instance seed (instance mode)");
  dt->add_option("--samples", a.samples, "measurement samples (instance mode)");

  auto* bl = app.add_subcommand("baseline", "classical random-walk searcher");
  bl->add_option("--n", a.n)->required();
  bl->add_option("--seed", a.seed, "instance seed; walk seeds count up from it");
  bl->add_option("--samples", a.samples, "number of walk seeds");
  bl->add_option("--out", a.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(a);
    if (wf->parsed()) return cmd_walk_full(a);
    if (wr->parsed()) return cmd_walk_reduced(a);
    if (pd->parsed()) return cmd_predetermine(a);
    if (sc->parsed()) return cmd_scan(a);
    if (tb->parsed()) return cmd_table(a);
    if (sp->parsed()) return cmd_spectrum(a);
    if (gc->parsed()) return cmd_gap_check(a);
    if (ab->parsed()) return cmd_avg_bound(a);
    if (tc->parsed()) return cmd_theorem_check(a);
    if (fr->parsed()) return cmd_frames(a);
    if (dt->parsed()) return cmd_deterministic(a);
    if (bl->parsed()) return cmd_baseline(a);
  } catch (const ww::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ww::WindowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
