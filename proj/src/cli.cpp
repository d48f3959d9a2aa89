#include "jetweil/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "jetweil/bench.hpp"
#include "jetweil/error.hpp"
#include "jetweil/evaluate.hpp"
#include "jetweil/jet.hpp"
#include "jetweil/modes.hpp"
#include "jetweil/oracle.hpp"
#include "jetweil/program.hpp"
#include "jetweil/rng.hpp"
#include "jetweil/stability.hpp"
#include "jetweil/verify.hpp"

namespace jetweil::cli {

std::vector<double> parse_reals(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view item = text.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) {
      if (text.find_first_not_of(' ') == std::string_view::npos) return out;
      throw Error("empty entry in number list '" + std::string(text) + "'");
    }
    if (item.front() == '+') item.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v)) {
      throw Error("invalid number '" + std::string(item) + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

std::vector<std::vector<double>> parse_rows(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t semi = std::min(text.find(';', pos), text.size());
    rows.push_back(parse_reals(text.substr(pos, semi - pos)));
    pos = semi + 1;
  }
  return rows;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

std::string format_list(std::span<const double> v, std::string_view sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_real(v[i]);
  }
  return s;
}

std::size_t default_max_dim() {
  const char* env = std::getenv("JETWEIL_MAX_DIM");
  if (env == nullptr || *env == '\0') return kDefaultMaxDim;
  std::size_t v = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    throw Error("JETWEIL_MAX_DIM must be a positive integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::vector<unsigned> parse_caps(std::string_view text, std::size_t p) {
  std::vector<unsigned> caps;
  for (double v : parse_reals(text)) {
    if (v < 0 || v != std::floor(v) || v > 1e6) {
      throw Error("caps must be non-negative integers");
    }
    caps.push_back(static_cast<unsigned>(v));
  }
  if (caps.size() == 1 && p > 1) caps.assign(p, caps[0]);
  return caps;
}

void dump(std::ostream& out, const nlohmann::ordered_json& j) { out << j.dump(2) << '\n'; }

struct Common {
  std::string file;
  std::string x;
  bool json = false;
};

// ---------------------------------------------------------------------------

int cmd_eval(const Common& c, std::ostream& out) {
  const Program prog = load_program(c.file);
  const auto y = eval_primal(prog, parse_reals(c.x));
  if (c.json) {
    nlohmann::ordered_json j;
    j["outputs"] = y;
    out << j.dump() << '\n';
  } else {
    for (double v : y) out << format_real(v) << '\n';
  }
  return kExitOk;
}

struct GradArgs {
  std::string omega;
  bool check = false;
  bool stability = false;
  std::uint64_t seed = 1;
  double delta_const = 4.0;
};

int cmd_grad(const Common& c, const GradArgs& g, std::ostream& out) {
  const Program prog = load_program(c.file);
  const auto x = parse_reals(c.x);
  CoVector omega;
  if (g.omega.empty()) {
    if (prog.n_outputs() != 1) {
      throw Error("program has " + std::to_string(prog.n_outputs()) +
                  " outputs; pass --omega to choose a covector");
    }
    omega.components = {1.0};
  } else {
    omega.components = parse_reals(g.omega);
  }
  const CoVector xbar = vjp(prog, x, omega);

  nlohmann::ordered_json j;
  j["gradient"] = xbar.components;
  int code = kExitOk;
  if (g.check) {
    Rng rng(g.seed);
    const TangentVector v{rng.vector(prog.n_inputs(), -1.0, 1.0)};
    const double residual = pairing_residual(prog, x, v, omega);
    double fd_err = 0.0;
    std::vector<double> fd(prog.n_inputs(), 0.0);
    for (std::size_t i = 0; i < prog.n_inputs(); ++i) {
      std::vector<unsigned> alpha(prog.n_inputs(), 0);
      alpha[i] = 1;
      const auto d = finite_difference(prog, x, alpha);
      fd[i] = dot(omega.components, d);
      fd_err = std::max(fd_err, std::abs(xbar.components[i] - fd[i]) / std::max(1.0, std::abs(fd[i])));
    }
    j["check"] = {{"pairing_residual", residual},
                  {"finite_difference", fd},
                  {"fd_max_rel_error", fd_err}};
    constexpr double kPairingTol = 1e-10;
    constexpr double kFdTol = 1e-4;
    if (!(residual <= kPairingTol) || !(fd_err <= kFdTol)) code = kExitViolation;
  }
  if (g.stability) {
    const StabilityReport rep = stability_bound(prog, x, omega, {g.delta_const});
    j["stability"] = to_json(rep);
    if (!rep.holds()) code = kExitViolation;
  }
  if (c.json || g.check || g.stability) {
    dump(out, j);
  } else {
    out << format_list(xbar.components) << '\n';
  }
  return code;
}

struct TaylorArgs {
  std::string dirs;
  std::string caps;
  std::string envelope;
  std::string tail;
  std::size_t max_dim = 0;
};

int cmd_taylor(const Common& c, const TaylorArgs& t, std::ostream& out) {
  const Program prog = load_program(c.file);
  SeedSpec spec;
  spec.base = parse_reals(c.x);
  if (t.dirs.empty()) {
    spec = SeedSpec::basis(spec.base, 1u);
  } else {
    spec.directions = parse_rows(t.dirs);
  }
  spec.caps = t.caps.empty() ? std::vector<unsigned>(spec.directions.size(), 1u)
                             : parse_caps(t.caps, spec.directions.size());
  const DerivativeTable table = taylor_eval(prog, spec, t.max_dim);

  nlohmann::ordered_json j = to_json(table);
  int code = kExitOk;
  std::optional<EnvelopeReport> env;
  if (!t.envelope.empty()) {
    env = coefficient_envelope(table, parse_reals(t.envelope));
    j["envelope"] = to_json(*env);
    if (!env->pass) code = kExitViolation;
  }
  std::optional<double> tail;
  if (!t.tail.empty()) {
    const auto mr = parse_reals(t.tail);
    if (mr.size() != 2) throw Error("--tail expects M,rho");
    tail = tail_bound(mr[0], table.shape().max_degree(), mr[1]);
    j["tail_bound"] = {{"M", mr[0]}, {"k", table.shape().max_degree()}, {"rho", mr[1]},
                       {"bound", *tail}};
  }

  if (c.json) {
    dump(out, j);
    return code;
  }
  out << "dim W = " << table.shape().dim() << '\n';
  for (const DerivativeEntry& e : table.entries()) {
    out << '[';
    for (std::size_t i = 0; i < e.alpha.size(); ++i) out << (i ? "," : "") << e.alpha[i];
    out << "] " << format_list(e.value) << '\n';
  }
  if (env) out << "envelope: " << (env->pass ? "pass" : "FAIL") << '\n';
  if (tail) out << "tail bound: " << format_real(*tail) << '\n';
  return code;
}

int cmd_check(const std::string& suite, const SuiteOptions& opts, bool json, std::ostream& out) {
  const SuiteResult r = run_suite(suite, opts);
  if (json) {
    dump(out, to_json(r));
  } else {
    out << r.suite << ": " << r.instances << " instances, " << r.violations
        << " violations, max residual " << format_real(r.max_residual) << " (tolerance "
        << format_real(r.tolerance) << ") " << (r.pass() ? "PASS" : "FAIL") << '\n';
    for (const auto& f : r.failures) out << "  " << f << '\n';
  }
  return r.pass() ? kExitOk : kExitViolation;
}

struct BenchArgs {
  std::string file;
  std::string family = "all";
  std::size_t nodes = 500;
  std::size_t inputs = 4;
  std::string schedule;
  bool no_nested = false;
  bool gate = false;
};

void print_bench(const BenchReport& r, std::ostream& out) {
  out << r.program_id << " (Q = " << r.q << ")\n";
  for (const BenchRun& run : r.runs) {
    out << "  dim " << run.dim << "  median " << format_real(run.median_seconds) << " s\n";
  }
  out << "  slope " << format_real(r.fit.slope);
  if (r.gated) {
    out << " in [" << format_real(r.slope_lo) << ", " << format_real(r.slope_hi)
        << "]: " << (r.slope_ok ? "yes" : "NO");
  }
  out << "\n  tapes during Weil mode " << r.weil_tapes << ", vjp node adjoint slots "
      << r.vjp_node_adjoint_slots << '\n';
  if (r.nested) {
    out << "  nested p=" << r.nested->p << " k=" << r.nested->k << ": " << r.nested->passes
        << " passes, " << format_real(r.nested->median_seconds) << " s (Weil "
        << format_real(r.nested->weil_median_seconds) << " s)\n";
  }
}

int cmd_bench(const BenchArgs& b, BenchOptions opts, bool json, std::ostream& out) {
  if (!b.schedule.empty()) opts.schedule = parse_cap_schedule(b.schedule);
  opts.run_nested = !b.no_nested;
  std::vector<BenchReport> reports;
  if (!b.file.empty()) {
    reports.push_back(bench_program(load_program(b.file), b.file, b.gate, opts));
  } else {
    std::vector<ProgramFamily> fams;
    if (b.family == "all" || b.family == "add_unary") fams.push_back(ProgramFamily::add_unary_heavy);
    if (b.family == "all" || b.family == "mul") fams.push_back(ProgramFamily::mul_heavy);
    if (fams.empty()) throw Error("unknown family '" + b.family + "' (add_unary, mul or all)");
    for (ProgramFamily f : fams) reports.push_back(bench_family(f, b.nodes, b.inputs, opts));
  }
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass();
  if (json) {
    nlohmann::ordered_json j;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    j["reports"] = std::move(arr);
    j["pass"] = ok;
    dump(out, j);
  } else {
    for (const auto& r : reports) print_bench(r, out);
  }
  return ok ? kExitOk : kExitViolation;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Higher-order derivatives of straight-line programs via Weil algebras", "jetweil"};
  app.require_subcommand(1);

  Common common;
  GradArgs grad;
  TaylorArgs taylor;
  BenchArgs bench;
  SuiteOptions suite_opts;
  BenchOptions bench_opts;
  std::string suite;
  std::optional<std::size_t> max_dim;

  auto add_program = [&](CLI::App* sub) {
    sub->add_option("program", common.file, "SLP text file")->required();
    sub->add_option("--x", common.x, "Base point, comma separated")->required();
    sub->add_flag("--json", common.json, "Emit JSON");
  };

  CLI::App* eval = app.add_subcommand("eval", "Evaluate f(x)");
  add_program(eval);

  CLI::App* gradc = app.add_subcommand("grad", "Reverse-mode pullback J^T omega");
  add_program(gradc);
  gradc->add_option("--omega", grad.omega, "Output covector (default 1 for scalar programs)");
  gradc->add_flag("--check", grad.check, "Also report the pairing residual and finite differences");
  gradc->add_flag("--stability", grad.stability, "Also report the reverse-sweep stability bound");
  gradc->add_option("--seed", grad.seed, "Seed for the random tangent of --check");
  gradc->add_option("--delta-const", grad.delta_const, "Constant c in delta = c u kappa");

  CLI::App* tay = app.add_subcommand("taylor", "Mixed directional derivatives from one Weil pass");
  add_program(tay);
  tay->add_option("--dirs", taylor.dirs, "Directions, e.g. \"1,0;0,1\" (default: basis)");
  tay->add_option("--caps", taylor.caps, "Per-direction caps, or one cap for all (default 1)");
  tay->add_option("--envelope", taylor.envelope, "Bounds M0,M1,... for the coefficient envelope");
  tay->add_option("--tail", taylor.tail, "M,rho for the Cauchy tail bound");
  tay->add_option("--max-dim", max_dim, "Refuse shapes with dim W above this (env JETWEIL_MAX_DIM)");

  CLI::App* check = app.add_subcommand("check", "Randomized verification suite");
  check->add_option("suite", suite, "duality, functoriality, exactness, stability, envelope, truncation")
      ->required();
  check->add_option("--seed", suite_opts.seed);
  check->add_option("--count", suite_opts.count);
  check->add_flag("--parallel", suite_opts.parallel, "Run instances on all hardware threads");
  check->add_option("--delta-const", suite_opts.delta_const);
  check->add_flag("--json", common.json);

  CLI::App* benchc = app.add_subcommand("bench", "Weil-mode cost versus dim W");
  benchc->add_option("program", bench.file, "SLP file (default: generated programs)");
  benchc->add_option("--family", bench.family, "add_unary, mul or all");
  benchc->add_option("--nodes", bench.nodes, "Q for generated programs");
  benchc->add_option("--inputs", bench.inputs, "Inputs of generated programs");
  benchc->add_option("--schedule", bench.schedule, "Cap vectors, e.g. \"1;1,1;1,1,1\"");
  benchc->add_option("--seed", bench_opts.seed);
  benchc->add_option("--reps", bench_opts.repetitions, "Timed repetitions (at least 5)");
  benchc->add_option("--warmups", bench_opts.warmups);
  benchc->add_option("--nested-p", bench_opts.nested_p);
  benchc->add_option("--nested-k", bench_opts.nested_k);
  benchc->add_flag("--no-nested", bench.no_nested, "Skip the nested first-order baseline");
  benchc->add_flag("--gate", bench.gate, "Apply the slope window to a program file");
  benchc->add_option("--max-dim", max_dim);
  benchc->add_flag("--parallel", suite_opts.parallel, "Accepted for symmetry; timing runs serially");
  benchc->add_flag("--json", common.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const std::size_t limit = max_dim ? *max_dim : default_max_dim();
    taylor.max_dim = limit;
    bench_opts.max_dim = limit;
    if (*eval) return cmd_eval(common, out);
    if (*gradc) return cmd_grad(common, grad, out);
    if (*tay) return cmd_taylor(common, taylor, out);
    if (*check) return cmd_check(suite, suite_opts, common.json, out);
    if (*benchc) return cmd_bench(bench, bench_opts, common.json, out);
  } catch (const ParseError& e) {
    err << (common.file.empty() ? bench.file : common.file) << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << e.what() << '\n';
    return kExitNumeric;
  } catch (const NumericOverflow& e) {
    err << e.what() << '\n';
    return kExitNumeric;
  } catch (const ShapeTooLarge& e) {
    err << "refused: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace jetweil::cli
