#include "jetweil/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "jetweil/jet.hpp"
#include "jetweil/modes.hpp"
#include "jetweil/oracle.hpp"
#include "jetweil/random_program.hpp"
#include "jetweil/rng.hpp"
#include "jetweil/stability.hpp"

namespace jetweil {

std::uint64_t instance_seed(std::uint64_t seed, std::size_t i) noexcept {
  // splitmix64 finalizer over (seed, i)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Program squash_outputs(const Program& prog) {
  ProgramBuilder b(prog.input_names());
  for (const Node& node : prog.nodes()) b.add(node.op, node.args(), node.payload);
  std::vector<Slot> outs;
  for (Slot s : prog.outputs()) outs.push_back(b.add(PrimitiveKind::tanh, {s}));
  for (Slot s : outs) b.output(s);
  return std::move(b).build();
}

void for_each_instance(std::size_t count, bool parallel,
                       const std::function<void(std::size_t)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (!parallel || hw == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= count || error) return;
        i = next++;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min<std::size_t>(hw, count);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct Outcome {
  double residual = 0.0;
  bool violation = false;
  std::string note;
};

using InstanceFn = Outcome (*)(std::uint64_t seed, const SuiteOptions& opts);

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<double> unit_vector(Rng& rng, std::size_t n) {
  std::vector<double> v;
  double norm = 0.0;
  while (norm < 1e-3) {
    v = rng.vector(n, -1.0, 1.0);
    norm = norm2(v);
  }
  for (double& c : v) c /= norm;
  return v;
}

RandomProgramOptions safe_options(Rng& rng, std::size_t max_inputs, std::size_t max_depth) {
  RandomProgramOptions o;
  o.n_inputs = 1 + rng.index(max_inputs);
  o.depth = 1 + rng.index(max_depth);
  o.family = ProgramFamily::safe;
  return o;
}

Outcome duality_instance(std::uint64_t seed, const SuiteOptions&) {
  Rng rng(seed);
  const Program prog = random_program(rng.next(), safe_options(rng, 8, 50));
  const auto x = rng.vector(prog.n_inputs(), -1.0, 1.0);
  const TangentVector v{rng.vector(prog.n_inputs(), -1.0, 1.0)};
  const CoVector omega{rng.vector(prog.n_outputs(), -1.0, 1.0)};
  const double r = pairing_residual(prog, x, v, omega);
  return {r, !(r <= 1e-10), {}};
}

Outcome functoriality_instance(std::uint64_t seed, const SuiteOptions&) {
  Rng rng(seed);
  RandomProgramOptions fo = safe_options(rng, 8, 50);
  fo.n_outputs = 1 + rng.index(3);
  const Program f = squash_outputs(random_program(rng.next(), fo));
  RandomProgramOptions go = safe_options(rng, 1, 50);
  go.n_inputs = f.n_outputs();
  const Program g = random_program(rng.next(), go);
  const auto x = rng.vector(f.n_inputs(), -1.0, 1.0);
  const CoVector omega{rng.vector(g.n_outputs(), -1.0, 1.0)};
  const double r = compose_vjp_check(f, g, x, omega);
  return {r, !(r <= 1e-10), {}};
}

Outcome exactness_instance(std::uint64_t seed, const SuiteOptions&) {
  Rng rng(seed);
  RandomProgramOptions o;
  o.n_inputs = 1 + rng.index(4);
  o.depth = 1 + rng.index(30);
  o.family = ProgramFamily::polynomial;
  o.max_degree = 6;
  const Program prog = random_program(rng.next(), o);
  const auto polys = symbolic_eval(prog);

  // caps = per-variable degree, so every nonzero partial lies in the box
  std::vector<unsigned> caps(prog.n_inputs(), 1);
  for (const SparsePoly& p : polys) {
    for (const auto& [e, c] : p.terms()) {
      for (std::size_t i = 0; i < e.size(); ++i) caps[i] = std::max(caps[i], e[i]);
    }
  }
  const auto x = rng.vector(prog.n_inputs(), -1.0, 1.0);
  const DerivativeTable table = taylor_eval(prog, SeedSpec::basis(x, caps));

  Outcome out;
  for (const DerivativeEntry& e : table.entries()) {
    const auto ref = symbolic_partial(polys, e.alpha.exponents, x);
    for (std::size_t k = 0; k < ref.size(); ++k) {
      out.residual = std::max(out.residual, rel_err(e.value[k], ref[k]));
    }
  }
  out.violation = !(out.residual <= 1e-12);
  return out;
}

Outcome stability_instance(std::uint64_t seed, const SuiteOptions& opts) {
  Rng rng(seed);
  const Program prog = random_program(rng.next(), safe_options(rng, 8, 50));
  const auto x = rng.vector(prog.n_inputs(), -1.0, 1.0);
  const CoVector omega{rng.vector(prog.n_outputs(), -1.0, 1.0)};
  const StabilityReport rep = stability_bound(prog, x, omega, {opts.delta_const});
  Outcome out;
  out.residual = rep.product_bound > 0.0 ? rep.observed_norm / rep.product_bound : 0.0;
  out.violation = !rep.holds();
  if (out.violation) {
    std::ostringstream os;
    os.precision(17);
    os << "observed " << rep.observed_norm << " > bound " << rep.product_bound;
    out.note = os.str();
  }
  return out;
}

// f(x) = phi(a . x), ||a|| <= 1, with phi in {exp, sin}; on the unit ball
// every derivative of exp is bounded by e and every derivative of sin by 1.
Outcome envelope_instance(std::uint64_t seed, const SuiteOptions&) {
  Rng rng(seed);
  const std::size_t n = 1 + rng.index(4);
  const bool use_exp = rng.chance(0.5);
  auto a = unit_vector(rng, n);
  const double scale = rng.uniform(0.0, 1.0);
  for (double& c : a) c *= scale;

  ProgramBuilder b(n);
  Slot lin = b.add(PrimitiveKind::mul, {b.constant(a[0]), b.input(0)});
  for (std::size_t i = 1; i < n; ++i) {
    lin = b.add(PrimitiveKind::add, {lin, b.add(PrimitiveKind::mul, {b.constant(a[i]), b.input(i)})});
  }
  b.output(b.add(use_exp ? PrimitiveKind::exp : PrimitiveKind::sin, {lin}));
  const Program prog = std::move(b).build();

  auto x = unit_vector(rng, n);
  const double r = rng.uniform(0.0, 1.0);
  for (double& c : x) c *= r;

  SeedSpec spec;
  spec.base = x;
  const std::size_t p = 1 + rng.index(3);
  for (std::size_t j = 0; j < p; ++j) {
    spec.directions.push_back(unit_vector(rng, n));
    spec.caps.push_back(1 + static_cast<unsigned>(rng.index(3)));
  }
  const DerivativeTable table = taylor_eval(prog, spec);
  const std::vector<double> bounds(table.shape().max_degree() + 1,
                                   use_exp ? std::numbers::e : 1.0);
  const EnvelopeReport rep = coefficient_envelope(table, bounds);

  Outcome out;
  for (const EnvelopeRow& row : rep.rows) {
    if (row.bound > 0.0) out.residual = std::max(out.residual, row.coeff_norm / row.bound);
  }
  out.violation = !rep.pass;
  if (out.violation) out.note = use_exp ? "exp envelope" : "sin envelope";

  // remainder of the degree-k Maclaurin polynomial of exp at rho <= 1
  ProgramBuilder eb(1);
  eb.output(eb.add(PrimitiveKind::exp, {eb.input(0)}));
  const Program exp_prog = std::move(eb).build();
  const double rho = rng.uniform(0.05, 1.0);
  const unsigned k = 1 + static_cast<unsigned>(rng.index(6));
  const double zero = 0.0, one = 1.0;
  const auto c = directional_taylor(exp_prog, {&zero, 1}, {&one, 1}, k);
  double partial = 0.0, power = 1.0;
  for (double ck : c) {
    partial += ck * power;
    power *= rho;
  }
  const double remainder = std::abs(std::exp(rho) - partial);
  const double tb = tail_bound(std::numbers::e, k, rho);
  out.residual = std::max(out.residual, remainder / tb);
  if (!(remainder <= tb)) {
    out.violation = true;
    out.note += " tail bound";
  }
  return out;
}

Outcome truncation_instance(std::uint64_t seed, const SuiteOptions&) {
  Rng rng(seed);
  const Program prog = random_program(rng.next(), safe_options(rng, 4, 30));
  SeedSpec spec;
  spec.base = rng.vector(prog.n_inputs(), -1.0, 1.0);
  const std::size_t p = 1 + rng.index(3);
  for (std::size_t j = 0; j < p; ++j) {
    spec.directions.push_back(rng.vector(prog.n_inputs(), -1.0, 1.0));
    spec.caps.push_back(1 + static_cast<unsigned>(rng.index(3)));
  }
  SeedSpec refined = spec;
  refined.caps[rng.index(p)] += 1 + static_cast<unsigned>(rng.index(2));

  const DerivativeTable coarse = taylor_eval(prog, spec);
  const DerivativeTable fine = taylor_eval(prog, refined);
  Outcome out;
  for (const DerivativeEntry& e : coarse.entries()) {
    const auto ref = fine.entry(e.alpha);
    for (std::size_t k = 0; k < ref.size(); ++k) {
      out.residual = std::max(out.residual, rel_err(e.value[k], ref[k]));
    }
  }
  out.violation = !(out.residual <= 1e-13);
  return out;
}

struct SuiteDef {
  InstanceFn fn;
  double tolerance;
};

const std::map<std::string, SuiteDef, std::less<>>& registry() {
  static const std::map<std::string, SuiteDef, std::less<>> kSuites = {
      {"duality", {duality_instance, 1e-10}},
      {"functoriality", {functoriality_instance, 1e-10}},
      {"exactness", {exactness_instance, 1e-12}},
      // residual is observed / bound
      {"stability", {stability_instance, 1.0}},
      // residual is the largest coefficient-to-bound ratio
      {"envelope", {envelope_instance, 1.0}},
      {"truncation", {truncation_instance, 1e-13}},
  };
  return kSuites;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> kNames = {"duality",   "functoriality", "exactness",
                                                  "stability", "envelope",      "truncation"};
  return kNames;
}

SuiteResult run_suite(std::string_view name, const SuiteOptions& opts) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    std::string known;
    for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error("unknown suite '" + std::string(name) + "' (expected one of: " + known + ")");
  }
  const SuiteDef def = it->second;

  std::vector<Outcome> outcomes(opts.count);
  for_each_instance(opts.count, opts.parallel, [&](std::size_t i) {
    try {
      outcomes[i] = def.fn(instance_seed(opts.seed, i), opts);
    } catch (const Error& e) {
      outcomes[i] = {0.0, true, std::string("error: ") + e.what()};
    }
  });

  SuiteResult res;
  res.suite = std::string(name);
  res.instances = opts.count;
  res.tolerance = def.tolerance;
  constexpr std::size_t kMaxReported = 5;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Outcome& o = outcomes[i];
    res.max_residual = std::max(res.max_residual, o.residual);
    if (!o.violation) continue;
    ++res.violations;
    if (res.failures.size() < kMaxReported) {
      std::ostringstream os;
      os.precision(6);
      os << "instance " << i << ": residual " << o.residual;
      if (!o.note.empty()) os << " (" << o.note << ")";
      res.failures.push_back(os.str());
    }
  }
  return res;
}

nlohmann::ordered_json to_json(const SuiteResult& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["instances"] = r.instances;
  j["violations"] = r.violations;
  j["max_residual"] = r.max_residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass();
  j["failures"] = r.failures;
  return j;
}

}  // namespace jetweil
