#include "jetweil/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>

#include "jetweil/jet.hpp"
#include "jetweil/modes.hpp"
#include "jetweil/oracle.hpp"
#include "jetweil/rng.hpp"

namespace jetweil {

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error("fit_loglog: need at least two matching points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("fit_loglog: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw Error("fit_loglog: x values must not all coincide");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

std::vector<std::vector<unsigned>> default_cap_schedule() {
  std::vector<std::vector<unsigned>> s;
  for (unsigned p = 1; p <= 6; ++p) s.emplace_back(p, 1u);
  return s;
}

std::vector<std::vector<unsigned>> parse_cap_schedule(const std::string& text) {
  std::vector<std::vector<unsigned>> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    std::vector<unsigned> caps;
    std::size_t pos = start;
    while (pos < end) {
      const std::size_t comma = std::min(text.find(',', pos), end);
      unsigned v = 0;
      const char* first = text.data() + pos;
      const char* last = text.data() + comma;
      while (first < last && *first == ' ') ++first;
      while (last > first && last[-1] == ' ') --last;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw Error("invalid cap schedule entry '" + std::string(first, last) + "'");
      }
      caps.push_back(v);
      pos = comma + 1;
    }
    if (caps.empty()) throw Error("empty cap vector in schedule");
    out.push_back(std::move(caps));
    start = end + 1;
  }
  return out;
}

bool BenchReport::pass() const noexcept {
  if (weil_tapes != 0 || weil_adjoint_slots != 0) return false;
  for (const BenchRun& r : runs) {
    if (r.lifted != q) return false;
  }
  return !gated || slope_ok;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Timing {
  double median = 0.0;
  double min = 0.0;
  std::size_t inner = 1;
};

template <class F>
Timing time_call(F&& fn, const BenchOptions& opts) {
  // calibrate the inner loop on the first warm-up
  std::size_t inner = 1;
  while (true) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < inner; ++i) fn();
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    if (dt >= opts.min_repetition_seconds || inner >= (std::size_t{1} << 24)) break;
    inner *= 2;
  }
  for (std::size_t w = 1; w < opts.warmups; ++w) {
    for (std::size_t i = 0; i < inner; ++i) fn();
  }
  std::vector<double> samples;
  for (std::size_t r = 0; r < std::max<std::size_t>(opts.repetitions, 5); ++r) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < inner; ++i) fn();
    samples.push_back(std::chrono::duration<double>(Clock::now() - t0).count() /
                      static_cast<double>(inner));
  }
  std::sort(samples.begin(), samples.end());
  Timing t;
  t.inner = inner;
  t.min = samples.front();
  const std::size_t m = samples.size();
  t.median = m % 2 ? samples[m / 2] : 0.5 * (samples[m / 2 - 1] + samples[m / 2]);
  return t;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SeedSpec bench_seed(const std::vector<double>& base, const std::vector<std::vector<double>>& pool,
                    const std::vector<unsigned>& caps) {
  SeedSpec s;
  s.base = base;
  s.caps = caps;
  for (std::size_t j = 0; j < caps.size(); ++j) s.directions.push_back(pool[j % pool.size()]);
  return s;
}

}  // namespace

BenchReport bench_program(const Program& prog, const std::string& id, bool gated,
                          const BenchOptions& opts) {
  std::size_t distinct = 0;
  {
    std::vector<std::size_t> dims;
    for (const auto& caps : opts.schedule) dims.push_back(WeilShape::dimension_of(caps));
    std::sort(dims.begin(), dims.end());
    distinct = static_cast<std::size_t>(std::unique(dims.begin(), dims.end()) - dims.begin());
  }
  if (distinct < 5) {
    throw Error("cap schedule yields " + std::to_string(distinct) +
                " distinct dim W values; at least 5 are required");
  }

  BenchReport rep;
  rep.program_id = id;
  rep.q = prog.node_count();
  rep.n_inputs = prog.n_inputs();
  rep.gated = gated;
  rep.slope_lo = opts.slope_lo;
  rep.slope_hi = opts.slope_hi;
  rep.repetitions = std::max<std::size_t>(opts.repetitions, 5);
  rep.warmups = opts.warmups;
  rep.timestamp = utc_timestamp();

  Rng rng(opts.seed);
  const auto base = rng.vector(prog.n_inputs(), -0.5, 0.5);
  std::size_t max_p = 0;
  for (const auto& caps : opts.schedule) max_p = std::max(max_p, caps.size());
  max_p = std::max<std::size_t>(max_p, opts.nested_p);
  std::vector<std::vector<double>> pool;
  for (std::size_t j = 0; j < std::max<std::size_t>(max_p, 1); ++j) {
    pool.push_back(rng.vector(prog.n_inputs(), -1.0, 1.0));
  }

  const std::uint64_t tapes0 = instrumentation::tapes_created();
  const std::uint64_t slots0 = instrumentation::adjoint_slots_allocated();
  std::vector<double> dims, times;
  for (const auto& caps : opts.schedule) {
    const SeedSpec spec = bench_seed(base, pool, caps);
    BenchRun run;
    run.caps = caps;
    const DerivativeTable probe = taylor_eval(prog, spec, opts.max_dim);
    run.dim = probe.shape().dim();
    run.lifted = probe.lifted_primitives();
    run.coeff_bytes = prog.slot_count() * run.dim * sizeof(double);
    const Timing t = time_call([&] { (void)taylor_eval(prog, spec, opts.max_dim); }, opts);
    run.median_seconds = t.median;
    run.min_seconds = t.min;
    run.inner_iterations = t.inner;
    run.repetitions = rep.repetitions;
    dims.push_back(static_cast<double>(run.dim));
    times.push_back(run.median_seconds);
    rep.runs.push_back(std::move(run));
  }
  rep.weil_tapes = instrumentation::tapes_created() - tapes0;
  rep.weil_adjoint_slots = instrumentation::adjoint_slots_allocated() - slots0;
  rep.fit = fit_loglog(dims, times);
  rep.slope_ok = rep.fit.slope >= opts.slope_lo && rep.fit.slope <= opts.slope_hi;

  {
    const std::uint64_t before = instrumentation::adjoint_slots_allocated();
    const CoVector omega{std::vector<double>(prog.n_outputs(), 1.0)};
    (void)vjp(prog, base, omega);
    rep.vjp_adjoint_slots = instrumentation::adjoint_slots_allocated() - before;
    rep.vjp_node_adjoint_slots = rep.vjp_adjoint_slots - prog.n_inputs();
  }

  if (opts.run_nested) {
    NestedBaseline nb;
    nb.p = opts.nested_p;
    nb.k = opts.nested_k;
    nb.expected_passes = binomial(nb.p + nb.k, nb.k);
    const std::vector<std::vector<double>> dirs(pool.begin(), pool.begin() + nb.p);
    nb.passes = nested_jvp_schedule(prog, base, dirs, nb.k).count.passes;
    nb.median_seconds = time_call([&] { (void)nested_jvp_schedule(prog, base, dirs, nb.k); }, opts).median;
    const SeedSpec spec = bench_seed(base, pool, std::vector<unsigned>(nb.p, nb.k));
    nb.weil_median_seconds =
        time_call([&] { (void)taylor_eval(prog, spec, opts.max_dim); }, opts).median;
    rep.nested = nb;
  }
  return rep;
}

BenchReport bench_family(ProgramFamily family, std::size_t q, std::size_t n_inputs,
                         const BenchOptions& opts) {
  RandomProgramOptions ro;
  ro.depth = q;
  ro.n_inputs = n_inputs;
  ro.n_outputs = 1;
  ro.family = family;
  const Program prog = random_program(opts.seed, ro);
  const std::string id = std::string(family_name(family)) + "-q" + std::to_string(q) + "-seed" +
                         std::to_string(opts.seed);
  return bench_program(prog, id, family == ProgramFamily::add_unary_heavy, opts);
}

nlohmann::ordered_json to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["program_id"] = r.program_id;
  j["mode"] = r.mode;
  j["Q"] = r.q;
  j["n_inputs"] = r.n_inputs;
  auto runs = nlohmann::ordered_json::array();
  for (const BenchRun& run : r.runs) {
    nlohmann::ordered_json o;
    o["caps"] = run.caps;
    o["dim"] = run.dim;
    o["median_seconds"] = run.median_seconds;
    o["min_seconds"] = run.min_seconds;
    o["repetitions"] = run.repetitions;
    o["inner_iterations"] = run.inner_iterations;
    o["coeff_bytes"] = run.coeff_bytes;
    o["lifted"] = run.lifted;
    runs.push_back(std::move(o));
  }
  j["runs"] = std::move(runs);
  j["fit"] = {{"slope", r.fit.slope}, {"intercept", r.fit.intercept}};
  j["gate"] = {{"applied", r.gated}, {"lo", r.slope_lo}, {"hi", r.slope_hi}, {"pass", r.slope_ok}};
  j["tape_counters"] = {{"weil_tapes", r.weil_tapes},
                        {"weil_adjoint_slots", r.weil_adjoint_slots},
                        {"vjp_adjoint_slots", r.vjp_adjoint_slots},
                        {"vjp_node_adjoint_slots", r.vjp_node_adjoint_slots}};
  if (r.nested) {
    j["nested"] = {{"p", r.nested->p},
                   {"k", r.nested->k},
                   {"passes", r.nested->passes},
                   {"expected_passes", r.nested->expected_passes},
                   {"median_seconds", r.nested->median_seconds},
                   {"weil_median_seconds", r.nested->weil_median_seconds}};
  }
  j["environment"] = {{"timestamp", r.timestamp},
                      {"precision", "float64"},
                      {"repetitions", r.repetitions},
                      {"warmups", r.warmups}};
  j["pass"] = r.pass();
  return j;
}

}  // namespace jetweil
