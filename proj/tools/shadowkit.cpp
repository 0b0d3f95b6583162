// shadowkit: batch runner binding systems, shadowing methods and checks.
//
//   shadowkit gen       --system cat --seed 1 --delta 1e-4 --out orbit.json
//   shadowkit shadow    --orbit orbit.json --method bowen --out result.json
//   shadowkit verify    --system ns-circle --suite counterexamples
//   shadowkit stability --grid 64
//   shadowkit report    reports.jsonl | result.json [--csv series.csv]
//
// Exit codes: 0 all mandatory checks pass, 1 a check failed, 2 bad
// configuration or an inadmissible input.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shadowkit/shadowkit.hpp"

using namespace shadowkit;

namespace {

/// Configuration problems map to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything the runner needs to know about one system.
template <class P>
struct Bundle {
  MetricSystem<P> sys;
  Sampler<P> sampler;
  Perturber<P> perturb;
  /// Bracket used for the axiom checks, and the one handed to Bowen iteration.
  std::optional<Bracket<P>> bracket, bowen_bracket;
  /// Bracket checks that are known to fail on this system; reported, not enforced.
  std::vector<std::string> informational;
  /// Longest time checked by the hyperbolic axiom; on the cat map rounding grows like lambda^n.
  int hyperbolic_n = 20;
  std::map<std::string, ShadowingMethod<P>> fixed_methods;
  std::function<std::vector<CheckReport>(const RunConfig&)> counterexamples;
  std::function<std::vector<CheckReport>(const RunConfig&, const ShadowingMethod<P>&)> stability;
};

int parse_suffix(const std::string& id, const std::string& prefix) {
  const std::string tail = id.substr(prefix.size());
  int v = 0;
  std::istringstream is(tail);
  if (tail.empty() || !(is >> v) || !is.eof() || v < 1) throw ConfigError("bad system id '" + id + "'");
  return v;
}

Bundle<Vec2> cat_bundle() {
  const CatMap cat;
  Bundle<Vec2> b{cat.system(), torus::sampler(1), torus::perturber(), cat.bracket(), cat.bracket(), {}, 20, {}, {}, {}};
  b.hyperbolic_n = 10;
  b.fixed_methods.emplace("oracle", cat.oracle_method());
  b.stability = [](const RunConfig& cfg, const ShadowingMethod<Vec2>& m) {
    std::vector<Vec2> grid;
    for (int a = 0; a < cfg.grid; ++a)
      for (int c = 0; c < cfg.grid; ++c) grid.push_back({(a + 0.5) / cfg.grid, (c + 0.5) / cfg.grid});
    const CatMap f;
    return std::vector<CheckReport>{stability_experiment(f.system(), PerturbedCatMap{1e-3}.system(), m, grid, 32)};
  };
  return b;
}

Bundle<double> ns_bundle() {
  const NorthSouth ns;
  Bundle<double> b{ns.system(), circle::sampler(1), circle::perturber(), ns.bracket(), ns.bowen_bracket(), {}, 20, {}, {}, {}};
  // the north-south bracket satisfies only the identity and hyperbolic axioms
  b.informational = {"associativity", "f-invariance", "uniform-contraction", "shift-inv", "dyn-inv"};
  b.counterexamples = [ns](const RunConfig&) {
    BowenShadower<double> bw(ns.system(), ns.bowen_bracket());
    return std::vector<CheckReport>{ns_counterexample(ns, bw)};
  };
  return b;
}

Bundle<SeqPoint> shift_bundle(const SequenceSystem& S) {
  Bundle<SeqPoint> b{S.system(), S.sampler(1), S.perturber(), S.bracket(), S.bracket(), {}, 20, {}, {}, {}};
  b.fixed_methods.emplace("shift-canonical", shift_canonical_method(S));
  if (S.base == SequenceSystem::Base::Discrete && S.symbols == 2) {
    // the coordinate-wise diagram does not commute on a two-point base
    b.counterexamples = [S](const RunConfig& cfg) {
      CheckReport r;
      r.name = "coordinatewise-noncommuting(" + S.id() + ")";
      Rng rng(cfg.seed);
      bool found = false;
      for (int t = 0; t < 64 && !found; ++t) {
        std::vector<SeqPoint> v;
        for (int i = -4; i <= 4; ++i) v.push_back(S.random_point(rng, 3));
        const PseudoOrbit<SeqPoint> a(-4, v);
        if (!(shift_canonical_shadow(coordinatewise_shift(a)) == S.system().fwd(shift_canonical_shadow(a)))) {
          found = true;
          r.witness.emplace_back("trial", std::vector<double>{static_cast<double>(t)});
        }
      }
      r.observe(found ? 0.0 : -1.0);
      r.finalize();
      return std::vector<CheckReport>{r};
    };
  }
  return b;
}

Bundle<std::uint64_t> odometer_bundle(int digits) {
  const Odometer od{digits};
  Bundle<std::uint64_t> b{od.system(), od.sampler(1), od.perturber(), std::nullopt, std::nullopt, {}, 20, {}, {}, {}};
  return b;
}

/// Calls fn with the bundle named by id.
template <class Fn>
int with_system(const std::string& id, Fn&& fn) {
  if (id == "cat") return fn(cat_bundle());
  if (id == "ns-circle") return fn(ns_bundle());
  if (id == "shift-circle") return fn(shift_bundle(SequenceSystem::circle_base()));
  if (id.rfind("shift-", 0) == 0) return fn(shift_bundle(SequenceSystem::discrete(parse_suffix(id, "shift-"))));
  if (id.rfind("odometer-", 0) == 0) {
    const int d = parse_suffix(id, "odometer-");
    if (d > 62) throw ConfigError("odometer digits must be at most 62");
    return fn(odometer_bundle(d));
  }
  throw ConfigError("unknown system '" + id + "' (cat, ns-circle, shift-k, shift-circle, odometer-D)");
}

template <class P>
ShadowingMethod<P> make_method(const Bundle<P>& b, const RunConfig& cfg) {
  if (cfg.method == "bowen" || cfg.method == "symmetric-bowen") {
    if (!b.bowen_bracket) throw ConfigError("system '" + b.sys.id + "' has no hyperbolic bracket for Bowen iteration");
    BowenShadower<P> bw(b.sys, *b.bowen_bracket);
    bw.set_assert_lemmas(cfg.assert_lemmas);
    return bw.method(cfg.method == "symmetric-bowen");
  }
  if (cfg.method == "projection") return projection_method(b.sys, b.sys.diam);
  if (const auto it = b.fixed_methods.find(cfg.method); it != b.fixed_methods.end()) return it->second;
  throw ConfigError("method '" + cfg.method + "' is not available on system '" + b.sys.id + "'");
}

template <class P>
PseudoOrbit<P> generate_orbit(const Bundle<P>& b, const RunConfig& cfg, std::uint64_t stream = 0) {
  Rng rng(stream == 0 ? cfg.seed : mix_seed(cfg.seed, stream));
  GenParams g;
  g.schedule = schedule_from_string(cfg.schedule);
  g.delta = cfg.delta;
  g.lo = -cfg.window;
  g.hi = cfg.window;
  g.quiet_radius = cfg.quiet_radius;
  const P x0 = b.sampler.point(rng.bits());
  return generate(b.sys, b.perturb, x0, g, rng);
}

/// The config as embedded in outputs; the output path is left out so that
/// the same run written to two places is byte-identical.
json provenance(RunConfig cfg) {
  cfg.out.clear();
  return to_json(cfg);
}

template <class P>
json discrepancy_json(const MetricSystem<P>& sys, const PseudoOrbit<P>& x) {
  const auto d2 = discrepancy2(sys, x);
  return json{{"D1", discrepancy1(sys, x)}, {"D2", d2.value}, {"D2_tail", d2.tail_bound}};
}

struct Entry {
  CheckReport report;
  bool mandatory = true;
};

bool mandatory_failed(const std::vector<Entry>& es) {
  for (const auto& e : es)
    if (e.mandatory && !e.report.passed) return true;
  return false;
}

void emit(const std::vector<Entry>& es, const std::string& out) {
  std::string lines;
  for (const auto& e : es) {
    json j = to_json(e.report);
    j["mandatory"] = e.mandatory;
    lines += j.dump() + "\n";
    std::cout << summary_line(e.report) << (e.mandatory ? "" : "  (informational)") << "\n";
  }
  if (!out.empty()) write_atomic(out, lines);
}

// Check suites ------------------------------------------------------------

const std::vector<std::string> kSuites = {"shadow-error", "certificate", "self-tuning", "shift-inv",      "dyn-inv",
                                          "bracket-axioms", "stability", "limit-decay", "counterexamples"};

template <class P>
std::vector<Entry> run_suite(const Bundle<P>& b, const RunConfig& cfg, const std::string& suite) {
  std::vector<Entry> out;
  auto add = [&](CheckReport r, const std::string& key) {
    const bool info = std::find(b.informational.begin(), b.informational.end(), key) != b.informational.end();
    out.push_back({std::move(r), !info});
  };
  auto skipped = [&](const std::string& why) {
    CheckReport r;
    r.name = suite + "(" + b.sys.id + ")";
    r.note = "not applicable: " + why;
    r.finalize();
    out.push_back({r, false});
  };
  const int runs = 16;

  if (suite == "bracket-axioms") {
    if (!b.bracket) {
      skipped("no bracket");
      return out;
    }
    const auto& br = *b.bracket;
    add(check_identity_axiom(br, b.sys, b.sampler, 512), "identity");
    add(check_associativity(br, b.sys, b.sampler, 512), "associativity");
    add(check_f_invariance(br, b.sys, b.sampler, 512), "f-invariance");
    add(check_hyperbolic(br, b.sys, b.sampler, b.hyperbolic_n, 512), "hyperbolic");
    add(check_uniform_contraction(br, b.sys, 1e-3, b.sampler, 20, 256), "uniform-contraction");
    return out;
  }
  if (suite == "counterexamples") {
    if (!b.counterexamples) {
      skipped("no bundled counterexample for this system");
      return out;
    }
    for (auto& r : b.counterexamples(cfg)) add(std::move(r), "counterexamples");
    return out;
  }

  const auto method = make_method(b, cfg);
  if (suite == "shadow-error" || suite == "certificate") {
    CheckReport r;
    r.name = suite + "(" + method.id + ", " + b.sys.id + ")";
    bool certified = true;
    for (int k = 0; k < runs; ++k) {
      const auto x = generate_orbit(b, cfg, static_cast<std::uint64_t>(k + 1));
      const auto res = method.run(x);
      if (!res.per_index_bound) {
        certified = false;
        break;
      }
      const auto& e = *res.per_index_error;
      for (int i = e.lo; i <= e.hi(); ++i) {
        if (suite == "shadow-error" && i != 0) continue;
        r.observe(res.per_index_bound->at(i) + res.tail_bound - e.at(i));
      }
    }
    r.finalize();
    if (!certified) {
      skipped("method '" + method.id + "' issues no per-index certificate");
      return out;
    }
    add(std::move(r), suite);
  } else if (suite == "self-tuning") {
    std::vector<SelfTuningCase<P>> cases;
    for (int k = 0; k < runs; ++k) cases.push_back({generate_orbit(b, cfg, static_cast<std::uint64_t>(k + 1)), {0}});
    add(check_self_tuning(method, b.sys, cases, {1e-2, 1e-3, 1e-4, 1e-5}, {1e-2, 1e-3, 1e-4}), suite);
  } else if (suite == "shift-inv") {
    const int h = std::min(4, cfg.window);
    for (int k = 0; k < 4; ++k)
      add(check_shift_invariance(method, b.sys, generate_orbit(b, cfg, static_cast<std::uint64_t>(k + 1)), -h, h,
                                 std::max(cfg.tol, b.sys.tol)),
          suite);
  } else if (suite == "dyn-inv") {
    std::vector<PseudoOrbit<P>> xs;
    for (int k = 0; k < runs; ++k) xs.push_back(generate_orbit(b, cfg, static_cast<std::uint64_t>(k + 1)));
    add(check_dyn_invariance(method, b.sys, xs, std::max(cfg.tol, b.sys.tol)), suite);
  } else if (suite == "stability") {
    if (!b.stability) {
      skipped("no bundled C0 perturbation for this system");
      return out;
    }
    for (auto& r : b.stability(cfg, method)) add(std::move(r), suite);
  } else if (suite == "limit-decay") {
    RunConfig c = cfg;
    c.schedule = "geometric-decay";
    for (int k = 0; k < 4; ++k) {
      auto r = limit_shadow_decay(method, generate_orbit(b, c, static_cast<std::uint64_t>(k + 1)));
      if (!r.note.empty() && r.samples == 0) {
        skipped(r.note);
        return out;
      }
      add(std::move(r), suite);
    }
  } else {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  return out;
}

// Subcommands -------------------------------------------------------------

void write_or_print(const std::string& out, const json& j) {
  const std::string s = j.dump(2) + "\n";
  if (out.empty())
    std::cout << s;
  else
    write_atomic(out, s);
}

int cmd_gen(const RunConfig& cfg) {
  return with_system(cfg.system, [&](const auto& b) {
    const auto x = generate_orbit(b, cfg);
    json j = to_json(x, b.sys.id);
    j["discrepancy"] = discrepancy_json(b.sys, x);
    j["config"] = provenance(cfg);
    write_or_print(cfg.out, j);
    return 0;
  });
}

int cmd_shadow(RunConfig cfg, const std::string& orbit_file) {
  std::optional<json> in;
  if (!orbit_file.empty()) {
    in = json::parse(read_file(orbit_file));
    cfg.system = in->at("system_id").get<std::string>();
  }
  return with_system(cfg.system, [&](const auto& b) {
    using P = std::decay_t<decltype(b.sys.fwd(b.sampler.point(0)))>;
    const auto x = in ? pseudo_orbit_from_json<P>(*in) : generate_orbit(b, cfg);
    const auto m = make_method(b, cfg);
    json j = to_json(m.run(x));
    j["system_id"] = b.sys.id;
    j["method"] = m.id;
    j["config"] = provenance(cfg);
    write_or_print(cfg.out, j);
    return 0;
  });
}

int cmd_verify(const RunConfig& cfg) {
  return with_system(cfg.system, [&](const auto& b) {
    std::vector<std::string> suites;
    if (cfg.suite == "all")
      suites = kSuites;
    else
      suites = {cfg.suite};
    std::vector<Entry> all;
    for (const auto& s : suites) {
      // "all" skips method-based suites the system cannot run rather than failing
      try {
        for (auto& e : run_suite(b, cfg, s)) all.push_back(std::move(e));
      } catch (const ConfigError& e) {
        if (cfg.suite != "all") throw;
        CheckReport r;
        r.name = s + "(" + b.sys.id + ")";
        r.note = std::string("not applicable: ") + e.what();
        r.finalize();
        all.push_back({r, false});
      }
    }
    emit(all, cfg.out);
    return mandatory_failed(all) ? 1 : 0;
  });
}

int cmd_stability(RunConfig cfg) {
  cfg.suite = "stability";
  if (cfg.system != "cat") throw ConfigError("the stability experiment is defined for the cat map only");
  return cmd_verify(cfg);
}

int cmd_report(const std::string& file, const std::string& csv) {
  const std::string text = read_file(file);
  const json first = json::parse(text.substr(0, text.find('\n')), nullptr, false);
  if (!first.is_discarded() && first.contains("samples")) {
    // JSON lines of check reports
    std::istringstream is(text);
    std::string line;
    int failed = 0, total = 0;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      const bool mandatory = j.value("mandatory", true);
      const bool passed = j.at("passed").get<bool>();
      ++total;
      if (mandatory && !passed) ++failed;
      std::printf("%-4s  %-56s samples=%-7lld worst_slack=%s%s\n", passed ? "PASS" : "FAIL",
                  j.at("name").get<std::string>().c_str(), j.at("samples").get<long long>(),
                  j.at("worst_slack").is_null() ? "inf" : j.at("worst_slack").dump().c_str(),
                  mandatory ? "" : "  (informational)");
    }
    std::printf("%d reports, %d mandatory failures\n", total, failed);
    return failed == 0 ? 0 : 1;
  }
  const json r = json::parse(text);
  if (!r.contains("per_index_error")) throw ConfigError("'" + file + "' is neither a report stream nor a shadow result");
  auto series = [](const json& s) {
    IndexedSeries v;
    v.lo = s.at("lo").get<int>();
    v.values = s.at("values").get<std::vector<double>>();
    return v;
  };
  std::vector<std::string> names = {"error"};
  std::vector<IndexedSeries> cols = {series(r["per_index_error"])};
  if (r.contains("per_index_bound") && !r["per_index_bound"].is_null()) {
    names.push_back("bound");
    cols.push_back(series(r["per_index_bound"]));
  }
  const std::string body = series_csv(names, cols);
  if (csv.empty())
    std::cout << body;
  else
    write_atomic(csv, body);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shadowkit: constructive shadowing experiments"};
  app.require_subcommand(1);

  std::string config_file;
  RunConfig flags;
  std::string orbit_file, report_file, csv_file;
  std::optional<std::uint64_t> seed;
  std::optional<bool> assert_lemmas;

  // flag values override the config file, which overrides the defaults
  auto common = [&](CLI::App* c) {
    c->add_option("--config", config_file, "JSON run configuration");
    c->add_option("--system", flags.system, "cat | ns-circle | shift-k | shift-circle | odometer-D");
    c->add_option("--method", flags.method, "bowen | symmetric-bowen | projection | oracle | shift-canonical");
    c->add_option("--seed", seed, "RNG seed (overrides SHADOWKIT_SEED and the config)");
    c->add_option("--window", flags.window, "pseudo-orbits live on [-window, window]");
    c->add_option("--delta", flags.delta, "jump size");
    c->add_option("--schedule", flags.schedule, "constant | one-spike | geometric-decay | quiet-window");
    c->add_option("--quiet-radius", flags.quiet_radius, "jumps vanish on |i| <= radius for quiet-window");
    c->add_option("--suite", flags.suite, "all | shadow-error | certificate | self-tuning | shift-inv | dyn-inv | "
                                          "bracket-axioms | stability | limit-decay | counterexamples");
    c->add_option("--grid", flags.grid, "grid side for the stability experiment");
    c->add_option("--tol", flags.tol, "tolerance for the invariance checks");
    c->add_option("--assert-lemmas", assert_lemmas, "check the stage bounds during Bowen iteration (default true)");
    c->add_option("--out", flags.out, "output file, written atomically");
  };
  auto* gen = app.add_subcommand("gen", "generate a seeded pseudo-orbit with its discrepancies");
  auto* shadow = app.add_subcommand("shadow", "shadow a pseudo-orbit with the selected method");
  auto* verify = app.add_subcommand("verify", "run a check suite; JSON lines to --out");
  auto* stability = app.add_subcommand("stability", "C0 stability experiment on the cat map");
  auto* report = app.add_subcommand("report", "summarize a report stream, or turn a shadow result into CSV");
  for (auto* c : {gen, shadow, verify, stability}) common(c);
  shadow->add_option("--orbit", orbit_file, "pseudo-orbit JSON from 'gen' (default: generate from the config)");
  report->add_option("file", report_file, "report stream or shadow result")->required();
  report->add_option("--csv", csv_file, "write the per-index series here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*report) return cmd_report(report_file, csv_file);

    // layering: defaults < config file < SHADOWKIT_SEED < flags
    RunConfig cfg;
    if (!config_file.empty()) cfg = run_config_from_json(json::parse(read_file(config_file)));
    if (const char* env = std::getenv("SHADOWKIT_SEED")) {
      try {
        cfg.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("SHADOWKIT_SEED='") + env + "' is not an unsigned integer");
      }
    }
    const RunConfig defaults;
    auto take = [](auto& dst, const auto& flag, const auto& def) {
      if (!(flag == def)) dst = flag;
    };
    take(cfg.system, flags.system, defaults.system);
    take(cfg.method, flags.method, defaults.method);
    take(cfg.schedule, flags.schedule, defaults.schedule);
    take(cfg.window, flags.window, defaults.window);
    take(cfg.delta, flags.delta, defaults.delta);
    take(cfg.quiet_radius, flags.quiet_radius, defaults.quiet_radius);
    take(cfg.suite, flags.suite, defaults.suite);
    take(cfg.grid, flags.grid, defaults.grid);
    take(cfg.tol, flags.tol, defaults.tol);
    take(cfg.out, flags.out, defaults.out);
    if (seed) cfg.seed = *seed;
    if (assert_lemmas) cfg.assert_lemmas = *assert_lemmas;
    if (cfg.window < 1) throw ConfigError("--window must be at least 1");
    if (!(cfg.delta >= 0.0)) throw ConfigError("--delta must be nonnegative");
    if (cfg.grid < 1) throw ConfigError("--grid must be at least 1");
    (void)schedule_from_string(cfg.schedule);

    if (*gen) return cmd_gen(cfg);
    if (*shadow) return cmd_shadow(cfg, orbit_file);
    if (*verify) return cmd_verify(cfg);
    if (*stability) return cmd_stability(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const AdmissibilityError& e) {
    std::cerr << "inadmissible input: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const LemmaViolation& e) {
    std::cerr << "stage bound violated: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
