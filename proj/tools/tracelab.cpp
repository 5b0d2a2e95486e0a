// tracelab: command-line front end for the norm, solver, stochastic and
// verification modules.  Exit status 0 on success, 1 when a verification
// policy fails, 2 on any configuration error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "tracelab/evolve.hpp"
#include "tracelab/harness.hpp"
#include "tracelab/report.hpp"
#include "tracelab/spaces.hpp"
#include "tracelab/stoch.hpp"

namespace {

using namespace tracelab;
using cli::ConfigError;
using cli::json;
using cli::Node;
using cli::number_or;
using report::JsonWriter;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

struct RunConfig {
  std::string command;
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  int refine = 0;
  std::string format = "json";
};

struct Output {
  std::string text;
  bool pass = true;
};

// ---------------------------------------------------------------- parsing

double number_or_inf(const Node& n) {
  if (n.raw().is_string()) {
    if (n.string() == "inf") return grid::kInf;
    throw n.error("expected a number or \"inf\"");
  }
  return n.number();
}

spaces::SpaceParams parse_space(const Node& n) {
  n.keys({"s", "p", "q", "gamma", "m"});
  spaces::SpaceParams sp;
  sp.s = number_or(n, "s", sp.s);
  sp.p = number_or(n, "p", sp.p);
  if (const auto q = n.find("q")) sp.q = number_or_inf(*q);
  sp.gamma = number_or(n, "gamma", sp.gamma);
  if (const auto m = n.find("m")) sp.m = static_cast<int>(m->integer_in(1, 8));
  return sp;
}

grid::Grid1D parse_time(const Node& n, int refine) {
  n.keys({"step", "count"});
  const double step = n.at("step").number_in(0.0, 1e6, true);
  const auto count = n.at("count").integer_in(1, 1 << 22);
  return grid::Grid1D::half_line(std::ldexp(step, -refine),
                                 static_cast<std::size_t>(count) << refine);
}

spaces::FourierField parse_geometry(const Node& n, int refine) {
  n.keys({"dim", "modes", "length"});
  const auto dim = n.find("dim") ? n.at("dim").integer_in(1, 2) : 1;
  const auto modes = n.at("modes").integer_in(2, 1 << 12);
  if (modes % 2 != 0) throw n.at("modes").error("modes per axis must be even");
  const double length = n.find("length") ? n.at("length").number_in(0.0, 1e6, true)
                                         : 2.0 * std::numbers::pi;
  return {static_cast<int>(dim), static_cast<int>(modes << refine), length};
}

spaces::Wavenumber parse_wavenumber(const Node& n, const spaces::FourierField& geom) {
  const auto items = n.items();
  if (items.empty() || items.size() > 2) throw n.error("expected [k0] or [k0, k1]");
  spaces::Wavenumber k{static_cast<int>(items[0].integer()), 0};
  if (items.size() == 2) k[1] = static_cast<int>(items[1].integer());
  if (geom.dim() == 1 && k[1] != 0) throw n.error("second component must be 0 in dimension 1");
  for (int c = 0; c < geom.dim(); ++c) {
    if (std::abs(k[c]) > geom.half()) throw n.error("wavenumber outside the resolved band");
  }
  return k;
}

harness::ProfileShape parse_shape(const Node& n) {
  using harness::ProfileShape;
  return n.choice<ProfileShape>({{"bump", ProfileShape::Bump},
                                 {"taper", ProfileShape::Taper},
                                 {"exponential", ProfileShape::Exponential},
                                 {"indicator", ProfileShape::Indicator}});
}

/// Time profile: constant, cosine(frequency) or one of the harness shapes.
std::function<double(double)> parse_profile(const Node& n) {
  n.keys({"shape", "width", "frequency"});
  const auto shape = n.at("shape").string();
  if (shape == "constant") return [](double) { return 1.0; };
  if (shape == "cosine") {
    const double nu = n.at("frequency").number();
    return [nu](double t) { return std::cos(nu * t); };
  }
  harness::TimeProfile p;
  p.shape = parse_shape(n.at("shape"));
  p.width = n.find("width") ? n.at("width").number_in(0.0, 1e6, true) : 1.0;
  return [p](double t) { return p(t); };
}

// ---------------------------------------------------------------- norms

Output run_norms(const Node& root, const RunConfig& rc) {
  root.keys({"schema_version", "function", "norms"});
  const auto fn = root.at("function");
  fn.keys({"step", "count", "values", "profile"});
  const double step0 = fn.at("step").number_in(0.0, 1e6, true);
  const auto count0 = fn.at("count").integer_in(1, 1 << 22);
  const auto g = grid::Grid1D::half_line(std::ldexp(step0, -rc.refine),
                                         static_cast<std::size_t>(count0) << rc.refine);
  grid::ScalarFunction f(g, std::vector<double>(g.count(), 0.0));
  if (fn.has("values") == fn.has("profile")) {
    throw fn.error("exactly one of \"values\" and \"profile\" is required");
  }
  if (const auto v = fn.find("values")) {
    if (rc.refine > 0) throw v->error("explicit samples cannot be refined");
    const auto items = v->items();
    if (items.size() != g.count()) throw v->error("expected " + std::to_string(g.count()) + " samples");
    for (std::size_t i = 0; i < items.size(); ++i) f[i] = items[i].number();
  } else {
    const auto prof = parse_profile(fn.at("profile"));
    for (std::size_t i = 0; i < g.count(); ++i) f[i] = prof(g.node(i));
  }

  JsonWriter w;
  w.begin_object();
  w.value("schema_version", cli::kSchemaVersion);
  w.value("report", "norms");
  w.begin_object("grid").value("step", g.step()).value("count", static_cast<std::uint64_t>(g.count())).end_object();
  w.begin_array("results");
  for (const auto& item : root.at("norms").items()) {
    const auto kind = item.at("kind").string();
    w.begin_object();
    w.value("kind", kind);
    if (kind == "lp") {
      item.keys({"kind", "p", "gamma"});
      const double p = number_or_inf(item.at("p"));
      const double gamma = number_or(item, "gamma", 0.0);
      w.exponent("p", p).value("gamma", gamma);
      w.value("value", grid::weighted_lp_norm(f, p, grid::PowerWeight(gamma)));
    } else if (kind == "seminorm") {
      item.keys({"kind", "s", "p", "q", "gamma", "m", "levels"});
      auto sub = json::object();
      for (const char* k : {"s", "p", "q", "gamma", "m"}) {
        if (item.raw().contains(k)) sub[k] = item.raw()[k];
      }
      const auto sp = parse_space(Node(sub, item.pointer()));
      std::optional<grid::DyadicLevels> levels;
      if (const auto lv = item.find("levels")) {
        const auto l = lv->items();
        if (l.size() != 2) throw lv->error("expected [j_min, j_max]");
        levels.emplace(static_cast<int>(l[0].integer()), static_cast<int>(l[1].integer()),
                       g.step());
      } else {
        levels.emplace(-static_cast<int>(std::ceil(std::log2(g.end() / g.step()))), 0, g.step());
      }
      const auto res = spaces::tl_seminorm(f, sp, *levels);
      w.value("s", sp.s).value("p", sp.p).exponent("q", sp.q).value("gamma", sp.gamma).value("m", sp.m);
      w.value("value", res.value);
      w.value("levels_used", res.levels_used).value("levels_truncated", res.levels_truncated);
    } else if (kind == "cbmu") {
      item.keys({"kind", "mu"});
      const double mu = item.at("mu").number();
      w.value("mu", mu).value("value", grid::cbmu_norm(f, mu));
    } else if (kind == "bessel") {
      item.keys({"kind", "s", "p", "gamma"});
      const double s = item.at("s").number();
      const double p = item.at("p").number();
      const double gamma = number_or(item, "gamma", 0.0);
      w.value("s", s).value("p", p).value("gamma", gamma);
      w.value("value", spaces::bessel_norm(f, s, p, grid::PowerWeight(gamma)));
    } else {
      throw item.at("kind").error("unknown norm kind '" + kind + "'");
    }
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return {w.str(), true};
}

// ---------------------------------------------------------------- solve

Output run_solve(const Node& root, const RunConfig& rc) {
  root.keys({"schema_version", "alpha", "beta", "p", "q", "gamma", "starting", "time", "space",
             "forcing", "trace_norms"});
  const auto time = parse_time(root.at("time"), rc.refine);
  const auto geom = parse_geometry(root.at("space"), rc.refine);
  const double beta = root.at("beta").number_in(0.0, 1e3, true);
  evolve::SpaceTimeField f(time, geom);
  for (const auto& term : root.at("forcing").items()) {
    term.keys({"k", "re", "im", "profile"});
    const auto k = parse_wavenumber(term.at("k"), geom);
    const spaces::cplx a(number_or(term, "re", 0.0), number_or(term, "im", 0.0));
    const auto prof = parse_profile(term.at("profile"));
    auto& pos = f.mode(geom.index(k));
    // Real forcing: the conjugate amplitude sits on -k.
    const bool self = k[0] == 0 && k[1] == 0;
    auto& neg = f.mode(geom.index({-k[0], -k[1]}));
    for (std::size_t n = 0; n < time.count(); ++n) {
      const spaces::cplx v = a * prof(time.node(n));
      if (self) {
        pos[n] += v.real();
      } else {
        pos[n] += v;
        neg[n] += std::conj(v);
      }
    }
  }
  evolve::VolterraProblem prob{.alpha = root.at("alpha").number(),
                               .op = evolve::SpectralOperator(geom, beta),
                               .forcing = std::move(f)};
  prob.p = number_or(root, "p", prob.p);
  prob.q = number_or(root, "q", prob.q);
  prob.gamma = number_or(root, "gamma", prob.gamma);
  if (const auto s = root.find("starting")) prob.starting = static_cast<std::size_t>(s->integer_in(0, 8));
  const bool traces = root.find("trace_norms") ? root.at("trace_norms").boolean() : true;

  const auto u = evolve::volterra_solve(prob);
  const auto r = evolve::maxreg_trace_report(prob, u, traces);

  JsonWriter w;
  w.begin_object();
  w.value("schema_version", cli::kSchemaVersion);
  w.value("report", "solve");
  w.value("alpha", r.alpha).value("beta", r.beta).value("p", r.p).exponent("q", r.q);
  w.value("gamma", r.gamma);
  w.begin_object("time").value("step", time.step()).value("count", static_cast<std::uint64_t>(time.count())).end_object();
  w.value("modes", geom.modes());
  w.value("derivative_norm", r.derivative_norm);
  w.value("operator_norm", r.operator_norm);
  w.value("forcing_norm", r.forcing_norm);
  w.value("maxreg_ratio", r.maxreg_ratio());
  w.value("residual", r.residual);
  w.begin_array("trace");
  for (const auto& t : r.trace) {
    if (!t) continue;
    w.begin_object();
    w.value("order", t->order).value("delta", t->delta).value("epsilon", t->epsilon);
    w.value("sup_norm", t->sup_norm).value("weighted_sup_norm", t->weighted_sup_norm);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return {w.str(), true};
}

// ---------------------------------------------------------------- stoch

Output run_stoch(const Node& root, const RunConfig& rc) {
  root.keys({"schema_version", "beta", "p", "a", "q", "paths", "seed", "diagnostic", "time", "space",
             "noise", "thetas", "trace_norms"});
  const auto time = parse_time(root.at("time"), rc.refine);
  const auto geom = parse_geometry(root.at("space"), 0);
  const double beta = root.at("beta").number_in(0.0, 1e3, true);
  std::vector<double> g(geom.size(), 0.0);
  for (const auto& term : root.at("noise").items()) {
    term.keys({"k", "g"});
    g[geom.index(parse_wavenumber(term.at("k"), geom))] = term.at("g").number();
  }
  stoch::StochProblem prob{.op = evolve::SpectralOperator(geom, beta), .g = g, .time = time};
  prob.p = number_or(root, "p", prob.p);
  prob.a = number_or(root, "a", prob.a);
  prob.q = number_or(root, "q", prob.q);
  if (const auto n = root.find("paths")) {
    prob.paths = static_cast<std::size_t>(n->integer_in(2, 1 << 24)) << rc.refine;
  }
  if (const auto s = root.find("seed")) prob.seed = s->unsigned_integer();
  if (rc.seed) prob.seed = *rc.seed;
  if (const auto d = root.find("diagnostic")) prob.diagnostic = d->boolean();
  stoch::SmrOptions opt;
  if (const auto th = root.find("thetas")) {
    opt.thetas.clear();
    for (const auto& t : th->items()) opt.thetas.push_back(t.number_in(0.0, 0.5, false, true));
  }
  if (const auto tn = root.find("trace_norms")) opt.trace_norms = tn->boolean();

  const auto ens = stoch::simulate_ensemble(prob);
  const auto r = stoch::smr_report(prob, ens, opt);

  JsonWriter w;
  w.begin_object();
  w.value("schema_version", cli::kSchemaVersion);
  w.value("report", "stoch");
  w.value("beta", beta).value("p", prob.p).value("a", prob.a).exponent("q", prob.q);
  w.value("seed", prob.seed).value("paths", static_cast<std::uint64_t>(prob.paths));
  w.begin_object("time").value("step", time.step()).value("count", static_cast<std::uint64_t>(time.count())).end_object();
  w.value("noise_norm", r.noise_norm);
  w.value("trace_skipped", r.trace_skipped);
  w.begin_array("stats");
  for (const auto& s : r.stats) {
    w.begin_object();
    w.value("name", s.name).value("theta", s.theta).value("mean", s.mean);
    w.value("std_error", s.std_error).value("paths", static_cast<std::uint64_t>(s.paths));
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return {w.str(), true};
}

// ---------------------------------------------------------------- verify

harness::FamilySpec parse_family(const Node& n, const RunConfig& rc) {
  using harness::FamilyKind;
  n.keys({"kind", "seed", "size", "profile", "width", "band", "decay", "terms", "lambda"});
  harness::FamilySpec s;
  s.kind = n.at("kind").choice<FamilyKind>({{"band_limited", FamilyKind::BandLimited},
                                            {"scaled_bump", FamilyKind::ScaledBump},
                                            {"tensor", FamilyKind::Tensor}});
  if (const auto v = n.find("seed")) s.seed = v->unsigned_integer();
  if (rc.seed) s.seed = *rc.seed;
  if (const auto v = n.find("size")) s.size = static_cast<std::size_t>(v->integer_in(1, 10000));
  if (const auto v = n.find("profile")) s.profile = parse_shape(*v);
  if (const auto v = n.find("width")) {
    const auto r = v->items();
    if (r.size() != 2) throw v->error("expected [min, max]");
    s.width_min = r[0].number_in(0.0, 1e6, true);
    s.width_max = r[1].number_in(0.0, 1e6, true);
    if (s.width_min > s.width_max) throw v->error("empty width range");
  }
  if (const auto v = n.find("band")) s.band = static_cast<int>(v->integer_in(1, 1 << 12));
  s.band <<= rc.refine;
  if (const auto v = n.find("decay")) s.decay = v->number();
  if (const auto v = n.find("terms")) s.terms = static_cast<int>(v->integer_in(1, 64));
  if (const auto v = n.find("lambda")) {
    const auto r = v->items();
    if (r.size() != 2) throw v->error("expected [j_min, j_max] for lambda = 2^j");
    s.lambda_min = static_cast<int>(r[0].integer_in(-20, 20));
    s.lambda_max = static_cast<int>(r[1].integer_in(-20, 20));
    if (s.lambda_min > s.lambda_max) throw v->error("empty dilation range");
  }
  return s;
}

harness::CheckSpec parse_check(const Node& n, const RunConfig& rc) {
  using harness::CheckKind;
  n.keys({"kind", "space0", "space1", "k", "theta", "interp_p", "theta0", "theta1", "p_theta0",
          "p_theta1", "eta", "hardy_p", "hardy_beta", "sigmas", "couple", "tau", "refine",
          "extent", "panels", "policy"});
  harness::CheckSpec c;
  c.kind = n.at("kind").choice<CheckKind>({{"Scaling", CheckKind::Scaling},
                                           {"HardyYoung", CheckKind::HardyYoung},
                                           {"Decomposition", CheckKind::Decomposition},
                                           {"Trace", CheckKind::Trace},
                                           {"Sobolev", CheckKind::Sobolev},
                                           {"MixedDerivative", CheckKind::MixedDerivative},
                                           {"Reiteration", CheckKind::Reiteration},
                                           {"Regularization", CheckKind::Regularization}});
  if (const auto v = n.find("space0")) c.space0 = parse_space(*v);
  if (const auto v = n.find("space1")) c.space1 = parse_space(*v);
  if (const auto v = n.find("k")) c.k = static_cast<int>(v->integer_in(0, 1));
  c.theta = number_or(n, "theta", c.theta);
  c.interp_p = number_or(n, "interp_p", c.interp_p);
  c.theta0 = number_or(n, "theta0", c.theta0);
  c.theta1 = number_or(n, "theta1", c.theta1);
  c.p_theta0 = number_or(n, "p_theta0", c.p_theta0);
  c.p_theta1 = number_or(n, "p_theta1", c.p_theta1);
  c.eta = number_or(n, "eta", c.eta);
  c.hardy_p = number_or(n, "hardy_p", c.hardy_p);
  c.hardy_beta = number_or(n, "hardy_beta", c.hardy_beta);
  if (const auto v = n.find("sigmas")) {
    c.sigmas.clear();
    for (const auto& s : v->items()) c.sigmas.push_back(s.number_in(0.0, 1e6, true));
  }
  if (const auto v = n.find("couple")) {
    v->keys({"a0", "a1", "qc"});
    c.couple.a0 = number_or(*v, "a0", c.couple.a0);
    c.couple.a1 = number_or(*v, "a1", c.couple.a1);
    c.couple.qc = number_or(*v, "qc", c.couple.qc);
  }
  c.tau = std::ldexp(number_or(n, "tau", c.tau), -rc.refine);
  if (const auto v = n.find("refine")) c.refine = static_cast<int>(v->integer_in(0, 6));
  c.extent = number_or(n, "extent", c.extent);
  if (const auto v = n.find("panels")) c.panels = static_cast<int>(v->integer_in(1, 4096)) << rc.refine;
  if (const auto v = n.find("policy")) {
    v->keys({"max_ratio", "max_spread", "stability", "tolerance"});
    c.policy.max_ratio = number_or(*v, "max_ratio", c.policy.max_ratio);
    c.policy.max_spread = number_or(*v, "max_spread", c.policy.max_spread);
    c.policy.stability = number_or(*v, "stability", c.policy.stability);
    if (const auto t = v->find("tolerance")) c.policy.tolerance = t->number();
  }
  return c;
}

Output run_verify(const Node& root, const RunConfig& rc) {
  root.keys({"schema_version", "family", "check"});
  const auto family = harness::gen_family(parse_family(root.at("family"), rc));
  const auto check = parse_check(root.at("check"), rc);
  const auto rep = harness::run_check(check, family);
  return {rc.format == "csv" ? report::to_csv(rep) : report::to_json(rep), rep.pass};
}

// ---------------------------------------------------------------- driver

int run(const RunConfig& rc) {
  std::ifstream in(rc.config_path, std::ios::binary);
  if (!in) {
    std::cerr << "tracelab: cannot read '" << rc.config_path << "'\n";
    return kExitConfig;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    const json doc = json::parse(buf.str());
    const Node root(doc, "");
    cli::check_schema_version(root);
    if (rc.format == "csv" && rc.command != "verify") {
      throw ConfigError("", "csv output is only available for verify");
    }
    Output out;
    if (rc.command == "norms") {
      out = run_norms(root, rc);
    } else if (rc.command == "solve") {
      out = run_solve(root, rc);
    } else if (rc.command == "stoch") {
      out = run_stoch(root, rc);
    } else {
      out = run_verify(root, rc);
    }
    if (rc.out.empty()) {
      std::cout << out.text;
    } else {
      report::write_file(rc.out, out.text);
    }
    if (!out.pass) {
      std::cerr << "tracelab: check failed\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  } catch (const json::parse_error& e) {
    std::cerr << "tracelab: malformed JSON in '" << rc.config_path << "': " << e.what() << "\n";
  } catch (const ConfigError& e) {
    std::cerr << "tracelab: configuration error at " << e.what() << "\n";
  } catch (const HypothesisError& e) {
    std::cerr << "tracelab: hypotheses not met: " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "tracelab: " << e.what() << "\n";
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracelab: trace-space norms, fractional solvers and inequality checks"};
  app.require_subcommand(1, 1);
  RunConfig rc;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"norms", "Norms of a sampled time function"},
      {"solve", "Fractional evolution solve with maximal-regularity report"},
      {"stoch", "Stochastic ensemble with maximal-regularity statistics"},
      {"verify", "Generate a test family and check an inequality over it"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", rc.config_path, "JSON configuration document")->required();
    sub->add_option("--out", rc.out, "Output path (stdout when absent)");
    sub->add_option("--seed", rc.seed, "Override the configured seed");
    sub->add_option("--refine", rc.refine, "Halve the time step and double the resolution N times")
        ->check(CLI::Range(0, 8));
    sub->add_option("--format", rc.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->callback([&rc, name = name] { rc.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  return run(rc);
}
