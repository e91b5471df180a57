#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include <spdlog/spdlog.h>

#include "dvsg/errors.hpp"
#include "dvsg/feynman_kac.hpp"
#include "dvsg/generator.hpp"
#include "dvsg/hohenberg_kohn.hpp"
#include "dvsg/multiparticle.hpp"
#include "dvsg/rate_function.hpp"
#include "dvsg/semigroup.hpp"
#include "dvsg/spectral.hpp"
#include "dvsg/version.hpp"

namespace dvsg::cli {

namespace {

Json vec(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Json mat(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec(m.row(i).transpose()));
  return out;
}

// Everything a task needs, built once per scenario.
struct Context {
  const Scenario& s;
  TensorSystem sys;
  Potential v0;     // interaction on d^N
  Potential v;      // single-particle potential
  Potential total;  // V0 + sep(v): the potential of the full system
  std::optional<GroundData> ground;

  explicit Context(const Scenario& sc)
      : s(sc),
        sys(kronecker_sum(validate_generator(sc.q, sc.tol.row_sum), static_cast<std::size_t>(sc.particles))),
        v0(Potential::zero(static_cast<Eigen::Index>(sys.states()))),
        v(sc.v) {
    if (sc.v0_flat) v0 = Potential(*sc.v0_flat);
    if (sc.v0_pairwise) v0 = pairwise_interaction(*sc.v0_pairwise, sys);
    total = v0 + separable_potential(v, sys);
  }

  const Generator& q() const { return sys.product(); }

  SpectralOptions spectral_options() const {
    SpectralOptions o;
    o.residual_tolerance = s.tol.eigen;
    return o;
  }

  const GroundData& gd() {
    if (!ground) ground = principal_eigen(q(), total, spectral_options());
    return *ground;
  }

  ProbMeasure measure_option(const TaskSpec& t, const char* key, const ProbMeasure& fallback,
                             Eigen::Index dim) const {
    const auto w = option_vector(t, key);
    if (!w) return fallback;
    if (w->size() != dim)
      throw ConfigError("expected " + std::to_string(dim) + " entries", t.pointer + "/" + key);
    try {
      return ProbMeasure(*w);
    } catch (const Error& e) {
      throw ConfigError(e.what(), t.pointer + "/" + key);
    }
  }

  Vector site_vector_option(const TaskSpec& t, const char* key) const {
    const auto w = option_vector(t, key);
    if (!w) throw ConfigError(std::string("task ") + t.name + " needs '" + key + "'", t.pointer);
    if (static_cast<std::size_t>(w->size()) != sys.sites())
      throw ConfigError("expected " + std::to_string(sys.sites()) + " entries", t.pointer + "/" + key);
    return *w;
  }
};

Json task_validate(Context& c, const TaskSpec& t) {
  const double horizon = option_number(t, "horizon", 1.0);
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive", t.pointer + "/horizon");
  Json r;
  r["sites"] = c.sys.sites();
  r["particles"] = c.sys.particles();
  r["states"] = c.sys.states();
  r["scale"] = number(c.q().scale());
  r["horizon"] = number(horizon);
  r["condition_A_epsilon"] = number(check_condition_A(c.q(), horizon));
  r["condition_B"] = check_condition_B(c.q(), horizon);
  r["condition_D"] = check_condition_D(c.q());
  r["strongly_connected"] = strongly_connected(c.q());
  return r;
}

Json task_spectral(Context& c, const TaskSpec& t) {
  const GroundData& gd = c.gd();
  Json r;
  r["lambda"] = number(gd.lambda);
  r["psi"] = vec(gd.psi);
  r["pi"] = vec(gd.pi.weights());
  r["mu"] = vec(gd.mu.weights());
  r["residual"] = number(gd.residual);
  r["iterations"] = gd.iterations;
  if (option_bool(t, "dual", false)) {
    DualOptions o;
    o.seed = c.s.seed;
    const DualResult dual = dv_sup(c.q(), c.total, o);
    r["dual_lambda"] = number(dual.lambda_hat);
    r["dual_gap"] = number(std::abs(dual.lambda_hat - gd.lambda));
    r["dual_within_tolerance"] = std::abs(dual.lambda_hat - gd.lambda) <= c.s.tol.dual;
  }
  if (option_bool(t, "doob", false)) {
    const Generator d = doob_transform(c.q(), c.total, gd);
    r["doob_generator"] = mat(d.rates());
    r["doob_row_sum_max"] = number(d.rates().rowwise().sum().cwiseAbs().maxCoeff());
    r["doob_invariance_residual"] =
        number((gd.mu.weights().transpose() * d.rates()).cwiseAbs().maxCoeff());
  }
  return r;
}

Json task_rate(Context& c, const TaskSpec& t) {
  const auto n = static_cast<Eigen::Index>(c.sys.states());
  const ProbMeasure mu = c.measure_option(t, "mu", ProbMeasure::uniform(n), n);
  RateOptions o;
  o.tolerance = c.s.tol.rate;
  o.boundary = BoundaryPolicy::kRestrict;
  const RateResult rr = rate_I(c.q(), mu, o);
  const GroundData& gd = c.gd();
  Json r;
  r["mu"] = vec(mu.weights());
  r["I"] = number(rr.value);
  r["I_V"] = number(rr.value - mu.integrate(c.total.values()) + gd.lambda);
  r["lambda"] = number(gd.lambda);
  r["iterations"] = rr.iterations;
  r["gradient_norm"] = number(rr.gradient_norm);
  r["relative_entropy_to_ground_measure"] = number(relative_entropy(mu, gd.pi));
  if (option_bool(t, "legendre", false)) {
    LegendreOptions lo;
    lo.gradient_tolerance = c.s.tol.legendre;
    r["I_legendre"] = number(legendre_I(c.q(), mu, lo).value);
  }
  return r;
}

Json task_hk_verify(Context& c, const TaskSpec& t) {
  const Vector v2 = c.site_vector_option(t, "v2");
  const double tol = option_number(t, "tol", c.s.tol.hk);
  const HKReport h = hk_verify(c.sys, c.v0, c.v, Potential(v2), tol);
  spdlog::info("hk-verify: TV {:.3e}, residual {:.3e}, kappa {:.3e}", h.marginal_distance,
               h.potential_residual, h.kappa);
  Json r;
  r["v1"] = vec(c.v.values());
  r["v2"] = vec(v2);
  r["marginal_distance"] = number(h.marginal_distance);
  r["potential_residual"] = number(h.potential_residual);
  r["lambda1"] = number(h.lambda1);
  r["lambda2"] = number(h.lambda2);
  r["rho1"] = vec(h.rho1.weights());
  r["rho2"] = vec(h.rho2.weights());
  r["slack1"] = number(h.slack1);
  r["slack2"] = number(h.slack2);
  r["kappa"] = number(h.kappa);
  r["conclusion"] = std::string(to_string(h.conclusion));
  if (h.conclusion == HKConclusion::kViolation)
    throw Error("hk-verify reached the Violation conclusion");
  return r;
}

struct Partial : Error {
  Json result;
  Partial(const std::string& what, Json r) : Error(what), result(std::move(r)) {}
};

Json task_hk_invert(Context& c, const TaskSpec& t) {
  const auto d = static_cast<Eigen::Index>(c.sys.sites());
  std::optional<Vector> reference;
  ProbMeasure target;
  if (t.options.contains("rho_target")) {
    target = c.measure_option(t, "rho_target", ProbMeasure::uniform(d), d);
  } else {
    reference = t.options.contains("v_star") ? c.site_vector_option(t, "v_star") : c.v.values();
    target = equilibrium_marginal(c.sys, c.v0, Potential(*reference)).rho;
  }
  InversionOptions o;
  o.tolerance = c.s.tol.inversion;
  o.step = option_number(t, "step", o.step);
  o.max_iterations = option_int(t, "max_iterations", o.max_iterations);
  if (t.options.contains("initial")) o.initial = c.site_vector_option(t, "initial");
  o.throw_on_failure = false;
  const InversionResult inv = invert_potential(c.sys, c.v0, target, o);
  Json r;
  r["rho_target"] = vec(target.weights());
  r["v_recovered"] = vec(inv.v_recovered);
  r["iterations"] = inv.iterations;
  r["marginal_error"] = number(inv.marginal_error);
  r["converged"] = inv.converged;
  if (reference) {
    Vector ref = *reference;
    ref.array() -= ref.mean();
    r["recovery_error"] = number((inv.v_recovered - ref).cwiseAbs().maxCoeff());
  }
  if (!inv.converged) throw Partial("invert_potential did not reach the tolerance", r);
  return r;
}

Json task_ihk(Context& c, const TaskSpec& t) {
  const auto d = static_cast<Eigen::Index>(c.sys.sites());
  const ProbMeasure rho = t.options.contains("rho")
                              ? c.measure_option(t, "rho", ProbMeasure::uniform(d), d)
                              : equilibrium_marginal(c.sys, c.v0, c.v).rho;
  IhkOptions o;
  const IhkResult ih = i_hk(c.sys, c.v0, rho, o);
  Json r;
  r["rho"] = vec(rho.weights());
  r["value"] = number(ih.value);
  r["constraint_violation"] = number(ih.constraint_violation);
  r["outer_iterations"] = ih.outer_iterations;
  r["multipliers"] = vec(ih.multipliers);
  if (option_bool(t, "reduced", false)) {
    ReducedOptions ro;
    ro.tolerance = c.s.tol.reduced;
    const ReducedResult red = reduced_variational(c.sys, c.v0, c.v, ro);
    const ForwardResult fw = equilibrium_marginal(c.sys, c.v0, c.v);
    Json rr;
    rr["lambda_hat"] = number(red.lambda_hat);
    rr["lambda_spectral"] = number(fw.lambda);
    rr["gap"] = number(std::abs(red.lambda_hat - fw.lambda));
    rr["within_tolerance"] = std::abs(red.lambda_hat - fw.lambda) <= ro.tolerance;
    rr["lower_bound"] = number(red.lower_bound);
    rr["rho_star"] = vec(red.rho_star.weights());
    rr["rho_star_tv"] = number(total_variation(red.rho_star, fw.rho));
    rr["iterations"] = red.iterations;
    r["reduced"] = rr;
  }
  return r;
}

Json task_mc(Context& c, const TaskSpec& t, unsigned threads) {
  const double horizon = option_number(t, "t", 50.0);
  const int paths = option_int(t, "paths", 20000);
  std::uint64_t seed = c.s.seed;
  if (t.options.contains("seed")) {
    if (!t.options["seed"].is_number_unsigned())
      throw ConfigError("expected a nonnegative integer", t.pointer + "/seed");
    seed = t.options["seed"].get<std::uint64_t>();
  }
  const int task_threads = option_int(t, "threads", static_cast<int>(threads));
  if (!(horizon > 0.0)) throw ConfigError("t must be positive", t.pointer + "/t");
  if (paths < 2) throw ConfigError("paths must be at least 2", t.pointer + "/paths");
  const McEstimate mc = estimate_lambda(c.q(), c.total, horizon, static_cast<std::size_t>(paths), seed,
                                        static_cast<unsigned>(std::max(1, task_threads)));
  Json r;
  r["t"] = number(horizon);
  r["paths"] = paths;
  r["seed"] = seed;
  r["lambda_mc"] = number(mc.estimate);
  r["stderr"] = number(mc.std_error);
  r["lambda_spectral"] = number(c.gd().lambda);
  return r;
}

Json task_averaging(Context& c, const TaskSpec& t) {
  const std::vector<double> horizons =
      option_list(t, "horizons").value_or(std::vector<double>{1, 2, 4, 8, 16, 32});
  const double per_unit = option_number(t, "points_per_unit", 64.0);
  const GroundData& gd = c.gd();
  const auto n = static_cast<Eigen::Index>(c.sys.states());
  ProbMeasure mu0 = gd.mu;
  if (t.options.contains("mu0")) {
    const Json& j = t.options["mu0"];
    if (j.is_string() && j.get<std::string>() == "uniform") mu0 = ProbMeasure::uniform(n);
    else if (!(j.is_string() && j.get<std::string>() == "equilibrium"))
      mu0 = c.measure_option(t, "mu0", gd.mu, n);
  }
  const SchrodingerOperator op(c.q(), c.total);

  Json tv = Json::array(), entropy = Json::array(), log_c = Json::array();
  bool monotone = true;
  bool entropy_bound = true;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    const double horizon = horizons[k];
    if (!(horizon > 0.0))
      throw ConfigError("horizons must be positive", t.pointer + "/horizons/" + std::to_string(k));
    const int grid = std::max(2, static_cast<int>(std::ceil(per_unit * horizon)) + 1);
    const ProbMeasure bar = ground_measure_by_averaging(op, gd.lambda, mu0, horizon, grid);
    const double dist = total_variation(bar, gd.pi);
    std::vector<double> t_grid(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) t_grid[static_cast<std::size_t>(i)] = horizon * i / (grid - 1);
    const double bound = std::log(growth_bound(op, gd.lambda, t_grid));
    const double h = relative_entropy(mu0, bar);
    monotone = monotone && dist <= previous;
    entropy_bound = entropy_bound && h <= bound;
    previous = dist;
    tv.push_back(number(dist));
    entropy.push_back(number(h));
    log_c.push_back(number(bound));
  }
  Json r;
  r["horizons"] = vec(Eigen::Map<const Vector>(horizons.data(), static_cast<Eigen::Index>(horizons.size())));
  r["tv_to_ground_measure"] = tv;
  r["entropy"] = entropy;
  r["log_growth_bound"] = log_c;
  r["monotone"] = monotone;
  r["entropy_bound_holds"] = entropy_bound;
  return r;
}

Json dispatch(Context& c, const TaskSpec& t, const RunOptions& opts) {
  if (t.name == "validate") return task_validate(c, t);
  if (t.name == "spectral") return task_spectral(c, t);
  if (t.name == "rate") return task_rate(c, t);
  if (t.name == "hk-verify") return task_hk_verify(c, t);
  if (t.name == "hk-invert") return task_hk_invert(c, t);
  if (t.name == "ihk") return task_ihk(c, t);
  if (t.name == "mc") return task_mc(c, t, opts.threads);
  if (t.name == "averaging") return task_averaging(c, t);
  throw ConfigError("unknown task '" + t.name + "'", t.pointer);
}

Json error_entry(const std::exception& e) {
  Json j;
  j["type"] = error_kind(e);
  j["message"] = e.what();
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    if (!ce->key().empty()) j["key"] = ce->key();
    if (ce->line() > 0) j["line"] = ce->line();
  }
  return j;
}

void collect_arrays(const Json& node, const std::string& prefix, std::vector<std::pair<std::string, Json>>& out) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items()) collect_arrays(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (node.is_array() && !node.empty() && (node[0].is_number() || node[0].is_array())) {
    out.emplace_back(prefix, node);
  }
}

}  // namespace

Json number(double x) {
  if (std::isnan(x)) throw NonFinite("NaN in report");
  if (std::isinf(x)) return x > 0 ? "infinity" : "-infinity";
  return x;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const NegativeOffDiagonal*>(&e)) return "NegativeOffDiagonal";
  if (dynamic_cast<const RowSumNonzero*>(&e)) return "RowSumNonzero";
  if (dynamic_cast<const GraphDisconnected*>(&e)) return "GraphDisconnected";
  if (dynamic_cast<const NonFinite*>(&e)) return "NonFinite";
  if (dynamic_cast<const NegativeInput*>(&e)) return "NegativeInput";
  if (dynamic_cast<const NotIrreducible*>(&e)) return "NotIrreducible";
  if (dynamic_cast<const ConvergenceFailure*>(&e)) return "ConvergenceFailure";
  if (dynamic_cast<const NotConverged*>(&e)) return "NotConverged";
  if (dynamic_cast<const UnsupportedSupport*>(&e)) return "UnsupportedSupport";
  if (dynamic_cast<const StateSpaceTooLarge*>(&e)) return "StateSpaceTooLarge";
  if (dynamic_cast<const InfeasibleMarginal*>(&e)) return "InfeasibleMarginal";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "InternalError";
}

RunOutcome run_scenario(const Scenario& s, const RunOptions& opts) {
  RunOutcome out;
  Json& rep = out.report;
  rep["name"] = s.name;
  rep["version"] = kVersion;
  rep["config"] = s.source;
  rep["tasks"] = Json::array();

  std::optional<Context> ctx;
  try {
    ctx.emplace(s);
  } catch (const std::exception& e) {
    rep["error"] = error_entry(e);
    out.exit_code = dynamic_cast<const StateSpaceTooLarge*>(&e) ? kExitConfig : kExitComputation;
    return out;
  }

  for (const TaskSpec& t : s.tasks) {
    Json entry;
    entry["task"] = t.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      Json result = dispatch(*ctx, t, opts);
      entry["status"] = "ok";
      entry["result"] = std::move(result);
    } catch (const ConfigError& e) {
      entry["status"] = "error";
      entry["error"] = error_entry(e);
      out.exit_code = kExitConfig;
    } catch (const Partial& e) {
      entry["status"] = "error";
      entry["result"] = e.result;
      entry["error"] = error_entry(e);
      out.exit_code = std::max<int>(out.exit_code, kExitComputation);
    } catch (const std::exception& e) {
      entry["status"] = "error";
      entry["error"] = error_entry(e);
      out.exit_code = std::max<int>(out.exit_code, kExitComputation);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    spdlog::info("{}: task {} {} in {:.3f}s", s.name, t.name, entry["status"].get<std::string>(), seconds);
    if (opts.timings) entry["seconds"] = seconds;
    rep["tasks"].push_back(std::move(entry));
  }
  if (opts.csv_dir) write_csv(rep, *opts.csv_dir);
  return out;
}

void write_csv(const Json& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string base = report.value("name", std::string("scenario"));
  const Json& tasks = report["tasks"];
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!tasks[i].contains("result")) continue;
    std::vector<std::pair<std::string, Json>> arrays;
    collect_arrays(tasks[i]["result"], "", arrays);
    for (const auto& [field, values] : arrays) {
      const std::string file = base + "_" + std::to_string(i) + "_" + tasks[i]["task"].get<std::string>() + "_" +
                               field + ".csv";
      std::ofstream f(std::filesystem::path(dir) / file);
      if (values[0].is_array()) {
        for (const auto& row : values) {
          for (std::size_t k = 0; k < row.size(); ++k) f << (k ? "," : "") << row[k].dump();
          f << '\n';
        }
      } else {
        f << "index,value\n";
        for (std::size_t k = 0; k < values.size(); ++k) f << k << ',' << values[k].dump() << '\n';
      }
    }
  }
}

}  // namespace dvsg::cli
