#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dvsg/errors.hpp"
#include "dvsg/generator.hpp"
#include "dvsg/multiparticle.hpp"
#include "dvsg/tolerances.hpp"

namespace dvsg::cli {

namespace {

const std::set<std::string> kTopKeys = {"name", "Q", "V", "v", "N", "V0", "tasks", "seed", "tolerances"};

const std::map<std::string, std::set<std::string>> kTaskKeys = {
    {"validate", {"horizon"}},
    {"spectral", {"dual", "doob"}},
    {"rate", {"mu", "legendre"}},
    {"hk-verify", {"v2", "tol"}},
    {"hk-invert", {"rho_target", "v_star", "step", "max_iterations", "initial"}},
    {"ihk", {"rho", "reduced"}},
    {"mc", {"t", "paths", "seed", "threads"}},
    {"averaging", {"horizons", "points_per_unit", "mu0"}},
};

std::string last_token(const std::string& pointer) {
  const auto slash = pointer.find_last_of('/');
  return slash == std::string::npos ? pointer : pointer.substr(slash + 1);
}

[[noreturn]] void fail(const Scenario& s, const std::string& pointer, const std::string& message) {
  throw ConfigError(message, pointer, locate_key(s.text, last_token(pointer)));
}

double number_at(const Scenario& s, const Json& j, const std::string& pointer) {
  if (!j.is_number()) fail(s, pointer, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(s, pointer, "expected a finite number");
  return x;
}

Vector vector_at(const Scenario& s, const Json& j, const std::string& pointer) {
  if (!j.is_array() || j.empty()) fail(s, pointer, "expected a non-empty array of numbers");
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = number_at(s, j[i], pointer + "/" + std::to_string(i));
  return out;
}

Matrix matrix_at(const Scenario& s, const Json& j, const std::string& pointer) {
  if (!j.is_array() || j.empty()) fail(s, pointer, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string rp = pointer + "/" + std::to_string(i);
    const Vector row = vector_at(s, j[i], rp);
    if (static_cast<std::size_t>(row.size()) != rows)
      fail(s, rp, "matrix must be square: row has " + std::to_string(row.size()) + " entries, expected " +
                      std::to_string(rows));
    out.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return out;
}

void parse_tolerances(Scenario& s, const Json& j) {
  if (!j.is_object()) fail(s, "/tolerances", "expected an object");
  const std::map<std::string, double*> slots = {
      {"row_sum", &s.tol.row_sum},   {"eigen", &s.tol.eigen},         {"rate", &s.tol.rate},
      {"dual", &s.tol.dual},         {"legendre", &s.tol.legendre},   {"inversion", &s.tol.inversion},
      {"hk", &s.tol.hk},             {"reduced", &s.tol.reduced},     {"symmetry", &s.tol.symmetry},
  };
  for (const auto& [key, value] : j.items()) {
    const std::string p = "/tolerances/" + key;
    const auto it = slots.find(key);
    if (it == slots.end()) fail(s, p, "unknown tolerance '" + key + "'");
    const double x = number_at(s, value, p);
    if (!(x > 0.0)) fail(s, p, "tolerance must be positive");
    *it->second = x;
  }
}

void parse_tasks(Scenario& s, const Json& j) {
  if (!j.is_array()) fail(s, "/tasks", "expected an array of task names or objects");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = "/tasks/" + std::to_string(i);
    TaskSpec t;
    t.pointer = p;
    if (j[i].is_string()) {
      t.name = j[i].get<std::string>();
    } else if (j[i].is_object()) {
      if (!j[i].contains("task") || !j[i]["task"].is_string())
        fail(s, p + "/task", "task object needs a string 'task' entry");
      t.name = j[i]["task"].get<std::string>();
      for (const auto& [key, value] : j[i].items())
        if (key != "task") t.options[key] = value;
    } else {
      fail(s, p, "expected a task name or object");
    }
    const auto allowed = kTaskKeys.find(t.name);
    if (allowed == kTaskKeys.end()) fail(s, p, "unknown task '" + t.name + "'");
    for (const auto& [key, value] : t.options.items())
      if (!allowed->second.count(key)) fail(s, p + "/" + key, "unknown option '" + key + "' for task " + t.name);
    s.tasks.push_back(std::move(t));
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::string key, int line)
    : std::runtime_error([&] {
        std::string m = "config error";
        if (!key.empty()) m += " at " + key;
        if (line > 0) m += " (line " + std::to_string(line) + ")";
        return m + ": " + message;
      }()),
      key_(std::move(key)),
      line_(line) {}

Tolerances::Tolerances()
    : row_sum(tol::kRowSum),
      eigen(tol::kEigenResidual),
      rate(tol::kRateGradient),
      dual(tol::kDualGap),
      legendre(tol::kLegendreGradient),
      inversion(tol::kInversion),
      hk(tol::kHK),
      reduced(tol::kReduced),
      symmetry(tol::kSymmetry) {}

int locate_key(const std::string& text, const std::string& key) {
  if (key.empty()) return 0;
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  s.text = text;
  try {
    s.source = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "", line);
  }
  const Json& j = s.source;
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object", "", 1);
  for (const auto& [key, value] : j.items())
    if (!kTopKeys.count(key)) fail(s, "/" + key, "unknown key '" + key + "'");

  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(s, "/name", "expected a string");
    s.name = j["name"].get<std::string>();
  } else {
    s.name = "scenario";
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail(s, "/seed", "expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerances")) parse_tolerances(s, j["tolerances"]);

  if (!j.contains("Q")) throw ConfigError("missing required key 'Q'", "/Q");
  s.q = matrix_at(s, j["Q"], "/Q");
  const Eigen::Index d = s.q.rows();
  try {
    validate_generator(s.q, s.tol.row_sum);
  } catch (const NegativeOffDiagonal& e) {
    fail(s, "/Q/" + std::to_string(e.row()) + "/" + std::to_string(e.col()), e.what());
  } catch (const RowSumNonzero& e) {
    fail(s, "/Q/" + std::to_string(e.row()), e.what());
  } catch (const Error& e) {
    fail(s, "/Q", e.what());
  }

  if (j.contains("N")) {
    if (!j["N"].is_number_integer() || j["N"].get<int>() < 1) fail(s, "/N", "expected a positive integer");
    s.particles = j["N"].get<int>();
  }
  if (j.contains("V") && j.contains("v")) fail(s, "/v", "give either 'V' or 'v', not both");
  if (j.contains("V") && s.particles > 1)
    fail(s, "/V", "for N > 1 give the single-particle potential as 'v' and the interaction as 'V0'");
  const char* vkey = j.contains("V") ? "V" : "v";
  if (j.contains(vkey)) {
    s.v = vector_at(s, j[vkey], std::string("/") + vkey);
    if (s.v.size() != d)
      fail(s, std::string("/") + vkey,
           "potential has " + std::to_string(s.v.size()) + " entries, Q has dimension " + std::to_string(d));
  } else {
    s.v = Vector::Zero(d);
  }

  std::size_t states = 0;
  try {
    states = static_cast<std::size_t>(separable_potential(Potential(Vector::Zero(d)),
                                                          static_cast<std::size_t>(s.particles))
                                          .dim());
  } catch (const Error& e) {
    fail(s, "/N", e.what());
  }
  if (j.contains("V0")) {
    const Json& v0 = j["V0"];
    if (v0.is_object()) {
      for (const auto& [key, value] : v0.items())
        if (key != "pairwise") fail(s, "/V0/" + key, "unknown key '" + key + "' (expected 'pairwise')");
      if (!v0.contains("pairwise")) fail(s, "/V0", "expected {\"pairwise\": [[...]]}");
      s.v0_pairwise = matrix_at(s, v0["pairwise"], "/V0/pairwise");
      if (s.v0_pairwise->rows() != d) fail(s, "/V0/pairwise", "pairwise matrix must be d x d");
      if ((*s.v0_pairwise - s.v0_pairwise->transpose()).cwiseAbs().maxCoeff() > 0.0)
        fail(s, "/V0/pairwise", "pairwise matrix must be symmetric");
    } else {
      s.v0_flat = vector_at(s, v0, "/V0");
      if (static_cast<std::size_t>(s.v0_flat->size()) != states)
        fail(s, "/V0", "flat V0 has " + std::to_string(s.v0_flat->size()) + " entries, expected d^N = " +
                           std::to_string(states));
    }
  }

  if (j.contains("tasks")) parse_tasks(s, j["tasks"]);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

double option_number(const TaskSpec& t, const char* key, double fallback) {
  if (!t.options.contains(key)) return fallback;
  const Json& j = t.options[key];
  if (!j.is_number() || !std::isfinite(j.get<double>()))
    throw ConfigError("expected a finite number", t.pointer + "/" + key);
  return j.get<double>();
}

int option_int(const TaskSpec& t, const char* key, int fallback) {
  if (!t.options.contains(key)) return fallback;
  const Json& j = t.options[key];
  if (!j.is_number_integer()) throw ConfigError("expected an integer", t.pointer + "/" + key);
  return j.get<int>();
}

bool option_bool(const TaskSpec& t, const char* key, bool fallback) {
  if (!t.options.contains(key)) return fallback;
  const Json& j = t.options[key];
  if (!j.is_boolean()) throw ConfigError("expected true or false", t.pointer + "/" + key);
  return j.get<bool>();
}

std::optional<std::vector<double>> option_list(const TaskSpec& t, const char* key) {
  if (!t.options.contains(key)) return std::nullopt;
  const Json& j = t.options[key];
  if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of numbers", t.pointer + "/" + key);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number() || !std::isfinite(j[i].get<double>()))
      throw ConfigError("expected a finite number", t.pointer + "/" + key + "/" + std::to_string(i));
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::optional<Vector> option_vector(const TaskSpec& t, const char* key) {
  const auto list = option_list(t, key);
  if (!list) return std::nullopt;
  return Eigen::Map<const Vector>(list->data(), static_cast<Eigen::Index>(list->size()));
}

}  // namespace dvsg::cli
