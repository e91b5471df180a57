#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dvsg/types.hpp"

namespace dvsg::cli {

using Json = nlohmann::ordered_json;

// Malformed scenario: bad JSON, unknown or mistyped key, inconsistent
// dimensions, invalid generator. `key` is a JSON pointer into the scenario.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string key = {}, int line = 0);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

struct Tolerances {
  double row_sum;
  double eigen;
  double rate;
  double dual;
  double legendre;
  double inversion;
  double hk;
  double reduced;
  double symmetry;

  Tolerances();
};

struct TaskSpec {
  std::string name;
  Json options = Json::object();
  std::string pointer;  // location in the scenario, for error messages
};

struct Scenario {
  std::string name;
  Matrix q;
  int particles = 1;
  // Potential on the d sites. For N = 1 this is the whole potential.
  Vector v;
  // Interaction on d^N; zero when absent.
  std::optional<Vector> v0_flat;
  std::optional<Matrix> v0_pairwise;
  std::vector<TaskSpec> tasks;
  std::uint64_t seed = 0;
  Tolerances tol;
  Json source;       // parsed input, echoed in the report
  std::string text;  // raw input, for line lookup
};

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {"validate", "spectral", "rate",      "hk-verify",
                                                 "hk-invert", "ihk",     "mc",        "averaging"};
  return names;
}

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Line (1-based) of the first occurrence of "key" in text, 0 if absent.
int locate_key(const std::string& text, const std::string& key);

// Typed accessors for task options; throw ConfigError naming the pointer.
double option_number(const TaskSpec& t, const char* key, double fallback);
int option_int(const TaskSpec& t, const char* key, int fallback);
bool option_bool(const TaskSpec& t, const char* key, bool fallback);
std::optional<Vector> option_vector(const TaskSpec& t, const char* key);
std::optional<std::vector<double>> option_list(const TaskSpec& t, const char* key);

}  // namespace dvsg::cli
