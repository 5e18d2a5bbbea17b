#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpcalc/algebra.hpp"
#include "hpcalc/bernstein.hpp"
#include "hpcalc/oracle.hpp"

namespace hpcalc::cli {

using json = nlohmann::json;

/// Malformed job input; the message carries the field path or file line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FunctionSpec {
  enum class Kind {
    Measure,
    Bernstein,
    NegFracPower,
    PosFracPower,
    LogInverse,
    Reciprocal,
    LogShift,
  };
  Kind kind = Kind::Reciprocal;
  double param = 0.0;
  std::optional<HalfLineMeasure> measure;
  std::optional<BernsteinFunction> psi;
  json source;

  /// Representing measure, when g is a Laplace transform.
  std::optional<HalfLineMeasure> as_measure() const;
  /// Bernstein function, when g is one.
  std::optional<BernsteinFunction> as_bernstein() const;
  /// Spectral symbol for the oracle, when a closed form is known.
  std::optional<ScalarFunction> symbol() const;
};

struct IdentityRequest {
  std::string name;
  json params = json::object();
};

struct SweepSpec {
  std::string param;
  std::vector<double> values;
};

struct JobSpec {
  Mat matrix;
  FunctionSpec function;
  std::vector<Vec> vectors;
  QuadratureSpec quadrature;
  std::vector<IdentityRequest> identities;
  std::optional<SweepSpec> sweep;
  std::uint64_t seed = 0;
  json source;
};

JobSpec parse_job(const json& j, const std::filesystem::path& base_dir = ".");
JobSpec load_job(const std::filesystem::path& file);

Mat parse_matrix_text(const std::string& text, const std::string& origin);
HalfLineMeasure parse_measure(const json& j, const std::string& path);
BernsteinFunction parse_bernstein(const json& j, const std::string& path);
FunctionSpec parse_function(const json& j, const std::string& path);

struct RunOptions {
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  double tol_scale = 1.0;
};

struct Outcome {
  json report;
  /// Filled for --format csv.
  std::string csv;
  int exit_code = 0;
};

Outcome cmd_compute(const JobSpec& job, const RunOptions& opts);
Outcome cmd_verify(const JobSpec& job, const RunOptions& opts);
Outcome cmd_sweep(const JobSpec& job, const RunOptions& opts);

/// 2 for NotInDomain, 3 for validation failures, 1 otherwise.
int exit_code_for(ErrorKind kind);

/// Full command line entry point used by the hpcalc binary.
int run(int argc, char** argv);

}  // namespace hpcalc::cli
