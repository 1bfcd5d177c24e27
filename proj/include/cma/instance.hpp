#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "cma/expression.hpp"
#include "cma/solver.hpp"

namespace cma {

struct DomainSpec {
  Shape shape = Shape::Ball;
  int m = 1;
  int n = 17;
  double radius = 1.0;
  std::array<double, 4> center{0, 0, 0, 0};
  double extent = 2.0;
  double period = 1.0;
};

/// One run description: domain, density, optional regularization schedule,
/// solve options and verifier knobs. The schema key is versioned.
struct InstanceSpec {
  static constexpr const char* kSchema = "cma-instance/1";

  std::uint64_t seed = 42;
  DomainSpec domain;
  std::string f_expr;  // exactly one of f_expr / f_file is set
  std::string f_file;
  std::optional<RegularizationSchedule> schedule;
  SolveOptions solve;
  double lambda_margin = 1e-6;
  int frames = 32;
  long trials = 100000;
  std::string out_dir;

  static InstanceSpec from_file(const std::filesystem::path& path);
  static InstanceSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// FNV-1a of the canonical serialization; stable under re-serialization.
  std::string hash() const;

  DomainPtr make_domain() const;
  ScalarField make_density(const DomainPtr& dom) const;
};

}  // namespace cma
