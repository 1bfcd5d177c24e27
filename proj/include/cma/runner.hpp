#pragma once

#include <filesystem>

#include "cma/instance.hpp"

namespace cma {

// CLI verbs as library calls so the test suites can drive them directly.
// Exit codes: 0 ok, 2 parse error, 3 solver failure (partial artifacts),
// 4 invalid density / failed preconditions, 5 inequality violation.

int cmd_solve(const std::filesystem::path& instance_path,
              const std::filesystem::path& out_dir);
int cmd_conditions(const std::filesystem::path& instance_path,
                   const std::filesystem::path& out_dir);
int cmd_lemmas(std::uint64_t seed, long trials,
               const std::filesystem::path& out_dir, bool inject_fault = false);
int cmd_curvature(const std::string& metric_name, int samples, int frames,
                  std::uint64_t seed, const std::filesystem::path& out_dir);
int cmd_report(const std::filesystem::path& run_dir);

}  // namespace cma
