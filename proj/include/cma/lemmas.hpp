#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cma/errors.hpp"

namespace cma {

struct LemmaEval {
  double lhs = 0;
  double rhs = 0;
  bool ok = false;
};

/// (sum 1/B_i)^{m-1} >= (sum B_i) / (prod B_i) for B_i > 0, m = len(B) >= 2.
LemmaEval lemma_newton_inequality(std::span<const double> b);

struct CaseSplitEval {
  int case_id = 0;   // 1 = mixed signs, 2 = one-signed
  double value = 0;  // (1/(m-1)) (sum a)^2 - sum a^2
  bool bound_ok = false;  // case 1: value <= 0 (round-off slack)
};

/// Sign classification of the vector (g'^{i ibar} phi_{i ibar x})_i and the
/// case-1 bound via (sum_i^n a_i)^2 <= n sum a_i^2. One-signed vectors return
/// the raw value for comparison against the caller's case-2 majorant.
CaseSplitEval lemma_case_split(std::span<const double> a);

/// Third-order slice phi_{i jbar k} at a point, fixed k, in coordinates where
/// g' is diagonal.
struct ThirdOrderSlice {
  int m = 2;
  std::array<std::complex<double>, 4> v{};  // row-major (i, j)

  std::complex<double> at(int i, int j) const { return v[i * m + j]; }
  std::complex<double>& at(int i, int j) { return v[i * m + j]; }
};

/// lhs = (1/(m-1)) |sum_i g'^{i ibar} phi_{i ibar k}|^2
///       - sum_{i,j} g'^{i ibar} g'^{j jbar} |phi_{i jbar k}|^2
/// rhs = (4m/(m-1)) alpha'^2 |grad phi|^2 (m + Delta phi) sum_i g'^{i ibar}
/// with |grad phi|^2 = sum |phi_k|^2 (complex normalization throughout).
LemmaEval lemma_third_order_bound(std::span<const double> gprime_diag,
                                  const ThirdOrderSlice& slice,
                                  double grad_phi_sq, double m_plus_lap,
                                  double alpha_prime, double slack = 0);

struct TrialSummary {
  long trials = 0;
  long violations = 0;
  double worst_slack = 0;  // most negative relative slack observed
  std::string counterexample;
};

/// Random trial harnesses; per-trial seeds derive from the root seed, so a
/// parallel schedule cannot change the outcome.
TrialSummary newton_inequality_trials(std::uint64_t seed, long trials,
                                      bool inject_fault = false);
TrialSummary case_split_trials(std::uint64_t seed, long trials,
                               bool inject_fault = false);

}  // namespace cma
