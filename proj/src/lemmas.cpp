#include "cma/lemmas.hpp"

#include <cmath>
#include <sstream>

#include "cma/rng.hpp"

namespace cma {

LemmaEval lemma_newton_inequality(std::span<const double> b) {
  const int m = static_cast<int>(b.size());
  if (m < 2)
    throw Error(ErrorKind::DomainError, "Newton-type inequality needs m >= 2");
  double inv_sum = 0, sum = 0, prod = 1;
  for (double x : b) {
    if (!(x > 0))
      throw Error(ErrorKind::DomainError, "entries must be positive");
    inv_sum += 1.0 / x;
    sum += x;
    prod *= x;
  }
  LemmaEval ev;
  ev.lhs = std::pow(inv_sum, m - 1);
  ev.rhs = sum / prod;
  double scale = std::max({std::abs(ev.lhs), std::abs(ev.rhs), 1.0});
  ev.ok = ev.lhs >= ev.rhs - 1e-12 * scale;
  return ev;
}

CaseSplitEval lemma_case_split(std::span<const double> a) {
  const int m = static_cast<int>(a.size());
  if (m < 2) throw Error(ErrorKind::DomainError, "case split needs m >= 2");
  bool has_pos = false, has_neg = false;
  double sum = 0, sum_sq = 0;
  for (double x : a) {
    has_pos |= x > 0;
    has_neg |= x < 0;
    sum += x;
    sum_sq += x * x;
  }
  CaseSplitEval ev;
  ev.case_id = (has_pos && has_neg) ? 1 : 2;
  ev.value = sum * sum / (m - 1.0) - sum_sq;
  if (ev.case_id == 1) {
    double scale = std::max(sum_sq, 1.0);
    ev.bound_ok = ev.value <= 1e-12 * scale;
  } else {
    ev.bound_ok = true;  // raw value goes to the caller's case-2 majorant
  }
  return ev;
}

LemmaEval lemma_third_order_bound(std::span<const double> gprime_diag,
                                  const ThirdOrderSlice& slice,
                                  double grad_phi_sq, double m_plus_lap,
                                  double alpha_prime, double slack) {
  const int m = static_cast<int>(gprime_diag.size());
  if (m < 2) throw Error(ErrorKind::DomainError, "third-order bound needs m >= 2");
  double gsum = 0;
  for (double g : gprime_diag) {
    if (!(g > 0))
      throw Error(ErrorKind::DomainError, "g' diagonal must be positive");
    gsum += 1.0 / g;
  }
  std::complex<double> diag_contract = 0;
  double full = 0;
  for (int i = 0; i < m; ++i) {
    diag_contract += slice.at(i, i) / gprime_diag[i];
    for (int j = 0; j < m; ++j)
      full += std::norm(slice.at(i, j)) / (gprime_diag[i] * gprime_diag[j]);
  }
  LemmaEval ev;
  ev.lhs = std::norm(diag_contract) / (m - 1.0) - full;
  ev.rhs = (4.0 * m / (m - 1.0)) * alpha_prime * alpha_prime * grad_phi_sq *
           m_plus_lap * gsum;
  ev.ok = ev.lhs <= ev.rhs + slack;
  return ev;
}

namespace {

std::string dump_vector(std::span<const double> xs) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  os << "]";
  return os.str();
}

}  // namespace

TrialSummary newton_inequality_trials(std::uint64_t seed, long trials,
                                      bool inject_fault) {
  TrialSummary sum;
  sum.trials = trials;
  std::vector<double> b;
  for (long t = 0; t < trials; ++t) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
    int m = 2 + static_cast<int>(rng.next_u64() % 3);  // m in {2,3,4}
    b.resize(m);
    for (auto& x : b) x = std::pow(10.0, rng.uniform(-3.0, 3.0));
    LemmaEval ev = lemma_newton_inequality(b);
    if (inject_fault) ev.ok = ev.rhs >= ev.lhs - 1e-12;  // test hook
    double scale = std::max({std::abs(ev.lhs), std::abs(ev.rhs), 1.0});
    sum.worst_slack = std::min(sum.worst_slack, (ev.lhs - ev.rhs) / scale);
    if (!ev.ok) {
      ++sum.violations;
      if (sum.counterexample.empty())
        sum.counterexample = "trial " + std::to_string(t) + " B=" + dump_vector(b);
    }
  }
  return sum;
}

TrialSummary case_split_trials(std::uint64_t seed, long trials,
                               bool inject_fault) {
  TrialSummary sum;
  sum.trials = trials;
  std::vector<double> a;
  for (long t = 0; t < trials; ++t) {
    Rng rng(Rng::derive(seed, 0x5EEDBEEF ^ static_cast<std::uint64_t>(t)));
    int m = 2 + static_cast<int>(rng.next_u64() % 5);  // m in {2..6}
    a.resize(m);
    for (auto& x : a)
      x = rng.gaussian() * std::pow(10.0, rng.uniform(-3.0, 3.0));
    // force mixed signs: the case-1 bound is the theorem under test
    bool has_pos = false, has_neg = false;
    for (double x : a) {
      has_pos |= x > 0;
      has_neg |= x < 0;
    }
    if (!has_pos) a[0] = std::abs(a[0]) + 1e-9;
    if (!has_neg) a[m - 1] = -std::abs(a[m - 1]) - 1e-9;
    CaseSplitEval ev = lemma_case_split(a);
    bool ok = ev.case_id == 1 && ev.bound_ok;
    if (inject_fault) ok = ev.value > 0;  // test hook
    double scale = 0;
    for (double x : a) scale += x * x;
    scale = std::max(scale, 1.0);
    sum.worst_slack = std::min(sum.worst_slack, -ev.value / scale);
    if (!ok) {
      ++sum.violations;
      if (sum.counterexample.empty())
        sum.counterexample = "trial " + std::to_string(t) + " a=" + dump_vector(a);
    }
  }
  return sum;
}

}  // namespace cma
