#include "cma/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "cma/field_io.hpp"
#include "cma/kahler.hpp"
#include "cma/lemmas.hpp"
#include "cma/rng.hpp"
#include "cma/verifier.hpp"
#include "cma/version.hpp"

namespace cma {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class RunDir {
 public:
  RunDir(fs::path dir, std::string instance_hash)
      : dir_(std::move(dir)), hash_(std::move(instance_hash)) {
    fs::create_directories(dir_);
    started_ = now_utc();
  }

  const fs::path& dir() const { return dir_; }

  std::ofstream open(const std::string& name) {
    artifacts_.push_back(name);
    return std::ofstream(dir_ / name);
  }
  void note_artifact(const std::string& name) { artifacts_.push_back(name); }
  void stage_status(int stage, const std::string& status) {
    stages_.push_back({{"stage", stage}, {"status", status}});
  }

  /// The manifest lists exactly the files written by this run; it carries
  /// the timestamps, so it is not itself part of the byte-stable report set.
  void write_manifest(int exit_status) {
    json j;
    j["schema"] = "cma-manifest/1";
    j["instance_hash"] = hash_;
    j["tool_version"] = kToolVersion;
    j["started_at"] = started_;
    j["finished_at"] = now_utc();
    j["exit_status"] = exit_status;
    j["stages"] = stages_;
    json arts = json::array();
    for (const auto& name : artifacts_) {
      std::ifstream in(dir_ / name, std::ios::binary);
      std::string bytes((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
      arts.push_back({{"path", name},
                      {"bytes", bytes.size()},
                      {"fnv64", fnv1a64_hex(bytes)}});
    }
    j["artifacts"] = arts;
    std::ofstream out(dir_ / "manifest.json");
    out << j.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  std::string hash_;
  std::string started_;
  std::vector<std::string> artifacts_;
  json stages_ = json::array();
};

json condition_json(const ConditionReport& c) {
  return json{{"record", "conditions"},
              {"m", c.m},
              {"sup_f", c.sup_f},
              {"A", c.a_const},
              {"A1", c.a1_const},
              {"sup_f_node", c.sup_f_node},
              {"A_node", c.a_node},
              {"A1_node", c.a1_node},
              {"nonnegative", c.nonnegative},
              {"strictly_positive", c.strictly_positive}};
}

json estimate_json(const EstimateReport& r, const GridDomain& dom) {
  auto idx = dom.unflatten(r.h_max_node);
  std::vector<int> node(idx.begin(), idx.begin() + dom.dims());
  json j{{"osc", r.osc},
         {"sup_grad", r.sup_grad},
         {"sup_lap", r.sup_lap},
         {"min_m_plus_lap", r.min_m_plus_lap},
         {"h_max_node", node},
         {"shift", r.shift},
         {"lambda", r.lambda},
         {"grad_eq_residual", r.grad_eq_residual},
         {"m_plus_lap_at_p", r.m_plus_lap_at_p},
         {"delta_prime_h", r.delta_prime_h},
         {"tau_h", r.tau_h},
         {"eqm1_slack", r.eqm1_slack_at_p},
         {"eqm1_slack_min", r.eqm1_slack_min},
         {"pos_bisec3_slack", r.pos_bisec3_slack}};
  if (r.has_fit) {
    j["c1"] = r.c1;
    j["c2"] = r.c2;
    j["c3"] = r.c3;
  }
  return j;
}

json solve_json(const SolveReport& rep) {
  return json{{"converged", rep.converged},
              {"newton_iterations", rep.iterations},
              {"final_residual", rep.final_residual},
              {"residual_history", rep.residual_history},
              {"node_count", rep.node_count},
              {"min_hessian_eig", rep.min_hessian_eig}};
}

int run_solve(const InstanceSpec& inst, RunDir& run) {
  DomainPtr dom = inst.make_domain();
  ScalarField f = inst.make_density(dom);

  std::ofstream reports = run.open("reports.jsonl");

  ConditionReport cond;
  try {
    cond = check_conditions(f);
  } catch (const Error& e) {
    std::cerr << "invalid density: " << e.what() << "\n";
    reports << json{{"record", "error"}, {"stage", "conditions"},
                    {"message", e.what()}}
                   .dump()
            << "\n";
    return 4;
  }
  reports << condition_json(cond).dump() << "\n";

  if (inst.schedule) {
    if (dom->periodic()) {
      std::cerr << "schedules run on Dirichlet domains only\n";
      return 2;
    }
    PipelineResult pipe = degenerate_pipeline(f, *inst.schedule, inst.solve);
    std::ofstream plot = run.open("schedule.csv");
    plot << "stage,eps,rho_over_h,sup_lap_u,sup_lap_running_max,newton_iterations,"
            "final_residual,c1_norm\n";
    std::vector<EstimateReport> family;
    for (std::size_t s = 0; s < pipe.stages.size(); ++s) {
      const StageRecord& st = pipe.stages[s];
      json line{{"record", "stage"},
                {"stage", st.stage},
                {"eps", st.eps},
                {"rho_over_h", st.rho_over_h},
                {"sup_u", st.sup_abs_u},
                {"c1_norm", st.c1_norm},
                {"sup_lap_u", st.sup_lap_u},
                {"sup_lap_running_max", st.sup_lap_running_max},
                {"solve", solve_json(st.report)}};
      if (s < pipe.stage_fields.size()) {
        ScalarField lifted =
            mollify_lift(f, st.eps, st.rho_over_h * dom->spacing());
        EstimateReport est =
            analyze_solution(dirichlet_potential(pipe.stage_fields[s]), lifted,
                             inst.lambda_margin);
        family.push_back(est);
        line.update(estimate_json(est, *dom));
      }
      reports << line.dump() << "\n";
      char buf[160];
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g\n",
                    st.stage, st.eps, st.rho_over_h, st.sup_lap_u,
                    st.sup_lap_running_max, st.report.iterations,
                    st.report.final_residual, st.c1_norm);
      plot << buf;
      run.stage_status(st.stage, st.report.converged ? "converged" : "failed");
      std::cout << "stage " << st.stage << " eps=" << st.eps
                << " rho/h=" << st.rho_over_h << " iters=" << st.report.iterations
                << " res=" << st.report.final_residual
                << " wall=" << st.report.wall_seconds << "s\n";
    }
    if (!family.empty()) {
      TestFunctionConfig cfg = TestFunctionConfig::make(dom->m(), 1.0);
      AuditRecord audit = final_bound_audit(family, cfg);
      reports << json{{"record", "family_audit"},
                      {"c1", audit.c1},
                      {"c2", audit.c2},
                      {"c3", audit.c3},
                      {"all_within", audit.all_within},
                      {"eqm1_slack_min", audit.eqm1_slack_min}}
                     .dump()
              << "\n";
    }
    if (pipe.limit.domain) {
      write_field(run.dir() / "final_field.csv", pipe.limit);
      run.note_artifact("final_field.csv");
    }
    if (!pipe.completed) {
      std::cerr << "pipeline halted: " << pipe.halt_reason << "\n";
      reports << json{{"record", "halt"}, {"reason", pipe.halt_reason}}.dump()
              << "\n";
      return 3;
    }
    return 0;
  }

  // single solve
  try {
    EstimateReport est;
    ScalarField solution;
    json line{{"record", "solve"}};
    if (dom->periodic()) {
      TorusSolution sol = solve_torus(f, inst.solve);
      run.stage_status(0, sol.report.converged ? "converged" : "failed");
      line["c"] = sol.c;
      line["solve"] = solve_json(sol.report);
      std::cout << "torus solve: iters=" << sol.report.iterations
                << " res=" << sol.report.final_residual << " c=" << sol.c
                << " wall=" << sol.report.wall_seconds << "s\n";
      if (!sol.report.converged) {
        reports << line.dump() << "\n";
        return 3;
      }
      ScalarField feff = f;
      for (auto& v : feff.values)
        if (std::isfinite(v)) v *= std::exp(sol.c);
      est = analyze_solution(sol.phi, feff, inst.lambda_margin);
      solution = std::move(sol.phi);
    } else {
      auto [u, rep] = solve_dirichlet(f, inst.solve);
      run.stage_status(0, rep.converged ? "converged" : "failed");
      line["solve"] = solve_json(rep);
      std::cout << "solve: iters=" << rep.iterations
                << " res=" << rep.final_residual
                << " wall=" << rep.wall_seconds << "s\n";
      if (!rep.converged) {
        reports << line.dump() << "\n";
        return 3;
      }
      est = analyze_solution(dirichlet_potential(u), f, inst.lambda_margin);
      solution = std::move(u);
    }
    TestFunctionConfig cfg = TestFunctionConfig::make(dom->m(), est.osc);
    AuditRecord audit = final_bound_audit(std::span(&est, 1), cfg);
    est.c1 = audit.c1;
    est.c2 = audit.c2;
    est.c3 = audit.c3;
    est.has_fit = true;
    line.update(estimate_json(est, *dom));
    reports << line.dump() << "\n";
    write_field(run.dir() / "final_field.csv", solution);
    run.note_artifact("final_field.csv");
    return 0;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidDensity) {
      std::cerr << "invalid density: " << e.what() << "\n";
      reports << json{{"record", "error"}, {"message", e.what()}}.dump() << "\n";
      return 4;
    }
    std::cerr << "solver failure: " << e.what() << "\n";
    reports << json{{"record", "error"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  }
}

}  // namespace

int cmd_solve(const fs::path& instance_path, const fs::path& out_dir) {
  InstanceSpec inst;
  try {
    inst = InstanceSpec::from_file(instance_path);
  } catch (const Error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  fs::path dir = out_dir.empty() ? fs::path(inst.out_dir) : out_dir;
  if (dir.empty()) dir = "cma-run";
  RunDir run(dir, inst.hash());
  int status = 0;
  try {
    status = run_solve(inst, run);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = e.kind() == ErrorKind::InvalidDensity ? 4 : 3;
  }
  run.write_manifest(status);
  return status;
}

int cmd_conditions(const fs::path& instance_path, const fs::path& out_dir) {
  InstanceSpec inst;
  try {
    inst = InstanceSpec::from_file(instance_path);
  } catch (const Error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  try {
    DomainPtr dom = inst.make_domain();
    ScalarField f = inst.make_density(dom);
    ConditionReport cond = check_conditions(f);
    json j = condition_json(cond);
    std::cout << j.dump(2) << "\n";
    if (!out_dir.empty()) {
      RunDir run(out_dir, inst.hash());
      run.open("conditions.json") << j.dump(2) << "\n";
      run.write_manifest(0);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "invalid density: " << e.what() << "\n";
    return 4;
  }
}

int cmd_lemmas(std::uint64_t seed, long trials, const fs::path& out_dir,
               bool inject_fault) {
  if (trials < 1) {
    std::cerr << "trials must be >= 1\n";
    return 2;
  }
  TrialSummary newton = newton_inequality_trials(seed, trials, inject_fault);
  TrialSummary cases = case_split_trials(seed, trials, inject_fault);

  auto csv_line = [](const char* name, const TrialSummary& s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%ld,%ld,%.17g\n", name, s.trials,
                  s.violations, s.worst_slack);
    return std::string(buf);
  };
  std::string csv = "suite,trials,violations,worst_slack\n";
  csv += csv_line("newton_inequality", newton);
  csv += csv_line("case_split", cases);
  std::cout << csv;

  if (!out_dir.empty()) {
    RunDir run(out_dir, "lemmas-" + std::to_string(seed));
    run.open("lemma_trials.csv") << csv;
    if (newton.violations + cases.violations > 0) {
      auto dump = run.open("counterexamples.txt");
      if (!newton.counterexample.empty())
        dump << "newton_inequality: " << newton.counterexample << "\n";
      if (!cases.counterexample.empty())
        dump << "case_split: " << cases.counterexample << "\n";
    }
    run.write_manifest(newton.violations + cases.violations > 0 ? 5 : 0);
  }
  if (newton.violations + cases.violations > 0) {
    std::cerr << "violations found"
              << (newton.counterexample.empty() ? "" : ": " + newton.counterexample)
              << (cases.counterexample.empty() ? "" : ": " + cases.counterexample)
              << "\n";
    return 5;
  }
  return 0;
}

int cmd_curvature(const std::string& metric_name, int samples, int frames,
                  std::uint64_t seed, const fs::path& out_dir) {
  MetricModel metric;
  try {
    metric = MetricModel::by_name(metric_name);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  auto points = default_sample_points(metric, samples, seed);
  std::string csv = "sample,re_z1,im_z1,re_z2,im_z2,S,obc_min\n";
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    CurvatureSample cs = curvature_at(metric, points[i]);
    ObcResult obc = obc_check(metric, std::span(&points[i], 1), frames,
                              Rng::derive(seed, i));
    worst = std::min(worst, obc.obc_min);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i,
                  points[i][0].real(), points[i][0].imag(), points[i][1].real(),
                  points[i][1].imag(), cs.scalar_s, obc.obc_min);
    csv += buf;
  }
  bool violates = worst < -1e-9;
  char tail[120];
  std::snprintf(tail, sizeof tail, "# obc_min_overall=%.17g violates_obc=%d\n",
                worst, violates ? 1 : 0);
  csv += tail;
  std::cout << csv;
  if (!out_dir.empty()) {
    RunDir run(out_dir, "curvature-" + metric_name);
    run.open("curvature.csv") << csv;
    run.write_manifest(0);
  }
  if (metric.documented_obc() && violates) {
    std::cerr << metric_name << ": unexpected OBC violation\n";
    return 5;
  }
  return 0;
}

int cmd_report(const fs::path& run_dir) {
  std::ifstream mf(run_dir / "manifest.json");
  if (!mf) {
    std::cerr << "no manifest in " << run_dir << "\n";
    return 2;
  }
  json j;
  try {
    mf >> j;
  } catch (const std::exception& e) {
    std::cerr << "bad manifest: " << e.what() << "\n";
    return 2;
  }
  std::cout << "run " << j.value("instance_hash", std::string("?")) << " ("
            << j.value("tool_version", std::string("?")) << ", exit "
            << j.value("exit_status", -1) << ")\n";
  int missing = 0;
  for (const auto& a : j.value("artifacts", json::array())) {
    fs::path p = run_dir / a.value("path", std::string());
    bool ok = fs::exists(p);
    std::ifstream in(p, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    bool hash_ok = ok && fnv1a64_hex(bytes) == a.value("fnv64", std::string());
    std::cout << "  " << a.value("path", std::string()) << " "
              << (ok ? (hash_ok ? "ok" : "MODIFIED") : "MISSING") << "\n";
    if (!ok) ++missing;
  }
  return missing ? 1 : 0;
}

}  // namespace cma
