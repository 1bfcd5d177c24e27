#include "cma/instance.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cma/field_io.hpp"

namespace cma {

using nlohmann::json;

namespace {

std::vector<double> parse_sequence(const json& j, const char* what) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
  } else if (j.is_object()) {
    double start = j.at("start").get<double>();
    double factor = j.at("factor").get<double>();
    int count = j.at("count").get<int>();
    double v = start;
    for (int i = 0; i < count; ++i) {
      out.push_back(v);
      v *= factor;
    }
  } else {
    throw Error(ErrorKind::ParseError,
                std::string(what) + ": expected list or {start,factor,count}");
  }
  return out;
}

Shape parse_shape(const std::string& s) {
  if (s == "ball") return Shape::Ball;
  if (s == "box") return Shape::Box;
  if (s == "torus") return Shape::Torus;
  throw Error(ErrorKind::ParseError, "unknown shape '" + s + "'");
}

const char* shape_str(Shape s) {
  switch (s) {
    case Shape::Ball: return "ball";
    case Shape::Box: return "box";
    case Shape::Torus: return "torus";
  }
  return "?";
}

}  // namespace

InstanceSpec InstanceSpec::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::ParseError, "cannot open instance file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ParseError,
                path.string() + ": invalid JSON: " + e.what());
  }
  return from_json(j);
}

InstanceSpec InstanceSpec::from_json(const json& j) {
  try {
    InstanceSpec spec;
    if (j.value("schema", std::string()) != kSchema)
      throw Error(ErrorKind::ParseError,
                  std::string("instance schema must be ") + kSchema);
    spec.seed = j.value("seed", 42ULL);

    const auto& dj = j.at("domain");
    spec.domain.shape = parse_shape(dj.at("shape").get<std::string>());
    spec.domain.m = dj.at("m").get<int>();
    spec.domain.n = dj.at("n").get<int>();
    if (spec.domain.m != 1 && spec.domain.m != 2)
      throw Error(ErrorKind::ParseError, "m must be 1 or 2");
    if (spec.domain.n < 5) throw Error(ErrorKind::ParseError, "n must be >= 5");
    spec.domain.radius = dj.value("radius", 1.0);
    spec.domain.extent = dj.value("extent", 2.0);
    spec.domain.period = dj.value("period", 1.0);
    if (dj.contains("center")) {
      auto c = dj.at("center").get<std::vector<double>>();
      for (std::size_t a = 0; a < c.size() && a < 4; ++a)
        spec.domain.center[a] = c[a];
    }

    const auto& fj = j.at("f");
    if (fj.contains("expr")) {
      spec.f_expr = fj.at("expr").get<std::string>();
      Expression::parse(spec.f_expr);  // fail early on bad expressions
    } else if (fj.contains("file")) {
      spec.f_file = fj.at("file").get<std::string>();
    } else {
      throw Error(ErrorKind::ParseError, "f needs an 'expr' or a 'file'");
    }

    if (j.contains("schedule")) {
      RegularizationSchedule sched;
      sched.eps = parse_sequence(j.at("schedule").at("eps"), "schedule.eps");
      sched.rho_over_h =
          parse_sequence(j.at("schedule").at("rho_over_h"), "schedule.rho_over_h");
      try {
        sched.validate();
      } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, e.what());
      }
      spec.schedule = std::move(sched);
    }

    if (j.contains("solve")) {
      const auto& sj = j.at("solve");
      spec.solve.max_iterations = sj.value("max_iterations", 50);
      spec.solve.tolerance = sj.value("tolerance", 1e-10);
      spec.solve.shrink = sj.value("shrink", 0.5);
      spec.solve.min_step = sj.value("min_step", 1e-6);
      spec.solve.eig_floor = sj.value("eig_floor", 1e-10);
      std::string init = sj.value("init", "barrier");
      if (init == "barrier") spec.solve.init = SolveOptions::Init::Barrier;
      else if (init == "zero") spec.solve.init = SolveOptions::Init::Zero;
      else if (init == "supplied") spec.solve.init = SolveOptions::Init::Supplied;
      else throw Error(ErrorKind::ParseError, "unknown initializer '" + init + "'");
      try {
        spec.solve.validate();
      } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, e.what());
      }
    }
    if (spec.domain.shape == Shape::Torus)
      spec.solve.init = j.contains("solve") && j.at("solve").contains("init")
                            ? spec.solve.init
                            : SolveOptions::Init::Zero;

    if (j.contains("verify")) {
      const auto& vj = j.at("verify");
      spec.lambda_margin = vj.value("lambda_margin", 1e-6);
      spec.frames = vj.value("frames", 32);
      spec.trials = vj.value("trials", 100000L);
    }
    spec.out_dir = j.value("out", std::string());
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("instance parse: ") + e.what());
  }
}

json InstanceSpec::to_json() const {
  json j;
  j["schema"] = kSchema;
  j["seed"] = seed;
  json dj;
  dj["shape"] = shape_str(domain.shape);
  dj["m"] = domain.m;
  dj["n"] = domain.n;
  if (domain.shape == Shape::Ball) {
    dj["radius"] = domain.radius;
    dj["center"] = std::vector<double>(domain.center.begin(),
                                       domain.center.begin() + 2 * domain.m);
  } else if (domain.shape == Shape::Box) {
    dj["extent"] = domain.extent;
  } else {
    dj["period"] = domain.period;
  }
  j["domain"] = dj;
  if (!f_expr.empty()) j["f"] = json{{"expr", f_expr}};
  else j["f"] = json{{"file", f_file}};
  if (schedule) {
    j["schedule"] =
        json{{"eps", schedule->eps}, {"rho_over_h", schedule->rho_over_h}};
  }
  j["solve"] = json{
      {"max_iterations", solve.max_iterations},
      {"tolerance", solve.tolerance},
      {"shrink", solve.shrink},
      {"min_step", solve.min_step},
      {"eig_floor", solve.eig_floor},
      {"init", solve.init == SolveOptions::Init::Barrier  ? "barrier"
               : solve.init == SolveOptions::Init::Zero   ? "zero"
                                                          : "supplied"}};
  j["verify"] = json{{"lambda_margin", lambda_margin},
                     {"frames", frames},
                     {"trials", trials}};
  return j;
}

std::string InstanceSpec::hash() const { return fnv1a64_hex(to_json().dump()); }

DomainPtr InstanceSpec::make_domain() const {
  int pad = 0;
  if (schedule && domain.shape != Shape::Torus)
    pad = static_cast<int>(std::ceil(schedule->rho_over_h.front())) + 1;
  switch (domain.shape) {
    case Shape::Ball:
      return std::make_shared<GridDomain>(
          GridDomain::ball(domain.m, domain.n, domain.radius, domain.center, pad));
    case Shape::Box:
      return std::make_shared<GridDomain>(
          GridDomain::box(domain.m, domain.n, domain.extent, pad));
    case Shape::Torus:
      return std::make_shared<GridDomain>(
          GridDomain::torus(domain.m, domain.n, domain.period));
  }
  throw Error(ErrorKind::ParseError, "bad shape");
}

ScalarField InstanceSpec::make_density(const DomainPtr& dom) const {
  if (!f_expr.empty())
    return sample_expression(dom, Expression::parse(f_expr));
  ScalarField f = read_field(f_file);
  if (!f.domain->same_layout(*dom)) {
    // Re-house the samples on the run's (possibly padded) lattice.
    ScalarField g(dom);
    for (std::size_t nd = 0; nd < f.domain->lattice_size(); ++nd) {
      if (!f.defined_at(nd)) continue;
      auto pos = f.domain->position(nd);
      int idx[4];
      bool ok = true;
      for (int a = 0; a < dom->dims(); ++a) {
        double rel = (pos[a] - dom->coord(0, a)) / dom->spacing();
        idx[a] = static_cast<int>(std::lround(rel));
        if (std::abs(rel - idx[a]) > 1e-9 || idx[a] < 0 ||
            idx[a] >= dom->lattice_per_axis())
          ok = false;
      }
      if (!ok)
        throw Error(ErrorKind::ParseError,
                    "field file lattice does not embed in the run domain");
      g[dom->flatten(std::span<const int>(idx, dom->dims()))] = f[nd];
    }
    return g;
  }
  return f;
}

}  // namespace cma
