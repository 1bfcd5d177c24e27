#include "cma/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <limits>

namespace cma {

void SolveOptions::validate() const {
  if (!(tolerance > 0)) throw Error(ErrorKind::DomainError, "tolerance must be > 0");
  if (!(shrink > 0 && shrink < 1))
    throw Error(ErrorKind::DomainError, "line-search shrink must be in (0,1)");
  if (!(eig_floor > 0))
    throw Error(ErrorKind::DomainError, "positivity floor must be > 0");
  if (!(min_step > 0 && min_step < 1))
    throw Error(ErrorKind::DomainError, "min step must be in (0,1)");
  if (max_iterations < 1)
    throw Error(ErrorKind::DomainError, "need at least one Newton iteration");
}

ScalarField build_barrier(const DomainPtr& dom, double sup_f) {
  if (sup_f < 0) throw Error(ErrorKind::DomainError, "sup f must be >= 0");
  if (dom->periodic())
    throw Error(ErrorKind::DomainError, "barrier needs a ball or box domain");
  const int m = dom->m();
  double R = dom->shape() == Shape::Ball
                 ? dom->radius()
                 : dom->extent() * std::sqrt(double(dom->dims())) / 2.0;
  double K = std::pow(sup_f, 1.0 / m) + 1.0;
  ScalarField psi(dom);
  for (std::size_t nd = 0; nd < dom->lattice_size(); ++nd) {
    if (dom->node_class(nd) == NodeClass::Exterior) continue;
    double dist = dom->dist_to_center(nd);
    psi[nd] = K * (dist * dist - R * R);
  }
  return psi;
}

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

/// Mixed-derivative axis pairs entering the m = 2 complex Hessian, with the
/// component they feed: re12 uses (x1,x2) + (y1,y2), im12 uses (x1,y2) - (y1,x2).
constexpr int kPairs2[4][2] = {{0, 2}, {1, 3}, {0, 3}, {1, 2}};
constexpr int kCornerSign[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

/// Per-node stencil address cache over the unknown vector.
struct NodeStencil {
  int self = -1;
  int axis[8] = {-1, -1, -1, -1, -1, -1, -1, -1};    // (axis a: +,-) pairs
  int corner[16];                                    // 4 pairs x 4 corners (m=2)
};

struct UnknownMap {
  std::vector<std::int64_t> uid;   // lattice -> unknown index or -1
  std::vector<std::size_t> node;   // unknown index -> lattice node
  int count = 0;
};

UnknownMap map_unknowns(const GridDomain& dom, bool include_band) {
  UnknownMap mp;
  mp.uid.assign(dom.lattice_size(), -1);
  auto add = [&](const std::vector<std::size_t>& nodes) {
    for (std::size_t nd : nodes) {
      mp.uid[nd] = mp.count++;
      mp.node.push_back(nd);
    }
  };
  add(dom.interior_nodes());
  if (include_band) add(dom.band_nodes());
  return mp;
}

std::vector<NodeStencil> build_stencils(const GridDomain& dom,
                                        const UnknownMap& mp) {
  const int d = dom.dims();
  std::vector<NodeStencil> st(dom.interior_nodes().size());
  std::array<int, 4> delta{};
  for (std::size_t k = 0; k < dom.interior_nodes().size(); ++k) {
    std::size_t nd = dom.interior_nodes()[k];
    NodeStencil& s = st[k];
    s.self = static_cast<int>(mp.uid[nd]);
    auto at = [&](std::initializer_list<std::pair<int, int>> steps) {
      delta = {0, 0, 0, 0};
      for (auto [a, v] : steps) delta[a] = v;
      std::size_t nb = dom.offset_node(nd, std::span<const int>(delta.data(), d));
      if (nb == GridDomain::npos || mp.uid[nb] < 0)
        throw Error(ErrorKind::BoundaryDataMissing,
                    "stencil leaves the solved region at node " + std::to_string(nd),
                    nd);
      return static_cast<int>(mp.uid[nb]);
    };
    for (int a = 0; a < d; ++a) {
      s.axis[2 * a] = at({{a, 1}});
      s.axis[2 * a + 1] = at({{a, -1}});
    }
    if (dom.m() == 2)
      for (int p = 0; p < 4; ++p)
        for (int c = 0; c < 4; ++c)
          s.corner[4 * p + c] = at({{kPairs2[p][0], kCornerSign[c][0]},
                                    {kPairs2[p][1], kCornerSign[c][1]}});
  }
  return st;
}

HermMat hessian_from_stencil(const Eigen::VectorXd& u, const NodeStencil& s,
                             int m, double inv_h2) {
  HermMat hm;
  double u0 = u[s.self];
  auto axis2 = [&](int a) {
    return (u[s.axis[2 * a]] - 2 * u0 + u[s.axis[2 * a + 1]]) * inv_h2;
  };
  auto mixed = [&](int p) {
    const int* c = &s.corner[4 * p];
    return (u[c[0]] - u[c[1]] - u[c[2]] + u[c[3]]) * 0.25 * inv_h2;
  };
  hm.a11 = 0.25 * (axis2(0) + axis2(1));
  if (m == 2) {
    hm.a22 = 0.25 * (axis2(2) + axis2(3));
    hm.re12 = 0.25 * (mixed(0) + mixed(1));
    hm.im12 = 0.25 * (mixed(2) - mixed(3));
  }
  return hm;
}

/// Linear rows pinning band values: ball bands carry a radial quadratic
/// through the sphere value (0) and two interior samples reached by
/// triquadratic interpolation; box bands carry u = 0 exactly.
struct BandRows {
  std::vector<Triplet> triplets;  // row = band uid
};

void quad_lagrange(double xi, double w[3]) {
  w[0] = 0.5 * xi * (xi - 1.0);
  w[1] = 1.0 - xi * xi;
  w[2] = 0.5 * xi * (xi + 1.0);
}

BandRows build_band_rows(const GridDomain& dom, const UnknownMap& mp) {
  BandRows rows;
  const int d = dom.dims();
  if (dom.shape() == Shape::Box) {
    for (std::size_t nd : dom.band_nodes())
      rows.triplets.emplace_back(static_cast<int>(mp.uid[nd]),
                                 static_cast<int>(mp.uid[nd]), 1.0);
    return rows;
  }
  const double R = dom.radius();
  const double h = dom.spacing();
  const double sigma = std::min(2.5 * h, 0.3 * R);
  const double r1 = R - sigma, r2 = R - 2 * sigma;
  const auto& c = dom.center();
  for (std::size_t nd : dom.band_nodes()) {
    int row = static_cast<int>(mp.uid[nd]);
    rows.triplets.emplace_back(row, row, 1.0);
    double rb = dom.dist_to_center(nd);
    auto pos = dom.position(nd);
    double lag1 = (rb - R) * (rb - r2) / ((r1 - R) * (r1 - r2));
    double lag2 = (rb - R) * (rb - r1) / ((r2 - R) * (r2 - r1));
    for (auto [rs, lag] : {std::pair{r1, lag1}, std::pair{r2, lag2}}) {
      double pt[4], t = rs / rb;
      int ctr[4];
      for (int a = 0; a < d; ++a) {
        pt[a] = c[a] + t * (pos[a] - c[a]);
        ctr[a] = static_cast<int>(std::lround((pt[a] - dom.coord(0, a)) / h));
      }
      // Shift the interpolation cell inward until it sits on solved nodes;
      // quadratic Lagrange stays exact on quadratics at any local coordinate.
      for (int attempt = 0;; ++attempt) {
        bool ok = true;
        double w[4][3];
        for (int a = 0; a < d; ++a) {
          double xi = (pt[a] - dom.coord(0, a)) / h - ctr[a];
          quad_lagrange(xi, w[a]);
        }
        std::vector<std::pair<int, double>> cloud;
        int offs[4] = {-1, -1, -1, -1};
        for (;;) {
          double wt = lag;
          int idx[4];
          for (int a = 0; a < d; ++a) {
            wt *= w[a][offs[a] + 1];
            idx[a] = ctr[a] + offs[a];
          }
          std::size_t tnode =
              dom.flatten(std::span<const int>(idx, d));
          bool off_lattice = false;
          for (int a = 0; a < d; ++a)
            if (idx[a] < 0 || idx[a] >= dom.lattice_per_axis()) off_lattice = true;
          std::int64_t tu = off_lattice ? -1 : mp.uid[tnode];
          if (tu < 0 && std::abs(wt) > 1e-300) {
            ok = false;
            break;
          }
          if (tu >= 0 && wt != 0.0)
            cloud.emplace_back(static_cast<int>(tu), -wt);
          int a = d - 1;
          for (; a >= 0; --a) {
            if (offs[a] < 1) {
              ++offs[a];
              break;
            }
            offs[a] = -1;
          }
          if (a < 0) break;
        }
        if (ok) {
          for (auto& [col, val] : cloud) rows.triplets.emplace_back(row, col, val);
          break;
        }
        if (attempt >= 4)
          throw Error(ErrorKind::DomainError,
                      "band interpolation cannot find solved nodes near node " +
                          std::to_string(nd),
                      nd);
        for (int a = 0; a < d; ++a) {
          double dir = pos[a] - c[a];
          if (dir > 0.25 * h) ctr[a] -= 1;
          else if (dir < -0.25 * h) ctr[a] += 1;
        }
      }
    }
  }
  return rows;
}

struct SystemState {
  std::vector<HermMat> hess;  // per interior node
  Eigen::VectorXd residual;
  double sup_res = 0;
  double min_eig = std::numeric_limits<double>::infinity();
  std::size_t min_eig_node = 0;
  bool positive = false;
};

}  // namespace

std::pair<ScalarField, SolveReport> solve_dirichlet(const ScalarField& f,
                                                    const SolveOptions& opts,
                                                    const ScalarField* warm) {
  Clock clock;
  opts.validate();
  DomainPtr dom = f.domain;
  if (dom->periodic())
    throw Error(ErrorKind::DomainError, "Dirichlet solve needs a ball or box domain");
  const int m = dom->m();
  const double h = dom->spacing();
  const double inv_h2 = 1.0 / (h * h);
  const auto& interior = dom->interior_nodes();
  const std::size_t n_int = interior.size();

  std::vector<double> logf(n_int);
  double sup_f = 0;
  for (std::size_t k = 0; k < n_int; ++k) {
    double fv = f[interior[k]];
    if (!(fv > 0))
      throw Error(ErrorKind::InvalidDensity,
                  "non-degenerate solve needs f > 0, violated at node " +
                      std::to_string(interior[k]),
                  interior[k]);
    logf[k] = std::log(fv);
    sup_f = std::max(sup_f, fv);
  }
  for (std::size_t nd : dom->band_nodes()) sup_f = std::max(sup_f, f[nd]);

  UnknownMap mp = map_unknowns(*dom, true);
  const int N = mp.count;
  std::vector<NodeStencil> stencils = build_stencils(*dom, mp);
  BandRows band = build_band_rows(*dom, mp);

  Eigen::VectorXd u(N);
  if (opts.init == SolveOptions::Init::Supplied || warm) {
    if (!warm)
      throw Error(ErrorKind::DomainError, "supplied initializer without a field");
    for (int i = 0; i < N; ++i) u[i] = field_value(*warm, mp.node[i]);
  } else if (opts.init == SolveOptions::Init::Barrier) {
    ScalarField psi = build_barrier(dom, sup_f);
    for (int i = 0; i < N; ++i) u[i] = psi[mp.node[i]];
  } else {
    u.setZero();  // not plurisubharmonic; the positivity gate reports it
  }

  auto evaluate = [&](const Eigen::VectorXd& v, SystemState& st) {
    st.hess.resize(n_int);
    st.residual.resize(N);
    st.sup_res = 0;
    st.min_eig = std::numeric_limits<double>::infinity();
    st.positive = true;
    for (std::size_t k = 0; k < n_int; ++k) {
      HermMat hm = hessian_from_stencil(v, stencils[k], m, inv_h2);
      st.hess[k] = hm;
      double me = hm.min_eig(m);
      if (me < st.min_eig) {
        st.min_eig = me;
        st.min_eig_node = interior[k];
      }
      double det = hm.det(m);
      if (me < opts.eig_floor || det <= 0) {
        st.positive = false;
        st.residual[stencils[k].self] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      st.residual[stencils[k].self] = std::log(det) - logf[k];
    }
    // Band rows are linear, start exactly satisfied and stay satisfied, but
    // enter the residual so the report covers the whole system.
    std::vector<double> brow(mp.count - n_int, 0.0);
    for (const auto& t : band.triplets)
      brow[t.row() - n_int] += t.value() * v[t.col()];
    for (std::size_t b = 0; b < brow.size(); ++b)
      st.residual[n_int + b] = brow[b];
    if (st.positive)
      st.sup_res = st.residual.cwiseAbs().maxCoeff();
    return st.positive;
  };

  SolveReport rep;
  rep.node_count = n_int;

  SystemState cur;
  if (!evaluate(u, cur))
    throw Error(ErrorKind::PositivityBreakdown,
                "initial iterate loses strict plurisubharmonicity at node " +
                    std::to_string(cur.min_eig_node),
                cur.min_eig_node);
  rep.residual_history.push_back(cur.sup_res);

  std::vector<Triplet> trip;
  trip.reserve(n_int * 33 + band.triplets.size());
  SpMat J(N, N);
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;

  SystemState trial;
  while (cur.sup_res > opts.tolerance && rep.iterations < opts.max_iterations) {
    trip.clear();
    for (std::size_t k = 0; k < n_int; ++k) {
      const NodeStencil& s = stencils[k];
      HermMat M = cur.hess[k].inverse(m);
      double c11 = 0.25 * M.a11 * inv_h2;
      trip.emplace_back(s.self, s.axis[0], c11);
      trip.emplace_back(s.self, s.axis[1], c11);
      trip.emplace_back(s.self, s.axis[2], c11);
      trip.emplace_back(s.self, s.axis[3], c11);
      if (m == 1) {
        trip.emplace_back(s.self, s.self, -M.a11 * inv_h2);
      } else {
        double c22 = 0.25 * M.a22 * inv_h2;
        trip.emplace_back(s.self, s.axis[4], c22);
        trip.emplace_back(s.self, s.axis[5], c22);
        trip.emplace_back(s.self, s.axis[6], c22);
        trip.emplace_back(s.self, s.axis[7], c22);
        trip.emplace_back(s.self, s.self, -(M.a11 + M.a22) * inv_h2);
        double wre = 0.125 * M.re12 * inv_h2;
        double wim = 0.125 * M.im12 * inv_h2;
        const double pw[4] = {wre, wre, wim, -wim};
        for (int p = 0; p < 4; ++p)
          for (int ci = 0; ci < 4; ++ci)
            trip.emplace_back(s.self, s.corner[4 * p + ci],
                              kCornerSign[ci][0] * kCornerSign[ci][1] * pw[p]);
      }
    }
    trip.insert(trip.end(), band.triplets.begin(), band.triplets.end());
    J.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw Error(ErrorKind::DomainError, "sparse factorization failed");
    Eigen::VectorXd delta = lu.solve(-cur.residual);

    double t = 1.0;
    bool accepted = false, positivity_blocked = false;
    while (t >= opts.min_step) {
      Eigen::VectorXd cand = u + t * delta;
      if (evaluate(cand, trial) && trial.sup_res < cur.sup_res) {
        u.swap(cand);
        std::swap(cur, trial);
        accepted = true;
        break;
      }
      positivity_blocked = !trial.positive;
      t *= opts.shrink;
    }
    if (!accepted) {
      if (positivity_blocked)
        throw Error(ErrorKind::PositivityBreakdown,
                    "line search loses strict plurisubharmonicity at node " +
                        std::to_string(trial.min_eig_node),
                    trial.min_eig_node);
      break;  // stagnated; report non-convergence, caller decides
    }
    ++rep.iterations;
    rep.residual_history.push_back(cur.sup_res);
  }

  rep.final_residual = cur.sup_res;
  rep.converged = cur.sup_res <= opts.tolerance;
  rep.min_hessian_eig = cur.min_eig;
  rep.wall_seconds = clock.seconds();

  ScalarField out(dom);
  for (int i = 0; i < N; ++i) out[mp.node[i]] = u[i];
  return {std::move(out), std::move(rep)};
}

TorusSolution solve_torus(const ScalarField& f, const SolveOptions& opts,
                          const ScalarField* warm) {
  Clock clock;
  opts.validate();
  DomainPtr dom = f.domain;
  if (!dom->periodic())
    throw Error(ErrorKind::DomainError, "torus solve needs a torus domain");
  const int m = dom->m();
  const double inv_h2 = 1.0 / (dom->spacing() * dom->spacing());
  const auto& nodes = dom->interior_nodes();
  const std::size_t n_nodes = nodes.size();
  const int N = static_cast<int>(n_nodes) + 1;  // + normalization constant c

  std::vector<double> logf(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    double fv = f[nodes[k]];
    if (!(fv > 0))
      throw Error(ErrorKind::InvalidDensity,
                  "torus solve needs f > 0, violated at node " +
                      std::to_string(nodes[k]),
                  nodes[k]);
    logf[k] = std::log(fv);
  }

  UnknownMap mp = map_unknowns(*dom, false);
  std::vector<NodeStencil> stencils = build_stencils(*dom, mp);

  Eigen::VectorXd u(N);
  u.setZero();
  if (opts.init == SolveOptions::Init::Supplied || warm) {
    if (!warm)
      throw Error(ErrorKind::DomainError, "supplied initializer without a field");
    for (std::size_t k = 0; k < n_nodes; ++k)
      u[k] = field_value(*warm, mp.node[k]);
    u[N - 1] = 0;
  }

  std::vector<double> phi_scratch(n_nodes);
  auto evaluate = [&](const Eigen::VectorXd& v, SystemState& st) {
    st.hess.resize(n_nodes);
    st.residual.resize(N);
    st.min_eig = std::numeric_limits<double>::infinity();
    st.positive = true;
    double c = v[N - 1];
    for (std::size_t k = 0; k < n_nodes; ++k) {
      HermMat gp = hessian_from_stencil(v, stencils[k], m, inv_h2).plus_identity();
      st.hess[k] = gp;
      double me = gp.min_eig(m);
      if (me < st.min_eig) {
        st.min_eig = me;
        st.min_eig_node = nodes[k];
      }
      double det = gp.det(m);
      if (me < opts.eig_floor || det <= 0) {
        st.positive = false;
        st.residual[k] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      st.residual[k] = std::log(det) - c - logf[k];
    }
    for (std::size_t k = 0; k < n_nodes; ++k) phi_scratch[k] = v[k];
    st.residual[N - 1] = pairwise_sum(phi_scratch) / double(n_nodes);
    if (st.positive) st.sup_res = st.residual.cwiseAbs().maxCoeff();
    return st.positive;
  };

  SolveReport rep;
  rep.node_count = n_nodes;

  SystemState cur;
  if (!evaluate(u, cur))
    throw Error(ErrorKind::PositivityBreakdown,
                "initial iterate loses positivity at node " +
                    std::to_string(cur.min_eig_node),
                cur.min_eig_node);
  rep.residual_history.push_back(cur.sup_res);

  std::vector<Triplet> trip;
  SpMat J(N, N);
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  SystemState trial;

  while (cur.sup_res > opts.tolerance && rep.iterations < opts.max_iterations) {
    trip.clear();
    for (std::size_t k = 0; k < n_nodes; ++k) {
      const NodeStencil& s = stencils[k];
      HermMat M = cur.hess[k].inverse(m);
      double c11 = 0.25 * M.a11 * inv_h2;
      for (int a = 0; a < 4; ++a) trip.emplace_back(s.self, s.axis[a], c11);
      if (m == 1) {
        trip.emplace_back(s.self, s.self, -M.a11 * inv_h2);
      } else {
        double c22 = 0.25 * M.a22 * inv_h2;
        for (int a = 4; a < 8; ++a) trip.emplace_back(s.self, s.axis[a], c22);
        trip.emplace_back(s.self, s.self, -(M.a11 + M.a22) * inv_h2);
        double wre = 0.125 * M.re12 * inv_h2;
        double wim = 0.125 * M.im12 * inv_h2;
        const double pw[4] = {wre, wre, wim, -wim};
        for (int p = 0; p < 4; ++p)
          for (int ci = 0; ci < 4; ++ci)
            trip.emplace_back(s.self, s.corner[4 * p + ci],
                              kCornerSign[ci][0] * kCornerSign[ci][1] * pw[p]);
      }
      trip.emplace_back(s.self, N - 1, -1.0);  // d residual / d c
    }
    double w = 1.0 / double(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k)
      trip.emplace_back(N - 1, static_cast<int>(k), w);
    J.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw Error(ErrorKind::DomainError, "sparse factorization failed");
    Eigen::VectorXd delta = lu.solve(-cur.residual);

    double t = 1.0;
    bool accepted = false, positivity_blocked = false;
    while (t >= opts.min_step) {
      Eigen::VectorXd cand = u + t * delta;
      if (evaluate(cand, trial) && trial.sup_res < cur.sup_res) {
        u.swap(cand);
        std::swap(cur, trial);
        accepted = true;
        break;
      }
      positivity_blocked = !trial.positive;
      t *= opts.shrink;
    }
    if (!accepted) {
      if (positivity_blocked)
        throw Error(ErrorKind::PositivityBreakdown,
                    "line search loses positivity at node " +
                        std::to_string(trial.min_eig_node),
                    trial.min_eig_node);
      break;
    }
    ++rep.iterations;
    rep.residual_history.push_back(cur.sup_res);
  }

  rep.final_residual = cur.sup_res;
  rep.converged = cur.sup_res <= opts.tolerance;
  rep.min_hessian_eig = cur.min_eig;
  rep.wall_seconds = clock.seconds();

  TorusSolution sol{ScalarField(dom), u[N - 1], std::move(rep)};
  for (std::size_t k = 0; k < n_nodes; ++k) sol.phi[mp.node[k]] = u[k];
  return sol;
}

}  // namespace cma
