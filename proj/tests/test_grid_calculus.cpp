#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cma/calculus.hpp"
#include "cma/expression.hpp"
#include "cma/rng.hpp"

using namespace cma;

namespace {

DomainPtr ball2(int n) {
  return std::make_shared<GridDomain>(GridDomain::ball(2, n, 1.0));
}

DomainPtr box2(int n, double extent = 2.0) {
  return std::make_shared<GridDomain>(GridDomain::box(2, n, extent));
}

}  // namespace

TEST_CASE("node classification matches the ball margin rule") {
  auto dom = std::make_shared<GridDomain>(GridDomain::ball(1, 17, 1.0));
  double h = dom->spacing();
  std::size_t interior = 0, band = 0;
  for (std::size_t nd = 0; nd < dom->lattice_size(); ++nd) {
    double dist = dom->dist_to_center(nd);
    NodeClass cls = dom->node_class(nd);
    if (dist < 1.0 - h) CHECK(cls == NodeClass::Interior);
    else if (dist < 1.0 + h) CHECK(cls == NodeClass::Band);
    else CHECK(cls == NodeClass::Exterior);
    interior += cls == NodeClass::Interior;
    band += cls == NodeClass::Band;
  }
  CHECK(interior == dom->interior_nodes().size());
  CHECK(band == dom->band_nodes().size());
  CHECK(interior > 0);
}

TEST_CASE("torus has no band or exterior nodes and wraps") {
  auto dom = std::make_shared<GridDomain>(GridDomain::torus(1, 8));
  CHECK(dom->interior_nodes().size() == dom->lattice_size());
  CHECK(dom->band_nodes().empty());
  int delta[2] = {-1, 0};
  std::size_t wrapped = dom->offset_node(0, std::span<const int>(delta, 2));
  auto idx = dom->unflatten(wrapped);
  CHECK(idx[0] == 7);
  CHECK(idx[1] == 0);
}

TEST_CASE("grid rejects undersized lattices") {
  CHECK_THROWS_AS(GridDomain::ball(2, 4, 1.0), Error);
  CHECK_THROWS_AS(GridDomain::ball(3, 9, 1.0), Error);
}

TEST_CASE("complex hessian of |z|^2 - 1 is the identity") {
  auto dom = ball2(9);
  auto u = sample_function(dom, [](std::array<double, 4> x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - 1.0;
  });
  HermitianField hess = complex_hessian(u);
  for (std::size_t nd : dom->interior_nodes()) {
    CHECK(hess[nd].a11 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hess[nd].a22 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(hess[nd].re12) < 1e-12);
    CHECK(std::abs(hess[nd].im12) < 1e-12);
  }
}

TEST_CASE("complex hessian of a constant vanishes exactly") {
  auto dom = ball2(9);
  auto u = sample_function(dom, [](std::array<double, 4>) { return 3.25; });
  HermitianField hess = complex_hessian(u);
  for (std::size_t nd : dom->interior_nodes()) {
    CHECK(hess[nd].a11 == 0.0);
    CHECK(hess[nd].a22 == 0.0);
    CHECK(hess[nd].re12 == 0.0);
    CHECK(hess[nd].im12 == 0.0);
  }
}

TEST_CASE("pluriharmonic Re(z1^2) has zero complex hessian") {
  auto dom = ball2(11);
  auto u = sample_function(dom, [](std::array<double, 4> x) {
    return x[0] * x[0] - x[1] * x[1];
  });
  HermitianField hess = complex_hessian(u);
  for (std::size_t nd : dom->interior_nodes()) {
    CHECK(std::abs(hess[nd].a11) < 1e-10);
    CHECK(std::abs(hess[nd].a22) < 1e-10);
    CHECK(std::abs(hess[nd].re12) < 1e-10);
    CHECK(std::abs(hess[nd].im12) < 1e-10);
  }
}

TEST_CASE("laplacian examples: |z|^2 and Re(z1^3)") {
  auto dom = ball2(9);
  auto sq = sample_function(dom, [](std::array<double, 4> x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
  });
  ScalarField lap = complex_laplacian(sq);
  for (std::size_t nd : dom->interior_nodes())
    CHECK(lap[nd] == doctest::Approx(2.0).epsilon(1e-12));

  // Re(z1^3) = x^3 - 3 x y^2 is harmonic; cubics difference exactly.
  auto cube = sample_function(dom, [](std::array<double, 4> x) {
    return x[0] * x[0] * x[0] - 3.0 * x[0] * x[1] * x[1];
  });
  ScalarField lap3 = complex_laplacian(cube);
  for (std::size_t nd : dom->interior_nodes()) CHECK(std::abs(lap3[nd]) < 1e-9);
}

TEST_CASE("random quadratics match the symbolic laplacian") {
  auto dom = box2(9);
  Rng rng(1234);
  for (int trial = 0; trial < 5; ++trial) {
    double q[4][4], lin[4];
    for (int a = 0; a < 4; ++a) {
      lin[a] = rng.uniform(-1, 1);
      for (int b = 0; b <= a; ++b) q[a][b] = q[b][a] = rng.uniform(-1, 1);
    }
    auto u = sample_function(dom, [&](std::array<double, 4> x) {
      double v = 0;
      for (int a = 0; a < 4; ++a) {
        v += lin[a] * x[a];
        for (int b = 0; b < 4; ++b) v += 0.5 * q[a][b] * x[a] * x[b];
      }
      return v;
    });
    // complex trace = (1/4) * real trace of the quadratic form
    double expect = 0.25 * (q[0][0] + q[1][1] + q[2][2] + q[3][3]);
    ScalarField lap = complex_laplacian(u);
    for (std::size_t nd : dom->interior_nodes())
      CHECK(lap[nd] == doctest::Approx(expect).epsilon(1e-11));
  }
}

TEST_CASE("hessian trace equals the laplacian node-wise") {
  auto dom = box2(11);
  auto u = sample_expression(dom, Expression::parse("exp(x1)*sin(y2)+x2*x2*y1"));
  HermitianField hess = complex_hessian(u);
  ScalarField lap = complex_laplacian(u);
  for (std::size_t nd : dom->interior_nodes())
    CHECK(std::abs(hess[nd].trace(2) - lap[nd]) < 1e-12);
}

TEST_CASE("hessian is hermitian: conjugate-transpose reconstruction is exact") {
  auto dom = box2(9);
  auto u = sample_expression(dom, Expression::parse("exp(x1+y2)*cos(x2)+y1*y1"));
  HermitianField hess = complex_hessian(u);
  for (std::size_t nd : dom->interior_nodes()) {
    // storage splits the off-diagonal entry, so M == conj(transpose(M)) exactly
    std::complex<double> m12 = hess[nd].off();
    std::complex<double> m21 = std::conj(m12);
    CHECK(m12.real() == m21.real());
    CHECK(m12.imag() == -m21.imag());
    // cross-stencil consistency of the symmetric corner stencil
    double swapped = d2_mixed_at(u, nd, 2, 0);
    double direct = d2_mixed_at(u, nd, 0, 2);
    CHECK(std::abs(direct - swapped) <
          1e-13 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("hessian converges at second order on exp(Re z1)|z2|^2") {
  auto analytic = [](std::array<double, 4> x) {
    double e = std::exp(x[0]);
    double z2sq = x[2] * x[2] + x[3] * x[3];
    HermMat h;
    h.a11 = 0.25 * e * z2sq;
    h.a22 = e;
    h.re12 = 0.5 * e * x[2];
    h.im12 = 0.5 * e * x[3];
    return h;
  };
  std::array<double, 4> pt{0.25, 0.0, -0.5, 0.25};
  double errs[2];
  int grids[2] = {9, 17};
  for (int g = 0; g < 2; ++g) {
    auto dom = box2(grids[g]);
    auto u = sample_function(dom, [](std::array<double, 4> x) {
      return std::exp(x[0]) * (x[2] * x[2] + x[3] * x[3]);
    });
    int idx[4];
    for (int a = 0; a < 4; ++a)
      idx[a] = static_cast<int>(std::lround((pt[a] + 1.0) / dom->spacing()));
    std::size_t nd = dom->flatten(std::span<const int>(idx, 4));
    HermMat exact = analytic(pt);
    HermMat got = hessian_at(u, nd);
    errs[g] = std::max({std::abs(got.a11 - exact.a11), std::abs(got.a22 - exact.a22),
                        std::abs(got.re12 - exact.re12),
                        std::abs(got.im12 - exact.im12)});
  }
  CHECK(errs[0] / errs[1] >= 3.5);
}

TEST_CASE("det/inv closed forms: identity and diag(2,3)") {
  auto dom = ball2(9);
  HermitianField idf(dom);
  for (std::size_t nd : dom->interior_nodes()) idf[nd] = HermMat{1, 1, 0, 0};
  DetInvResult r = hermitian_det_inv(idf);
  for (std::size_t nd : dom->interior_nodes()) {
    CHECK(r.det[nd] == 1.0);
    CHECK(r.inverse[nd].a11 == 1.0);
    CHECK(r.inverse[nd].a22 == 1.0);
  }
  CHECK(r.singular_nodes.empty());

  HermitianField dd(dom);
  for (std::size_t nd : dom->interior_nodes()) dd[nd] = HermMat{2, 3, 0, 0};
  DetInvResult r2 = hermitian_det_inv(dd);
  for (std::size_t nd : dom->interior_nodes()) {
    CHECK(r2.det[nd] == 6.0);
    CHECK(r2.inverse[nd].a11 == doctest::Approx(0.5));
    CHECK(r2.inverse[nd].a22 == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("det/inv matches an eigendecomposition oracle on random matrices") {
  auto dom = ball2(9);
  Rng rng(99);
  HermitianField hf(dom);
  for (std::size_t nd : dom->interior_nodes()) {
    // positive definite: A = B B^H + 0.1 I
    std::complex<double> b11(rng.gaussian(), rng.gaussian());
    std::complex<double> b12(rng.gaussian(), rng.gaussian());
    std::complex<double> b21(rng.gaussian(), rng.gaussian());
    std::complex<double> b22(rng.gaussian(), rng.gaussian());
    double a11 = std::norm(b11) + std::norm(b12) + 0.1;
    double a22 = std::norm(b21) + std::norm(b22) + 0.1;
    std::complex<double> off = b11 * std::conj(b21) + b12 * std::conj(b22);
    hf[nd] = HermMat{a11, a22, off.real(), off.imag()};
  }
  DetInvResult r = hermitian_det_inv(hf);
  for (std::size_t nd : dom->interior_nodes()) {
    Eigen::Matrix2cd a;
    a << hf[nd].a11, hf[nd].off(), std::conj(hf[nd].off()), hf[nd].a22;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(a);
    double det_oracle = es.eigenvalues()[0] * es.eigenvalues()[1];
    Eigen::Matrix2cd inv_oracle = es.eigenvectors() *
                                  es.eigenvalues().cwiseInverse().asDiagonal() *
                                  es.eigenvectors().adjoint();
    CHECK(r.det[nd] == doctest::Approx(det_oracle).epsilon(1e-10));
    CHECK(r.inverse[nd].a11 ==
          doctest::Approx(inv_oracle(0, 0).real()).epsilon(1e-10));
    CHECK(r.inverse[nd].a22 ==
          doctest::Approx(inv_oracle(1, 1).real()).epsilon(1e-10));
    CHECK(r.inverse[nd].off().real() ==
          doctest::Approx(inv_oracle(0, 1).real()).epsilon(1e-10));
    CHECK(r.inverse[nd].off().imag() ==
          doctest::Approx(inv_oracle(0, 1).imag()).epsilon(1e-10));
  }
}

TEST_CASE("stencil into valueless exterior raises boundary-data-missing") {
  auto dom = ball2(9);
  ScalarField u(dom);
  for (std::size_t nd : dom->interior_nodes()) u[nd] = 1.0;  // band left NaN
  bool threw = false;
  try {
    complex_hessian(u);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.kind() == ErrorKind::BoundaryDataMissing);
  }
  CHECK(threw);
}

TEST_CASE("pairwise sum is exact on integers and order-stable") {
  std::vector<double> xs(1000);
  for (int i = 0; i < 1000; ++i) xs[i] = i + 1;
  CHECK(pairwise_sum(xs) == 500500.0);
}
