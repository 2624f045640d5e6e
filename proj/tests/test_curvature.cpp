#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "curvature.hpp"
#include "oracle_fd.hpp"

using namespace cdl;

namespace {
std::mt19937_64 rng(7);
double uni() { return 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0; }

double rel(double num, double den) { return num / std::max(den, 1e-30); }
}  // namespace

TEST_CASE("flat chart: every curvature tensor vanishes") {
  for (auto [n, p] : {std::pair{3, 0}, {3, 1}, {4, 2}, {5, 0}}) {
    Geometry geo(MetricChart::flat(n, p), std::vector<double>(n, 0.1), 6);
    CHECK(geo.riemann().max_abs() == 0.0);
    CHECK(geo.ricci().max_abs() == 0.0);
    CHECK(geo.scalar_curvature().max_abs() == 0.0);
    if (n > 2) {
      CHECK(geo.weyl().max_abs() == 0.0);
      CHECK(geo.cotton().max_abs() == 0.0);
      CHECK(geo.bach().max_abs() == 0.0);
    }
  }
}

TEST_CASE("unit sphere stereographic: closed-form curvature") {
  for (int n : {3, 5}) {
    std::vector<double> x0(n);
    for (int i = 0; i < n; ++i) x0[i] = 0.3 * uni();
    Geometry geo(MetricChart::sphere(n), x0, 6);
    // tau = n(n-1), J = n/2, P = g/2, W = C = B = 0
    Jet tau = geo.scalar_curvature();
    CHECK(std::abs(tau.value() - cplx(n * (n - 1.0))) <= 1e-9 * n * n);
    CHECK(std::abs(geo.j_norm().value() - cplx(n / 2.0)) <= 1e-9 * n);
    const auto& P = geo.schouten();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet d = P(i, j) - 0.5 * geo.g(i, j).truncated(P.order());
        worst = std::max(worst, d.max_abs());
      }
    CHECK(rel(worst, geo.metric().max_abs()) <= 1e-9);
    CHECK(rel(geo.weyl().max_abs(), geo.riemann().max_abs()) <= 1e-9);
    CHECK(rel(geo.cotton().max_abs(), 1.0) <= 1e-9);
    CHECK(rel(geo.bach().max_abs(), 1.0) <= 1e-9);
  }
}

TEST_CASE("constant-curvature identity: P (KN) g = -(1/2) g (KN) g relation on the sphere") {
  const int n = 3;
  std::vector<double> x0 = {0.2, -0.1, 0.15};
  Geometry geo(MetricChart::sphere(n), x0, 5);
  const int K = geo.schouten().order();
  TensorField gT = geo.metric().truncated(K);
  TensorField kn_pg = kulkarni_nomizu(geo.schouten(), gT);
  TensorField kn_gg = kulkarni_nomizu(gT, gT);
  double worst = 0.0;
  // P = g/2 so P (KN) g = (1/2) g (KN) g, and R = -(1/2) g (KN) g so W = 0
  for (std::size_t i = 0; i < kn_pg.size(); ++i) {
    Jet d = kn_pg.flat_at(i) - 0.5 * kn_gg.flat_at(i);
    worst = std::max(worst, d.max_abs());
  }
  CHECK(rel(worst, kn_gg.max_abs()) <= 1e-10);
  worst = 0.0;
  const auto& R = geo.riemann();
  for (std::size_t i = 0; i < R.size(); ++i) {
    Jet d = R.flat_at(i) + 0.5 * kn_gg.flat_at(i).truncated(R.order());
    worst = std::max(worst, d.max_abs());
  }
  CHECK(rel(worst, R.max_abs()) <= 1e-10);
}

TEST_CASE("Kulkarni-Nomizu algebra") {
  const int n = 4;
  // g (KN) g = 2(g(X,Z)g(Y,W) - g(X,W)g(Y,Z))
  Geometry geo(MetricChart::perturbed(n, 0, 11, 5e-2, 3),
               std::vector<double>(n, 0.05), 4);
  TensorField gT = geo.metric();
  TensorField gg = kulkarni_nomizu(gT, gT);
  double worst = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        for (int w = 0; w < n; ++w) {
          Jet expect =
              2.0 * (geo.g(x, z) * geo.g(y, w) - geo.g(x, w) * geo.g(y, z));
          worst = std::max(worst, (gg(x, y, z, w) - expect).max_abs());
        }
  CHECK(rel(worst, gg.max_abs()) <= 1e-13);
  // symmetry under pair exchange for symmetric A, B
  TensorField A(n, 2, n, 3), B(n, 2, n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet a(n, 3), b(n, 3);
      for (std::size_t t = 0; t < a.size(); ++t) {
        a[t] = cplx(uni(), uni());
        b[t] = cplx(uni(), uni());
      }
      A(i, j) = a; A(j, i) = a;
      B(i, j) = b; B(j, i) = b;
    }
  TensorField ab = kulkarni_nomizu(A, B);
  worst = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        for (int w = 0; w < n; ++w)
          worst = std::max(worst, (ab(x, y, z, w) - ab(z, w, x, y)).max_abs());
  CHECK(rel(worst, ab.max_abs()) <= 1e-13);
}

TEST_CASE("symmetries and traces on a generic chart") {
  for (auto [n, p] : {std::pair{3, 0}, {3, 1}, {4, 0}, {5, 0}}) {
    Geometry geo(MetricChart::perturbed(n, p, 100 + n + p, 6e-2, 3),
                 std::vector<double>(n, 0.04), 6);
    const auto& R = geo.riemann();
    double scale = std::max(R.max_abs(), 1e-30);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            // antisymmetries and pair symmetry
            worst = std::max(worst,
                             (R(i, j, k, l) + R(j, i, k, l)).max_abs());
            worst = std::max(worst,
                             (R(i, j, k, l) + R(i, j, l, k)).max_abs());
            worst = std::max(worst,
                             (R(i, j, k, l) - R(k, l, i, j)).max_abs());
            // first Bianchi
            Jet b = R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l);
            worst = std::max(worst, b.max_abs());
          }
    CHECK(rel(worst, scale) <= 1e-10);

    // Ricci symmetric
    const auto& Rc = geo.ricci();
    worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::max(worst, (Rc(i, j) - Rc(j, i)).max_abs());
    CHECK(rel(worst, Rc.max_abs()) <= 1e-12);

    // Weyl totally trace-free
    const auto& W = geo.weyl();
    for (auto [a, b] : {std::pair{0, 2}, {0, 3}, {2, 3}}) {
      TensorField tr = geo.trace_g(W, a, b);
      CHECK(rel(tr.max_abs(), std::max(W.max_abs(), scale)) <= 1e-10);
    }

    // Cotton antisymmetric in first two slots; g-trace over (0,2) vanishes
    const auto& C = geo.cotton();
    worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          worst = std::max(worst, (C(i, j, k) + C(j, i, k)).max_abs());
    CHECK(rel(worst, C.max_abs()) <= 1e-12);
    TensorField ctr = geo.trace_g(C, 0, 2);
    CHECK(rel(ctr.max_abs(), std::max(C.max_abs(), 1.0)) <= 1e-10);

    // Bach symmetric
    const auto& B = geo.bach();
    worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::max(worst, (B(i, j) - B(j, i)).max_abs());
    CHECK(rel(worst, std::max(B.max_abs(), 1.0)) <= 1e-9);
  }
}

TEST_CASE("metricity, sharp/flat inversion, Schouten divergence") {
  const int n = 4;
  Geometry geo(MetricChart::perturbed(n, 1, 55, 5e-2, 3),
               std::vector<double>{0.02, -0.05, 0.04, 0.03}, 6);
  // cov_deriv(g) = 0
  TensorField dg = geo.cov_deriv(geo.metric());
  CHECK(rel(dg.max_abs(), geo.metric().max_abs()) <= 1e-13);

  // sharp(flat(X)) = X for random vectors
  for (int t = 0; t < 20; ++t) {
    std::vector<Jet> X;
    for (int i = 0; i < n; ++i) {
      Jet j(n, 4);
      for (std::size_t s = 0; s < j.size(); ++s) j[s] = cplx(uni(), uni());
      X.push_back(j);
    }
    auto back = geo.sharp(geo.flat(X));
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, (back[i] - X[i]).max_abs());
      scale = std::max(scale, X[i].max_abs());
    }
    CHECK(rel(worst, scale) <= 1e-12);
  }

  // contracted second Bianchi: tr_g (nabla P)(X) = dJ(X)
  TensorField dP = geo.cov_deriv(geo.schouten());
  const int K = dP.order();
  for (int x = 0; x < n; ++x) {
    Jet acc(n, K);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        acc.add_product(geo.ginv(a, b).truncated(K), dP(a, b, x), 1.0);
    Jet dJ = geo.j_norm().truncated(K + 1).partial(x);
    CHECK(rel((acc - dJ).max_abs(),
              std::max(dJ.max_abs(), acc.max_abs())) <= 1e-9);
  }
}

TEST_CASE("finite-difference oracle: Ricci vs FD of Christoffel values") {
  const int n = 3;
  MetricChart chart = MetricChart::perturbed(n, 0, 77, 1e-2, 3);
  std::vector<double> x0 = {0.05, -0.03, 0.08};
  Geometry geo(chart, x0, 4);
  // Ric_{ik} = d_a Gamma^a_{ik} - d_i Gamma^a_{ak} + Gamma-quadratic terms.
  // FD the first derivatives of Gamma via geometries at shifted points.
  const double h = 1e-4;
  auto gamma_at = [&](std::vector<double> pt, int a, int b, int c) {
    Geometry g2(chart, std::move(pt), 2);
    return g2.christoffel(a, b, c).value().real();
  };
  auto dgamma = [&](int d, int a, int b, int c) {
    std::vector<double> xp = x0, xm = x0;
    xp[d] += h;
    xm[d] -= h;
    return (gamma_at(xp, a, b, c) - gamma_at(xm, a, b, c)) / (2 * h);
  };
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) {
        acc += dgamma(a, a, i, k) - dgamma(i, a, a, k);
        for (int m = 0; m < n; ++m)
          acc += geo.christoffel(a, a, m).value().real() *
                     geo.christoffel(m, i, k).value().real() -
                 geo.christoffel(a, i, m).value().real() *
                     geo.christoffel(m, a, k).value().real();
      }
      double ric = geo.ricci()(i, k).value().real();
      worst = std::max(worst, std::abs(acc - ric));
      scale = std::max(scale, std::abs(ric));
    }
  CHECK(worst / std::max(scale, 1e-3) <= 1e-6);
}

TEST_CASE("conformal covariance of the all-lower Weyl tensor") {
  const int n = 4;
  MetricChart base = MetricChart::perturbed(n, 0, 91, 5e-2, 3);
  AnalyticScalar sig(n);
  sig.add_monomial({1, 0, 0, 0}, 0.2);
  sig.add_monomial({0, 1, 0, 0}, -0.13);
  sig.add_monomial({1, 1, 0, 0}, 0.21);
  sig.add_monomial({0, 0, 2, 0}, 0.17);
  MetricChart hat = base.rescaled(sig);
  std::vector<double> x0 = {0.02, 0.03, -0.04, 0.01};
  Geometry ga(base, x0, 5), gb(hat, x0, 5);
  const auto& Wa = ga.weyl();
  const auto& Wb = gb.weyl();
  Jet e2 = exp(2.0 * sig.eval(x0, Wa.order()));
  double worst = 0.0;
  for (std::size_t i = 0; i < Wa.size(); ++i)
    worst = std::max(worst,
                     (Wb.flat_at(i) - e2 * Wa.flat_at(i)).max_abs());
  CHECK(rel(worst, Wa.max_abs()) <= 1e-9);
}

TEST_CASE("degenerate and invalid charts are rejected") {
  // large perturbation flips an eigenvalue away from the origin
  MetricChart wild = MetricChart::perturbed(3, 0, 5, 5.0, 2);
  CHECK_THROWS_AS(Geometry(wild, {0.9, 0.8, 0.9}, 3), Error);
  MetricChart h = MetricChart::hyperbolic(3, 1.0);
  CHECK_THROWS_AS(Geometry(h, {2.0, 0.0, 0.0}, 3), Error);
}
