#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "clifford.hpp"

using namespace cdl;

namespace {
std::mt19937_64 rng(42);
double uni() { return 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0; }
VecC random_vec(int d) {
  VecC v(d);
  for (int i = 0; i < d; ++i) v(i) = cplx(uni(), uni());
  return v;
}
}  // namespace

TEST_CASE("anticommutation relations for all signatures with n <= 8") {
  for (int n = 1; n <= 8; ++n)
    for (int p = 0; p <= n; ++p) {
      const CliffordRep& rep = clifford_rep(p, n - p);
      const int d = rep.rep_dim();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          MatC ac = rep.gamma(i) * rep.gamma(j) + rep.gamma(j) * rep.gamma(i);
          MatC expect = MatC::Zero(d, d);
          if (i == j) expect = -2.0 * rep.eps(i) * MatC::Identity(d, d);
          CHECK((ac - expect).cwiseAbs().maxCoeff() <= 1e-14);
        }
    }
}

TEST_CASE("pinned matrix entries for (0,2) and (1,1)") {
  // Phi(e1) = g1 = diag(i, -i), Phi(e2) = g2 = offdiag(i, i)
  const CliffordRep& r02 = clifford_rep(0, 2);
  CHECK(r02.gamma(0)(0, 0) == cplx(0, 1));
  CHECK(r02.gamma(0)(1, 1) == cplx(0, -1));
  CHECK(r02.gamma(0)(0, 1) == cplx(0, 0));
  CHECK(r02.gamma(1)(0, 1) == cplx(0, 1));
  CHECK(r02.gamma(1)(1, 0) == cplx(0, 1));
  // (1,1): Phi(e1) = i g1 = diag(-1, 1), squares to +Id
  const CliffordRep& r11 = clifford_rep(1, 1);
  CHECK(r11.gamma(0)(0, 0) == cplx(-1, 0));
  CHECK(r11.gamma(0)(1, 1) == cplx(1, 0));
  MatC sq = r11.gamma(0) * r11.gamma(0);
  CHECK((sq - MatC::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("hermitian product: b hermitian, <v,v> real, Riemannian = standard") {
  for (auto [p, q] : {std::pair{0, 3}, {1, 2}, {2, 3}, {1, 4}, {0, 6}}) {
    const CliffordRep& rep = clifford_rep(p, q);
    CHECK((rep.b_matrix() - rep.b_matrix().adjoint()).cwiseAbs().maxCoeff() <=
          1e-14);
    for (int t = 0; t < 100; ++t) {
      VecC v = random_vec(rep.rep_dim());
      CHECK(std::abs(rep.product(v, v).imag()) <=
            1e-14 * std::abs(rep.product(v, v).real()) + 1e-14);
    }
  }
  const CliffordRep& r = clifford_rep(0, 3);
  VecC v = random_vec(2), w = random_vec(2);
  cplx std_prod = v.transpose() * w.conjugate();
  CHECK(std::abs(r.product(v, w) - std_prod) <= 1e-14);
}

TEST_CASE("identity (3) sign at representation level") {
  for (auto [p, q] : {std::pair{0, 3}, {1, 2}, {1, 1}, {2, 3}, {1, 4}}) {
    const CliffordRep& rep = clifford_rep(p, q);
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < rep.n(); ++j) {
      VecC v = random_vec(rep.rep_dim()), w = random_vec(rep.rep_dim());
      cplx r = rep.product(rep.gamma(j) * v, w) +
               sign * rep.product(v, rep.gamma(j) * w);
      CHECK(std::abs(r) <= 1e-13);
    }
  }
}

TEST_CASE("invariance under even products of unit vectors") {
  for (auto [p, q] : {std::pair{0, 4}, {1, 2}, {2, 3}}) {
    const CliffordRep& rep = clifford_rep(p, q);
    const int n = rep.n(), d = rep.rep_dim();
    for (int trial = 0; trial < 20; ++trial) {
      // product of pairs of same-sign unit vectors lies in Spin_0
      MatC u = MatC::Identity(d, d);
      int pairs = 1 + (trial % 3);
      for (int t = 0; t < pairs; ++t) {
        bool timelike = p > 1 && (rng() & 1);
        int lo = timelike ? 0 : p, hi = timelike ? p : n;
        auto unit_vec = [&]() {
          MatC m = MatC::Zero(d, d);
          std::vector<double> comp(n, 0.0);
          double norm2 = 0.0;
          for (int i = lo; i < hi; ++i) {
            comp[i] = uni();
            norm2 += rep.eps(i) * comp[i] * comp[i];
          }
          double s = 1.0 / std::sqrt(std::abs(norm2));
          for (int i = lo; i < hi; ++i)
            if (comp[i] != 0.0) m += s * comp[i] * rep.gamma(i);
          return m;
        };
        u = u * unit_vec() * unit_vec();
      }
      VecC v = random_vec(d), w = random_vec(d);
      cplx lhs = rep.product(u * v, u * w);
      cplx rhs = rep.product(v, w);
      CHECK(std::abs(lhs - rhs) <=
            1e-12 * std::max(1.0, std::abs(rhs)) * u.norm() * u.norm());
    }
  }
}

TEST_CASE("volume element squares to a sign (even n)") {
  for (auto [p, q] : {std::pair{0, 4}, {1, 3}, {2, 2}, {0, 6}, {1, 5}}) {
    const CliffordRep& rep = clifford_rep(p, q);
    MatC w2 = rep.volume_element() * rep.volume_element();
    const int d = rep.rep_dim();
    double plus = (w2 - MatC::Identity(d, d)).cwiseAbs().maxCoeff();
    double minus = (w2 + MatC::Identity(d, d)).cwiseAbs().maxCoeff();
    CHECK(std::min(plus, minus) <= 1e-13);
  }
}

TEST_CASE("form action: 1-form and 2-form cases reduce to gamma products") {
  const CliffordRep& rep = clifford_rep(0, 4);
  VecC v = random_vec(rep.rep_dim());
  // w = e_1^flat: action = gamma_1 (Riemannian: eps = +1)
  VecC a = rep.form_action(
      1, [](std::span<const int> idx) { return idx[0] == 0 ? cplx(1) : cplx(0); },
      v);
  CHECK((a - rep.gamma(0) * v).cwiseAbs().maxCoeff() <= 1e-14);
  // w = e_1^flat wedge e_2^flat: single ordered pair
  VecC b2 = rep.form_action(
      2,
      [](std::span<const int> idx) {
        return (idx[0] == 0 && idx[1] == 1) ? cplx(1) : cplx(0);
      },
      v);
  CHECK((b2 - rep.gamma(0) * (rep.gamma(1) * v)).cwiseAbs().maxCoeff() <=
        1e-14);
  // random antisymmetric 2-form: ordered sum equals halved full sum
  MatC W(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) {
      W(i, j) = cplx(uni(), uni());
      W(j, i) = -W(i, j);
    }
  for (int i = 0; i < 4; ++i) W(i, i) = 0;
  VecC c = rep.form_action(
      2, [&](std::span<const int> idx) { return W(idx[0], idx[1]); }, v);
  VecC brute = VecC::Zero(rep.rep_dim());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      brute += 0.5 * W(i, j) * (rep.gamma(i) * (rep.gamma(j) * v));
  CHECK((c - brute).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("tractor splitting data") {
  for (auto [p, q] : {std::pair{0, 2}, {1, 1}, {0, 3}, {1, 2}, {0, 4}, {1, 4},
                      {0, 5}, {2, 3}}) {
    const TractorCliffordRep& tr = tractor_rep(p, q);
    const int D = tr.inner_dim();
    // isotropy and pairing: f+ f- + f- f+ = -2 Id, f+^2 = f-^2 = 0
    MatC ac = tr.f_plus() * tr.f_minus() + tr.f_minus() * tr.f_plus();
    CHECK((ac + 2.0 * MatC::Identity(D, D)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((tr.f_plus() * tr.f_plus()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((tr.f_minus() * tr.f_minus()).cwiseAbs().maxCoeff() <= 1e-14);
    // embed has full rank base_dim = half of inner dim
    CHECK(tr.base_dim() * 2 == D);
    // f+ annihilates the image of embed
    CHECK((tr.f_plus() * tr.embed()).cwiseAbs().maxCoeff() <= 1e-12);
    // intertwining: mid_gamma(j) E = E gamma_j
    for (int j = 0; j < p + q; ++j) {
      MatC r = tr.mid_gamma(j) * tr.embed() - tr.embed() * tr.base().gamma(j);
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-12);
    }
    // split inverts assemble on 100 random pairs
    for (int t = 0; t < 100; ++t) {
      VecC w1 = random_vec(tr.base_dim()), w2 = random_vec(tr.base_dim());
      auto [a, b] = tr.split(tr.assemble(w1, w2));
      CHECK((a - w1).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((b - w2).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("odd base dimension uses the flipped inner component") {
  CHECK(tractor_rep(0, 3).flipped_inner());
  CHECK(tractor_rep(1, 2).flipped_inner());
  CHECK(tractor_rep(0, 5).flipped_inner());
  CHECK_FALSE(tractor_rep(0, 2).flipped_inner());
  CHECK_FALSE(tractor_rep(0, 4).flipped_inner());
}
