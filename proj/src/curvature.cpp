// SPDX-License-Identifier: Apache-2.0
#include "curvature.hpp"

#include <Eigen/Dense>

namespace cdl {

TensorField TensorField::truncated(int new_order) const {
  if (new_order == order()) return *this;
  TensorField r = *this;
  for (auto& j : r.c_) j = j.truncated(new_order);
  return r;
}

double TensorField::max_abs() const {
  double m = 0.0;
  for (const auto& j : c_) m = std::max(m, j.max_abs());
  return m;
}

TensorField kulkarni_nomizu(const TensorField& A, const TensorField& B) {
  if (A.dim() != B.dim() || A.rank() != 2 || B.rank() != 2)
    throw Error(errc::shape_mismatch, "kulkarni_nomizu expects two 2-tensors");
  const int n = A.dim();
  const int K = std::min(A.order(), B.order());
  TensorField out(n, 4, A.flat_at(0).n_vars(), K);
  auto a = [&](int i, int j) { return A(i, j).truncated(K); };
  auto b = [&](int i, int j) { return B(i, j).truncated(K); };
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        for (int w = 0; w < n; ++w)
          out(x, y, z, w) = a(x, z) * b(y, w) + a(y, w) * b(x, z) -
                            a(x, w) * b(y, z) - a(y, z) * b(x, w);
  return out;
}

Geometry::Geometry(const MetricChart& chart, std::vector<double> x0,
                   int metric_order)
    : chart_(chart), x0_(std::move(x0)), n_(chart.dim()), km_(metric_order),
      eps_(chart.eps()) {
  if (static_cast<int>(x0_.size()) != n_)
    throw Error(errc::invalid_argument, "base point dimension mismatch");
  chart_.validate_at(x0_);
  g_ = chart_.metric_jets(x0_, km_);
  build_inverse();
  g_t_ = TensorField(n_, 2, n_, km_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g_t_(i, j) = g_[i * n_ + j];
}

void Geometry::build_inverse() {
  if (auto gi = chart_.inverse_metric_jets(x0_, km_)) {
    ginv_ = std::move(*gi);
    return;
  }
  // series inverse: g = G0 (I + E), g^{-1} = (sum (-E)^k) G0^{-1}
  Eigen::MatrixXd G0(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) G0(i, j) = g_[i * n_ + j].value().real();
  Eigen::MatrixXd G0i = G0.inverse();
  std::vector<Jet> E(static_cast<std::size_t>(n_) * n_,
                     Jet::constant(n_, km_, 0.0));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      Jet acc = Jet::constant(n_, km_, i == j ? -1.0 : 0.0);
      for (int k = 0; k < n_; ++k)
        acc += G0i(i, k) * g_[k * n_ + j];
      E[i * n_ + j] = acc;  // E = G0^{-1} g - I, zero constant term
    }
  std::vector<Jet> S(static_cast<std::size_t>(n_) * n_,
                     Jet::constant(n_, km_, 0.0));
  for (int i = 0; i < n_; ++i) S[i * n_ + i] = Jet::constant(n_, km_, 1.0);
  for (int it = 0; it < km_; ++it) {
    // S <- I - E * S
    std::vector<Jet> NS(static_cast<std::size_t>(n_) * n_,
                        Jet::constant(n_, km_, 0.0));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Jet acc = Jet::constant(n_, km_, i == j ? 1.0 : 0.0);
        for (int k = 0; k < n_; ++k) acc.add_product(E[i * n_ + k], S[k * n_ + j], -1.0);
        NS[i * n_ + j] = std::move(acc);
      }
    S = std::move(NS);
  }
  ginv_.assign(static_cast<std::size_t>(n_) * n_, Jet::constant(n_, km_, 0.0));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      Jet acc(n_, km_);
      for (int k = 0; k < n_; ++k) acc += S[i * n_ + k] * G0i(k, j);
      ginv_[i * n_ + j] = std::move(acc);
    }
}

const Jet& Geometry::christoffel(int k, int i, int j) const {
  if (!gamma_) {
    if (km_ < 1)
      throw Error(errc::order_exhausted,
                  "christoffel symbols need metric order >= 1");
    const int K = km_ - 1;
    TensorField G(n_, 3, n_, K);
    std::vector<Jet> dg(static_cast<std::size_t>(n_) * n_ * n_, Jet());
    for (int d = 0; d < n_; ++d)
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
          dg[(d * n_ + a) * n_ + b] = g_[a * n_ + b].partial(d);
    for (int kk = 0; kk < n_; ++kk)
      for (int ii = 0; ii < n_; ++ii)
        for (int jj = ii; jj < n_; ++jj) {
          Jet acc(n_, K);
          for (int l = 0; l < n_; ++l) {
            Jet sum = dg[(ii * n_ + jj) * n_ + l];
            sum += dg[(jj * n_ + ii) * n_ + l];
            sum -= dg[(l * n_ + ii) * n_ + jj];
            acc.add_product(ginv_[kk * n_ + l].truncated(K), sum, 0.5);
          }
          G(kk, ii, jj) = acc;
          G(kk, jj, ii) = std::move(acc);
        }
    gamma_ = std::move(G);
  }
  return (*gamma_)(k, i, j);
}

const TensorField& Geometry::riemann_up() const {
  if (!riem_up_) {
    if (km_ < 2)
      throw Error(errc::order_exhausted, "curvature needs metric order >= 2");
    const int K = km_ - 2;
    christoffel(0, 0, 0);
    TensorField R(n_, 4, n_, K);  // (l, i, j, k)
    for (int l = 0; l < n_; ++l)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < i; ++j)
          for (int k = 0; k < n_; ++k) {
            Jet acc = christoffel(l, j, k).partial(i);
            acc -= christoffel(l, i, k).partial(j);
            for (int m = 0; m < n_; ++m) {
              acc.add_product(christoffel(l, i, m).truncated(K),
                              christoffel(m, j, k).truncated(K), 1.0);
              acc.add_product(christoffel(l, j, m).truncated(K),
                              christoffel(m, i, k).truncated(K), -1.0);
            }
            R(l, i, j, k) = acc;
            R(l, j, i, k) = -acc;
          }
    riem_up_ = std::move(R);
  }
  return *riem_up_;
}

const TensorField& Geometry::riemann() const {
  if (!riem_) {
    const auto& Ru = riemann_up();
    const int K = Ru.order();
    TensorField R(n_, 4, n_, K);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < i; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l) {
            Jet acc(n_, K);
            for (int m = 0; m < n_; ++m)
              acc.add_product(g_[l * n_ + m].truncated(K), Ru(m, i, j, k), 1.0);
            R(i, j, k, l) = acc;
            R(j, i, k, l) = -acc;
          }
    riem_ = std::move(R);
  }
  return *riem_;
}

const TensorField& Geometry::ricci() const {
  if (!ric_) {
    const auto& R = riemann();
    const int K = R.order();
    TensorField Rc(n_, 2, n_, K);
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        Jet acc(n_, K);
        for (int a = 0; a < n_; ++a)
          for (int b = 0; b < n_; ++b)
            acc.add_product(ginv_[a * n_ + b].truncated(K), R(i, a, b, j), 1.0);
        Rc(i, j) = acc;
        Rc(j, i) = std::move(acc);
      }
    ric_ = std::move(Rc);
  }
  return *ric_;
}

const Jet& Geometry::scalar_curvature() const {
  if (!tau_) {
    const auto& Rc = ricci();
    const int K = Rc.order();
    Jet acc(n_, K);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        acc.add_product(ginv_[i * n_ + j].truncated(K), Rc(i, j), 1.0);
    tau_ = std::move(acc);
  }
  return *tau_;
}

const Jet& Geometry::j_norm() const {
  if (!jn_) jn_ = scalar_curvature() * (1.0 / (2.0 * (n_ - 1)));
  return *jn_;
}

const TensorField& Geometry::schouten() const {
  if (!schouten_) {
    if (n_ < 3)
      throw Error(errc::invalid_argument, "Schouten tensor needs n >= 3");
    const auto& Rc = ricci();
    const Jet& J = j_norm();
    const int K = Rc.order();
    TensorField P(n_, 2, n_, K);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Jet acc = Rc(i, j);
        acc.add_product(J, g_[i * n_ + j].truncated(K), -1.0);
        P(i, j) = acc * (1.0 / (n_ - 2));
      }
    schouten_ = std::move(P);
  }
  return *schouten_;
}

const TensorField& Geometry::weyl() const {
  if (!weyl_) {
    const auto& R = riemann();
    TensorField kn = kulkarni_nomizu(schouten(), g_t_.truncated(R.order()));
    TensorField W(n_, 4, n_, R.order());
    for (std::size_t i = 0; i < W.size(); ++i)
      W.flat_at(i) = R.flat_at(i) + kn.flat_at(i);
    weyl_ = std::move(W);
  }
  return *weyl_;
}

const TensorField& Geometry::cotton() const {
  if (!cotton_) {
    if (km_ < 3)
      throw Error(errc::order_exhausted, "Cotton tensor needs metric order >= 3");
    TensorField dP = cov_deriv(schouten());
    const int K = dP.order();
    TensorField C(n_, 3, n_, K);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          C(i, j, k) = dP(i, j, k) - dP(j, i, k);
    cotton_ = std::move(C);
  }
  return *cotton_;
}

const TensorField& Geometry::bach() const {
  if (!bach_) {
    if (km_ < 4)
      throw Error(errc::order_exhausted, "Bach tensor needs metric order >= 4");
    TensorField dC = cov_deriv(cotton());
    const int K = dC.order();
    const auto& P = schouten();
    const auto& W = weyl();
    TensorField B(n_, 2, n_, K);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Jet acc(n_, K);
        for (int a = 0; a < n_; ++a)
          for (int b = 0; b < n_; ++b)
            acc.add_product(ginv_[a * n_ + b].truncated(K), dC(a, b, i, j), 1.0);
        // + P^{cd} W(c, i, j, d)
        for (int c = 0; c < n_; ++c)
          for (int d = 0; d < n_; ++d) {
            Jet Pu(n_, K);
            for (int a = 0; a < n_; ++a)
              for (int b = 0; b < n_; ++b) {
                Jet t(n_, K);
                t.add_product(ginv_[c * n_ + a].truncated(K),
                              ginv_[d * n_ + b].truncated(K), 1.0);
                Pu.add_product(t, P(a, b).truncated(K), 1.0);
              }
            acc.add_product(Pu, W(c, i, j, d).truncated(K), 1.0);
          }
        B(i, j) = std::move(acc);
      }
    bach_ = std::move(B);
  }
  return *bach_;
}

TensorField Geometry::cov_deriv(const TensorField& T) const {
  const int K = std::min(T.order() - 1, km_ - 1);
  if (K < 0)
    throw Error(errc::order_exhausted, "cov_deriv: jet order budget exhausted");
  const int r = T.rank();
  TensorField out(n_, r + 1, n_, K);
  std::vector<int> idx(r, 0);
  const std::size_t m = T.size();
  for (int d = 0; d < n_; ++d) {
    for (std::size_t t = 0; t < m; ++t) {
      // decode idx
      std::size_t rem = t;
      for (int s = r - 1; s >= 0; --s) {
        idx[s] = rem % n_;
        rem /= n_;
      }
      Jet acc = T.flat_at(t).truncated(K + 1).partial(d);
      for (int s = 0; s < r; ++s) {
        const int is = idx[s];
        // subtract Gamma^m_{d, i_s} T(..., m, ...)
        std::size_t stride = 1;
        for (int q = s + 1; q < r; ++q) stride *= n_;
        const std::size_t base = t - static_cast<std::size_t>(is) * stride;
        for (int mm = 0; mm < n_; ++mm)
          acc.add_product(christoffel(mm, d, is).truncated(K),
                          T.flat_at(base + mm * stride).truncated(K), -1.0);
      }
      out.flat_at(static_cast<std::size_t>(d) * m + t) = std::move(acc);
    }
  }
  return out;
}

std::vector<Jet> Geometry::sharp(std::span<const Jet> w) const {
  const int K = min_order(w.begin(), w.end());
  std::vector<Jet> out(n_, Jet::constant(n_, K, 0.0));
  for (int i = 0; i < n_; ++i) {
    Jet acc(n_, K);
    for (int j = 0; j < n_; ++j)
      acc.add_product(ginv_[i * n_ + j].truncated(K), w[j].truncated(K), 1.0);
    out[i] = std::move(acc);
  }
  return out;
}

std::vector<Jet> Geometry::flat(std::span<const Jet> X) const {
  const int K = min_order(X.begin(), X.end());
  std::vector<Jet> out(n_, Jet::constant(n_, K, 0.0));
  for (int i = 0; i < n_; ++i) {
    Jet acc(n_, K);
    for (int j = 0; j < n_; ++j)
      acc.add_product(g_[i * n_ + j].truncated(K), X[j].truncated(K), 1.0);
    out[i] = std::move(acc);
  }
  return out;
}

TensorField Geometry::trace_g(const TensorField& T, int slot_a,
                              int slot_b) const {
  if (slot_a == slot_b || slot_a >= T.rank() || slot_b >= T.rank())
    throw Error(errc::invalid_argument, "trace_g: invalid slots");
  if (slot_a > slot_b) std::swap(slot_a, slot_b);
  const int r = T.rank();
  const int K = T.order();
  TensorField out(n_, r - 2, n_, K);
  std::vector<int> idx(r, 0);
  const std::size_t m_out = out.size() == 0 ? 1 : out.size();
  for (std::size_t t = 0; t < m_out; ++t) {
    // decode output index into the free slots
    std::size_t rem = t;
    std::vector<int> free_idx(r - 2, 0);
    for (int s = r - 3; s >= 0; --s) {
      free_idx[s] = rem % n_;
      rem /= n_;
    }
    Jet acc(n_, K);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        int fs = 0;
        for (int s = 0; s < r; ++s) {
          if (s == slot_a) idx[s] = a;
          else if (s == slot_b) idx[s] = b;
          else idx[s] = free_idx[fs++];
        }
        std::size_t off = 0;
        for (int s = 0; s < r; ++s) off = off * n_ + idx[s];
        acc.add_product(ginv_[a * n_ + b].truncated(K), T.flat_at(off), 1.0);
      }
    out.flat_at(t) = std::move(acc);
  }
  return out;
}

std::vector<Jet> Geometry::codifferential(const TensorField& T) const {
  TensorField dT = cov_deriv(T);
  const int K = dT.order();
  std::vector<Jet> out(n_, Jet::constant(n_, K, 0.0));
  for (int y = 0; y < n_; ++y) {
    Jet acc(n_, K);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        acc.add_product(ginv_[a * n_ + b].truncated(K), dT(a, b, y), -1.0);
    out[y] = std::move(acc);
  }
  return out;
}

Jet Geometry::divergence(std::span<const Jet> X) const {
  const int K = std::min(min_order(X.begin(), X.end()) - 1, km_ - 1);
  if (K < 0) throw Error(errc::order_exhausted, "divergence: order exhausted");
  Jet acc(n_, K);
  for (int mu = 0; mu < n_; ++mu) {
    acc += X[mu].truncated(K + 1).partial(mu);
    for (int l = 0; l < n_; ++l)
      acc.add_product(christoffel(mu, mu, l).truncated(K), X[l].truncated(K),
                      1.0);
  }
  return acc;
}

Jet Geometry::laplacian(const Jet& f) const {
  const int K = std::min(f.order() - 2, km_ - 1);
  if (K < 0) throw Error(errc::order_exhausted, "laplacian: order exhausted");
  Jet acc(n_, K);
  for (int mu = 0; mu < n_; ++mu)
    for (int nu = 0; nu < n_; ++nu) {
      Jet t = f.truncated(K + 2).partial(mu).partial(nu);
      for (int l = 0; l < n_; ++l)
        t.add_product(christoffel(l, mu, nu).truncated(K),
                      f.truncated(K + 1).partial(l).truncated(K), -1.0);
      acc.add_product(ginv_[mu * n_ + nu].truncated(K), t, 1.0);
    }
  return acc;
}

TensorField Geometry::tensor_square(const TensorField& T) const {
  if (T.rank() != 2)
    throw Error(errc::shape_mismatch, "tensor_square expects a 2-tensor");
  const int K = T.order();
  TensorField out(n_, 2, n_, K);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      Jet acc(n_, K);
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
          Jet t(n_, K);
          t.add_product(T(i, a), ginv_[a * n_ + b].truncated(K), 1.0);
          acc.add_product(t, T(b, j), 1.0);
        }
      out(i, j) = std::move(acc);
    }
  return out;
}

}  // namespace cdl
