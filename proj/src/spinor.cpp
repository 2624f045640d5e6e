// SPDX-License-Identifier: Apache-2.0
#include "spinor.hpp"

#include <random>

namespace cdl {

SpinorField SpinorField::truncated(int K) const {
  SpinorField r;
  r.provenance = provenance;
  r.c.reserve(c.size());
  for (const auto& j : c) r.c.push_back(j.truncated(K));
  return r;
}

double SpinorField::max_abs() const {
  double m = 0.0;
  for (const auto& j : c) m = std::max(m, j.max_abs());
  return m;
}

SpinorField& SpinorField::operator+=(const SpinorField& o) {
  const int K = std::min(order(), o.order());
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = c[i].truncated(K) + o.c[i].truncated(K);
  return *this;
}

SpinorField& SpinorField::operator-=(const SpinorField& o) {
  const int K = std::min(order(), o.order());
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = c[i].truncated(K) - o.c[i].truncated(K);
  return *this;
}

std::vector<Jet> mat_apply(const MatC& m, std::span<const Jet> v) {
  const int K = min_order(v.begin(), v.end());
  const int nv = v[0].n_vars();
  std::vector<Jet> out(m.rows(), Jet::constant(nv, K, 0.0));
  for (int r = 0; r < m.rows(); ++r) {
    Jet acc(nv, K);
    for (int c = 0; c < m.cols(); ++c) {
      const cplx e = m(r, c);
      if (e != cplx{}) {
        Jet t = v[c].truncated(K);
        t *= e;
        acc += t;
      }
    }
    out[r] = std::move(acc);
  }
  return out;
}

SpinContext::SpinContext(const MetricChart& chart, std::vector<double> x0,
                         int metric_order)
    : geo_(chart, std::move(x0), metric_order),
      rep_(&clifford_rep(chart.index_p(), chart.dim() - chart.index_p())),
      trep_(&tractor_rep(chart.index_p(), chart.dim() - chart.index_p())) {
  build_frame();
  build_spin_connection();
}

void SpinContext::build_frame() {
  const int n = dim();
  const int K = geo_.metric_order();
  A_.assign(static_cast<std::size_t>(n) * n, Jet::constant(n, K, 0.0));
  for (int i = 0; i < n; ++i) {
    std::vector<Jet> v(n, Jet::constant(n, K, 0.0));
    v[i] = Jet::constant(n, K, 1.0);
    for (int k = 0; k < i; ++k) {
      Jet ip(n, K);
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
          Jet t(n, K);
          t.add_product(v[mu], geo_.g(mu, nu), 1.0);
          ip.add_product(t, A_[k * n + nu], 1.0);
        }
      for (int mu = 0; mu < n; ++mu)
        v[mu].add_product(ip, A_[k * n + mu], -eps(k));
    }
    Jet q(n, K);
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu) {
        Jet t(n, K);
        t.add_product(v[mu], geo_.g(mu, nu), 1.0);
        q.add_product(t, v[nu], 1.0);
      }
    const double q0 = q.value().real();
    if (std::abs(q.value()) < 1e-10)
      throw Error(errc::degenerate_metric,
                  "frame: pivot degeneracy in signed Gram-Schmidt");
    const double sgn = q0 > 0 ? 1.0 : -1.0;
    if (sgn != eps(i))
      throw Error(errc::degenerate_metric,
                  "frame: metric not timelike-first orderable at base point");
    Jet inv = reciprocal(sqrt(sgn * q));
    for (int mu = 0; mu < n; ++mu) A_[i * n + mu] = v[mu] * inv;
  }
}

void SpinContext::build_spin_connection() {
  const int n = dim();
  const int K = geo_.metric_order() - 1;
  if (K < 0)
    throw Error(errc::order_exhausted, "spin connection needs metric order >= 1");
  om_.assign(static_cast<std::size_t>(n) * n * n, Jet::constant(n, K, 0.0));
  for (int mu = 0; mu < n; ++mu)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        // g(nabla_mu s_i, s_j); antisymmetric in (i,j) in the orthonormal
        // normalization since eps_i eps_j enters elsewhere
        Jet acc(n, K);
        for (int nu = 0; nu < n; ++nu) {
          Jet t = frame(i, nu).partial(mu);
          for (int lam = 0; lam < n; ++lam)
            t.add_product(frame(i, lam).truncated(K),
                          geo_.christoffel(nu, mu, lam), 1.0);
          for (int kap = 0; kap < n; ++kap) {
            Jet gk(n, K);
            gk.add_product(geo_.g(nu, kap).truncated(K),
                           frame(j, kap).truncated(K), 1.0);
            acc.add_product(t, gk, 1.0);
          }
        }
        om_[(mu * n + i) * n + j] = acc;
        om_[(mu * n + j) * n + i] = -1.0 * acc;  // metricity: omega_ij + omega_ji = 0
      }
}

const TensorField& SpinContext::schouten_frame() const {
  if (!p_frame_) {
    const int n = dim();
    const auto& P = geo_.schouten();
    const int K = P.order();
    TensorField out(n, 2, n, K);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet acc(n, K);
        for (int mu = 0; mu < n; ++mu) {
          Jet t(n, K);
          for (int nu = 0; nu < n; ++nu)
            t.add_product(P(mu, nu), frame(j, nu).truncated(K), 1.0);
          acc.add_product(frame(i, mu).truncated(K), t, 1.0);
        }
        out(i, j) = std::move(acc);
      }
    p_frame_ = std::move(out);
  }
  return *p_frame_;
}

const TensorField& SpinContext::cotton_frame() const {
  if (!c_frame_) {
    const int n = dim();
    const auto& C = geo_.cotton();
    const int K = C.order();
    // staged contraction, one slot at a time
    TensorField cur = C.truncated(K);
    for (int slot = 0; slot < 3; ++slot) {
      TensorField next(n, 3, n, K);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            int idx[3] = {a, b, c};
            Jet acc(n, K);
            for (int mu = 0; mu < n; ++mu) {
              int src[3] = {idx[0], idx[1], idx[2]};
              src[slot] = mu;
              acc.add_product(frame(idx[slot], mu).truncated(K),
                              cur(src[0], src[1], src[2]), 1.0);
            }
            next(a, b, c) = std::move(acc);
          }
      cur = std::move(next);
    }
    c_frame_ = std::move(cur);
  }
  return *c_frame_;
}

const TensorField& SpinContext::weyl_frame() const {
  if (!w_frame_) {
    const int n = dim();
    const auto& W = geo_.weyl();
    const int K = W.order();
    TensorField cur = W.truncated(K);
    for (int slot = 0; slot < 4; ++slot) {
      TensorField next(n, 4, n, K);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) {
              int idx[4] = {a, b, c, d};
              Jet acc(n, K);
              for (int mu = 0; mu < n; ++mu) {
                int src[4] = {idx[0], idx[1], idx[2], idx[3]};
                src[slot] = mu;
                acc.add_product(frame(idx[slot], mu).truncated(K),
                                cur(src[0], src[1], src[2], src[3]), 1.0);
              }
              next(a, b, c, d) = std::move(acc);
            }
      cur = std::move(next);
    }
    w_frame_ = std::move(cur);
  }
  return *w_frame_;
}

const TensorField& SpinContext::coord_frame_form() const {
  if (!b_coord_) {
    const int n = dim();
    const int K = geo_.metric_order();
    TensorField out(n, 2, n, K);
    for (int mu = 0; mu < n; ++mu)
      for (int i = 0; i < n; ++i) {
        Jet acc(n, K);
        for (int nu = 0; nu < n; ++nu)
          acc.add_product(geo_.g(mu, nu), frame(i, nu), 1.0);
        out(mu, i) = std::move(acc);
      }
    b_coord_ = std::move(out);
  }
  return *b_coord_;
}

SpinorField SpinContext::zero_spinor(int order) const {
  SpinorField s;
  s.c.assign(spinor_dim(), Jet::constant(dim(), order, 0.0));
  return s;
}

SpinorField SpinContext::random_spinor(int order, int degree,
                                       std::uint64_t seed, double scale) const {
  std::mt19937_64 rng(seed);
  auto uni = [&rng]() {
    return 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0;
  };
  SpinorField s;
  s.provenance = "seed:" + std::to_string(seed);
  const JetShape* sh = JetShape::get(dim(), order);
  for (int comp = 0; comp < spinor_dim(); ++comp) {
    Jet j(dim(), order);
    for (std::size_t i = 0; i < j.size(); ++i)
      if (static_cast<int>(sh->degree(i)) <= degree)
        j[i] = scale * cplx(uni(), uni());
    s.c.push_back(std::move(j));
  }
  return s;
}

SpinorField SpinContext::cov_deriv(const SpinorField& psi, int mu) const {
  const int n = dim();
  if (psi.order() < 1)
    throw Error(errc::order_exhausted, "spinor_cov_deriv: jet order exhausted");
  const int K = std::min(psi.order() - 1, geo_.metric_order() - 1);
  SpinorField out;
  out.c.reserve(psi.c.size());
  for (const auto& j : psi.c) out.c.push_back(j.partial(mu).truncated(K));
  SpinorField pt = psi.truncated(K);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto gg = mat_apply(rep_->gamma(i) * rep_->gamma(j), pt.c);
      Jet coef = (0.5 * eps(i) * eps(j)) * omega(mu, i, j).truncated(K);
      for (std::size_t r = 0; r < out.c.size(); ++r)
        out.c[r].add_product(coef, gg[r], 1.0);
    }
  return out;
}

SpinorField SpinContext::cov_deriv_frame(const SpinorField& psi, int i) const {
  const int n = dim();
  SpinorField acc;
  for (int mu = 0; mu < n; ++mu) {
    SpinorField d = cov_deriv(psi, mu);
    const int K = d.order();
    if (acc.c.empty()) acc = zero_spinor(K);
    Jet a = frame(i, mu).truncated(K);
    for (std::size_t r = 0; r < acc.c.size(); ++r)
      acc.c[r].add_product(a, d.c[r], 1.0);
  }
  return acc;
}

SpinorField SpinContext::dirac(const SpinorField& psi) const {
  const int n = dim();
  SpinorField acc;
  for (int i = 0; i < n; ++i) {
    SpinorField d = cov_deriv_frame(psi, i);
    auto gd = mat_apply(eps(i) * rep_->gamma(i), d.c);
    if (acc.c.empty()) acc = zero_spinor(d.order());
    for (std::size_t r = 0; r < acc.c.size(); ++r) acc.c[r] += gd[r];
  }
  return acc;
}

SpinorField SpinContext::dirac_pow(const SpinorField& psi, int k) const {
  SpinorField out = psi;
  for (int t = 0; t < k; ++t) out = dirac(out);
  return out;
}

SpinorField SpinContext::bochner(const SpinorField& psi) const {
  const int n = dim();
  if (psi.order() < 2)
    throw Error(errc::order_exhausted, "bochner_laplacian: jet order exhausted");
  // sum_i eps_i [nabla_{s_i} nabla_{s_i} psi - nabla_{nabla_{s_i} s_i} psi]
  SpinorField acc;
  std::vector<SpinorField> d1;
  d1.reserve(n);
  for (int mu = 0; mu < n; ++mu) d1.push_back(cov_deriv(psi, mu));
  for (int i = 0; i < n; ++i) {
    SpinorField di = cov_deriv_frame(psi, i);
    SpinorField ddi = cov_deriv_frame(di, i);
    const int K = ddi.order();
    if (acc.c.empty()) acc = zero_spinor(K);
    for (std::size_t r = 0; r < acc.c.size(); ++r)
      acc.c[r] += eps(i) * ddi.c[r].truncated(K);
    // nabla_{s_i} s_i = [A_i^mu d_mu A_i^nu + A_i^mu A_i^lam Gamma^nu_{mu lam}] d_nu
    for (int nu = 0; nu < n; ++nu) {
      Jet coef(dim(), K);
      for (int mu = 0; mu < n; ++mu) {
        coef.add_product(frame(i, mu).truncated(K),
                         frame(i, nu).partial(mu).truncated(K), 1.0);
        for (int lam = 0; lam < n; ++lam) {
          Jet t(dim(), K);
          t.add_product(frame(i, mu).truncated(K),
                        frame(i, lam).truncated(K), 1.0);
          coef.add_product(t, geo_.christoffel(nu, mu, lam).truncated(K), 1.0);
        }
      }
      for (std::size_t r = 0; r < acc.c.size(); ++r)
        acc.c[r].add_product(coef, d1[nu].c[r].truncated(K),
                             -eps(i));
    }
  }
  return acc;
}

SpinorField SpinContext::bochner_coordinate(const SpinorField& psi) const {
  const int n = dim();
  std::vector<SpinorField> d1;
  d1.reserve(n);
  for (int mu = 0; mu < n; ++mu) d1.push_back(cov_deriv(psi, mu));
  SpinorField acc;
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      SpinorField d2 = cov_deriv(d1[nu], mu);
      const int K = d2.order();
      if (acc.c.empty()) acc = zero_spinor(K);
      SpinorField term = d2.truncated(K);
      for (int lam = 0; lam < n; ++lam) {
        Jet gl = geo_.christoffel(lam, mu, nu).truncated(K);
        for (std::size_t r = 0; r < term.c.size(); ++r)
          term.c[r].add_product(gl, d1[lam].c[r].truncated(K), -1.0);
      }
      Jet gi = geo_.ginv(mu, nu).truncated(K);
      for (std::size_t r = 0; r < acc.c.size(); ++r)
        acc.c[r].add_product(gi, term.c[r], 1.0);
    }
  return acc;
}

SpinorField SpinContext::coord_mult(const SpinorField& psi, int mu) const {
  const int n = dim();
  const auto& B = coord_frame_form();
  const int K = std::min(psi.order(), B.order());
  SpinorField out = zero_spinor(K);
  SpinorField pt = psi.truncated(K);
  for (int i = 0; i < n; ++i) {
    auto gi = mat_apply(rep_->gamma(i), pt.c);
    Jet coef = eps(i) * B(mu, i).truncated(K);
    for (std::size_t r = 0; r < out.c.size(); ++r)
      out.c[r].add_product(coef, gi[r], 1.0);
  }
  return out;
}

SpinorField SpinContext::frame_vector_mult(std::span<const Jet> vf,
                                           const SpinorField& psi) const {
  const int n = dim();
  const int K = std::min(psi.order(), min_order(vf.begin(), vf.end()));
  SpinorField out = zero_spinor(K);
  SpinorField pt = psi.truncated(K);
  for (int i = 0; i < n; ++i) {
    auto gi = mat_apply(rep_->gamma(i), pt.c);
    Jet coef = vf[i].truncated(K);
    for (std::size_t r = 0; r < out.c.size(); ++r)
      out.c[r].add_product(coef, gi[r], 1.0);
  }
  return out;
}

SpinorField SpinContext::two_form_mult(const TensorField& wf,
                                       const SpinorField& psi) const {
  const int n = dim();
  const int K = std::min(psi.order(), wf.order());
  SpinorField out = zero_spinor(K);
  SpinorField pt = psi.truncated(K);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      auto gg = mat_apply(rep_->gamma(a) * rep_->gamma(b), pt.c);
      Jet coef = (eps(a) * eps(b)) * wf(a, b).truncated(K);
      for (std::size_t r = 0; r < out.c.size(); ++r)
        out.c[r].add_product(coef, gg[r], 1.0);
    }
  return out;
}

SpinorField SpinContext::form_mult(const TensorField& wf,
                                   const SpinorField& psi) const {
  const int n = dim();
  const int k = wf.rank();
  if (k == 0) throw Error(errc::invalid_argument, "form_mult: rank 0");
  // verify antisymmetry on adjacent slot swaps (cheap structural check)
  if (k >= 2) {
    std::vector<int> idx(k, 0);
    idx[0] = 0;
    idx[1] = 1;
    std::vector<int> swp = idx;
    std::swap(swp[0], swp[1]);
    std::size_t o1 = 0, o2 = 0;
    for (int s = 0; s < k; ++s) {
      o1 = o1 * n + idx[s];
      o2 = o2 * n + swp[s];
    }
    Jet d = wf.flat_at(o1) + wf.flat_at(o2);
    if (d.max_abs() > 1e-8 * std::max(1.0, wf.max_abs()))
      throw Error(errc::invalid_argument, "form_mult: form is not antisymmetric");
  }
  const int K = std::min(psi.order(), wf.order());
  SpinorField out = zero_spinor(K);
  SpinorField pt = psi.truncated(K);
  std::vector<int> idx(k);
  std::function<void(int, int, double, const MatC&)> rec =
      [&](int depth, int start, double sign, const MatC& acc) {
        if (depth == k) {
          std::size_t off = 0;
          for (int s = 0; s < k; ++s) off = off * n + idx[s];
          auto gv = mat_apply(acc, pt.c);
          Jet coef = sign * wf.flat_at(off).truncated(K);
          for (std::size_t r = 0; r < out.c.size(); ++r)
            out.c[r].add_product(coef, gv[r], 1.0);
          return;
        }
        for (int i = start; i < n; ++i) {
          idx[depth] = i;
          rec(depth + 1, i + 1, sign * eps(i), acc * rep_->gamma(i));
        }
      };
  rec(0, 0, 1.0, MatC::Identity(spinor_dim(), spinor_dim()));
  return out;
}

SpinorField SpinContext::oneform_sharp_mult(std::span<const Jet> w,
                                            const SpinorField& psi) const {
  const int n = dim();
  const int K = std::min({psi.order(), min_order(w.begin(), w.end()),
                          geo_.metric_order()});
  std::vector<Jet> vf(n, Jet::constant(n, K, 0.0));
  for (int i = 0; i < n; ++i) {
    Jet acc(n, K);
    for (int mu = 0; mu < n; ++mu)
      acc.add_product(frame(i, mu).truncated(K), w[mu].truncated(K), 1.0);
    vf[i] = eps(i) * acc;
  }
  return frame_vector_mult(vf, psi.truncated(K));
}

TensorField SpinContext::sharp_rows_frame(const TensorField& T) const {
  const int n = dim();
  const int K = T.order();
  // out(i, j) = eps_j T(s_i, s_j): frame components of T(s_i)^sharp
  TensorField out(n, 2, n, K);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet acc(n, K);
      for (int mu = 0; mu < n; ++mu) {
        Jet t(n, K);
        for (int nu = 0; nu < n; ++nu)
          t.add_product(T(mu, nu), frame(j, nu).truncated(K), 1.0);
        acc.add_product(frame(i, mu).truncated(K), t, 1.0);
      }
      out(i, j) = eps(j) * acc;
    }
  return out;
}

SpinorField SpinContext::bracket_T_nabla(const TensorField& T,
                                         const SpinorField& psi) const {
  const int n = dim();
  if (T.rank() != 2)
    throw Error(errc::shape_mismatch, "bracket expects a symmetric 2-tensor");
  const int K = std::min(psi.order() - 1, T.order());
  if (K < 0)
    throw Error(errc::order_exhausted, "bracket_T_nabla: jet order exhausted");
  TensorField Tf = sharp_rows_frame(T.truncated(std::min(T.order(), K)));
  SpinorField out = zero_spinor(K);
  for (int i = 0; i < n; ++i) {
    SpinorField d = cov_deriv_frame(psi, i).truncated(K);
    for (int j = 0; j < n; ++j) {
      auto gd = mat_apply(rep_->gamma(j), d.c);
      Jet coef = eps(i) * Tf(i, j).truncated(K);
      for (std::size_t r = 0; r < out.c.size(); ++r)
        out.c[r].add_product(coef, gd[r], 1.0);
    }
  }
  return out;
}

SpinorField SpinContext::bracket_nabla_T(const TensorField& T,
                                         const SpinorField& psi) const {
  SpinorField b = bracket_T_nabla(T, psi);
  const int K = std::min(b.order(), T.order() - 1);
  if (K < 0)
    throw Error(errc::order_exhausted, "bracket_nabla_T: jet order exhausted");
  auto dT = geo_.codifferential(T);
  SpinorField corr = oneform_sharp_mult(dT, psi.truncated(K));
  return b.truncated(K) - corr;
}

SpinorField SpinContext::bracket_nabla_T_direct(const TensorField& T,
                                                const SpinorField& psi) const {
  const int n = dim();
  // eta_mu := T(d_mu)^sharp . psi; -delta eta = g^{mu nu}[nabla_mu eta_nu
  // - Gamma^lam_{mu nu} eta_lam]
  const int K0 = std::min(psi.order(), T.order());
  std::vector<SpinorField> eta;
  eta.reserve(n);
  for (int mu = 0; mu < n; ++mu) {
    std::vector<Jet> vf(n, Jet::constant(n, K0, 0.0));
    for (int i = 0; i < n; ++i) {
      Jet acc(n, K0);
      for (int nu = 0; nu < n; ++nu)
        acc.add_product(T(mu, nu).truncated(K0), frame(i, nu).truncated(K0),
                        1.0);
      vf[i] = eps(i) * acc;
    }
    eta.push_back(frame_vector_mult(vf, psi.truncated(K0)));
  }
  SpinorField acc;
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      SpinorField d = cov_deriv(eta[nu], mu);
      const int K = d.order();
      if (acc.c.empty()) acc = zero_spinor(K);
      SpinorField term = d.truncated(K);
      for (int lam = 0; lam < n; ++lam) {
        Jet gl = geo_.christoffel(lam, mu, nu).truncated(K);
        for (std::size_t r = 0; r < term.c.size(); ++r)
          term.c[r].add_product(gl, eta[lam].c[r].truncated(K), -1.0);
      }
      Jet gi = geo_.ginv(mu, nu).truncated(K);
      for (std::size_t r = 0; r < acc.c.size(); ++r)
        acc.c[r].add_product(gi, term.c[r], 1.0);
    }
  return acc;
}

SpinorField SpinContext::bracket_cotton_schouten(const SpinorField& psi,
                                                 bool cp) const {
  const int n = dim();
  const auto& Cf = cotton_frame();
  const auto& Pf = schouten_frame();
  const int K = std::min({psi.order(), Cf.order(), Pf.order()});
  SpinorField out = zero_spinor(K);
  SpinorField pt = psi.truncated(K);
  for (int i = 0; i < n; ++i) {
    // P(s_i)^sharp frame components: eps_j P(s_i, s_j)
    std::vector<Jet> pv(n, Jet::constant(n, K, 0.0));
    for (int j = 0; j < n; ++j) pv[j] = eps(j) * Pf(i, j).truncated(K);
    // C(s_i) as a 2-form: C(s_a, s_b, s_i)
    TensorField cf(n, 2, n, K);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) cf(a, b) = Cf(a, b, i).truncated(K);
    SpinorField t = cp ? two_form_mult(cf, frame_vector_mult(pv, pt))
                       : frame_vector_mult(pv, two_form_mult(cf, pt));
    for (std::size_t r = 0; r < out.c.size(); ++r)
      out.c[r] += eps(i) * t.c[r].truncated(K);
  }
  return out;
}

SpinorField SpinContext::curvature_product(CurvProduct kind,
                                           const SpinorField& psi) const {
  const int n = dim();
  const auto& Wf = weyl_frame();
  const int Kc = kind == CurvProduct::WW
                     ? std::min(psi.order(), Wf.order())
                     : std::min({psi.order(), Wf.order(),
                                 cotton_frame().order()});
  SpinorField out = zero_spinor(Kc);
  SpinorField pt = psi.truncated(Kc);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      TensorField wf(n, 2, n, Kc);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) wf(a, b) = Wf(i, j, a, b).truncated(Kc);
      SpinorField t;
      if (kind == CurvProduct::WW) {
        t = two_form_mult(wf, two_form_mult(wf, pt));
      } else {
        const auto& Cf = cotton_frame();
        std::vector<Jet> cv(n, Jet::constant(n, Kc, 0.0));
        for (int k2 = 0; k2 < n; ++k2)
          cv[k2] = eps(k2) * Cf(i, j, k2).truncated(Kc);
        if (kind == CurvProduct::CW)
          t = frame_vector_mult(cv, two_form_mult(wf, pt));
        else
          t = two_form_mult(wf, frame_vector_mult(cv, pt));
      }
      for (std::size_t r = 0; r < out.c.size(); ++r)
        out.c[r] += (eps(i) * eps(j)) * t.c[r].truncated(Kc);
    }
  return out;
}

Jet SpinContext::pairing(const SpinorField& psi, const SpinorField& phi) const {
  const int K = std::min(psi.order(), phi.order());
  const MatC& b = rep_->b_matrix();
  Jet acc(dim(), K);
  // <psi, phi> = sum_{r} (b psi)_r conj(phi_r)
  for (int r = 0; r < b.rows(); ++r) {
    Jet brow(dim(), K);
    for (int c2 = 0; c2 < b.cols(); ++c2)
      if (b(r, c2) != cplx{}) {
        Jet t = psi.c[c2].truncated(K);
        t *= b(r, c2);
        brow += t;
      }
    acc.add_product(brow, phi.c[r].truncated(K).conjugated(), 1.0);
  }
  return acc;
}

Jet SpinContext::divergence_identity_residual(const TensorField& T,
                                              const SpinorField& psi,
                                              const SpinorField& phi) const {
  const int n = dim();
  const int p = index_p();
  const double sp = (p % 2 == 0) ? 1.0 : -1.0;
  const int K0 = std::min({psi.order(), phi.order(), T.order()});
  // w_nu = <T(d_nu)^sharp psi, phi>, Y = w^sharp, div(Y)
  std::vector<Jet> w(n, Jet::constant(n, K0, 0.0));
  for (int nu = 0; nu < n; ++nu) {
    std::vector<Jet> vf(n, Jet::constant(n, K0, 0.0));
    for (int i = 0; i < n; ++i) {
      Jet acc(n, K0);
      for (int lam = 0; lam < n; ++lam)
        acc.add_product(T(nu, lam).truncated(K0), frame(i, lam).truncated(K0),
                        1.0);
      vf[i] = eps(i) * acc;
    }
    w[nu] = pairing(frame_vector_mult(vf, psi.truncated(K0)),
                    phi.truncated(K0));
  }
  Jet divY = geo_.divergence(geo_.sharp(w));
  const int K = divY.order();
  // sum_i eps_i [<T(s_i)^# nab_i psi, phi> - (-1)^p <psi, T(s_i)^# nab_i phi>]
  TensorField Tf = sharp_rows_frame(T.truncated(std::min(T.order(), K)));
  Jet rhs(n, K);
  for (int i = 0; i < n; ++i) {
    std::vector<Jet> vf(n, Jet::constant(n, K, 0.0));
    for (int j = 0; j < n; ++j) vf[j] = Tf(i, j).truncated(K);
    SpinorField t1 = frame_vector_mult(vf, cov_deriv_frame(psi, i).truncated(K));
    SpinorField t2 = frame_vector_mult(vf, cov_deriv_frame(phi, i).truncated(K));
    Jet a = pairing(t1, phi.truncated(K));
    Jet b = pairing(psi.truncated(K), t2);
    rhs += eps(i) * (a - sp * b).truncated(K);
  }
  // + (-1)^p <psi, (delta T)^sharp phi>
  auto dT = geo_.codifferential(T);
  SpinorField dphi = oneform_sharp_mult(dT, phi.truncated(K));
  rhs += sp * pairing(psi.truncated(K), dphi).truncated(K);
  return divY - rhs.truncated(K);
}

}  // namespace cdl
