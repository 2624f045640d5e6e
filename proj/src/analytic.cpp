// SPDX-License-Identifier: Apache-2.0
#include "analytic.hpp"

#include <cmath>

namespace cdl {

void AnalyticScalar::add_monomial(std::vector<int> exps, double coeff) {
  if (static_cast<int>(exps.size()) != n_)
    throw Error(errc::invalid_argument, "monomial arity mismatch");
  poly_.push_back({std::move(exps), coeff});
}

void AnalyticScalar::add_wave(std::vector<int> k, cplx amp) {
  if (static_cast<int>(k.size()) != n_)
    throw Error(errc::invalid_argument, "wave arity mismatch");
  trig_.push_back({std::move(k), amp});
}

void AnalyticScalar::add_cos(std::vector<int> k, double amp) {
  std::vector<int> mk(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
  add_wave(k, 0.5 * amp);
  add_wave(std::move(mk), 0.5 * amp);
}

void AnalyticScalar::add_sin(std::vector<int> k, double amp) {
  std::vector<int> mk(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
  add_wave(k, cplx{0.0, -0.5} * amp);
  add_wave(std::move(mk), cplx{0.0, 0.5} * amp);
}

Jet AnalyticScalar::eval(std::span<const double> x0, int order) const {
  Jet out(n_, order);
  const JetShape& sh = out.shape();
  for (const auto& m : poly_) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto beta = sh.exponent(i);
      double v = m.c;
      bool zero = false;
      for (int d = 0; d < n_ && !zero; ++d) {
        int a = m.e[d], b = beta[d];
        if (b > a) { zero = true; break; }
        // falling factorial a(a-1)...(a-b+1) times x0^(a-b)
        for (int t = 0; t < b; ++t) v *= (a - t);
        if (a - b > 0) v *= std::pow(x0[d], a - b);
      }
      if (!zero) out[i] += v;
    }
  }
  for (const auto& w : trig_) {
    double phase = 0.0;
    for (int d = 0; d < n_; ++d) phase += w.k[d] * x0[d];
    cplx base = w.a * std::exp(cplx{0.0, phase});
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto beta = sh.exponent(i);
      cplx v = base;
      for (int d = 0; d < n_; ++d)
        for (int t = 0; t < beta[d]; ++t) v *= cplx{0.0, double(w.k[d])};
      out[i] += v;
    }
  }
  return out;
}

double AnalyticScalar::value(std::span<const double> x0) const {
  double acc = 0.0;
  for (const auto& m : poly_) {
    double v = m.c;
    for (int d = 0; d < n_; ++d)
      if (m.e[d] > 0) v *= std::pow(x0[d], m.e[d]);
    acc += v;
  }
  cplx tacc{};
  for (const auto& w : trig_) {
    double phase = 0.0;
    for (int d = 0; d < n_; ++d) phase += w.k[d] * x0[d];
    tacc += w.a * std::exp(cplx{0.0, phase});
  }
  return acc + tacc.real();
}

int AnalyticScalar::trig_degree() const {
  int deg = 0;
  for (const auto& w : trig_)
    for (int d = 0; d < n_; ++d) deg = std::max(deg, std::abs(w.k[d]));
  return deg;
}

AnalyticScalar AnalyticScalar::scaled(double s) const {
  AnalyticScalar r = *this;
  for (auto& m : r.poly_) m.c *= s;
  for (auto& w : r.trig_) w.a *= s;
  return r;
}

}  // namespace cdl
