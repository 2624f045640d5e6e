// SPDX-License-Identifier: Apache-2.0
#include "jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace cdl {

namespace {

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void gen_exps(int rem, int slots, std::vector<std::uint8_t>& cur,
              std::vector<std::uint8_t>& out) {
  if (slots == 1) {
    cur.push_back(static_cast<std::uint8_t>(rem));
    out.insert(out.end(), cur.begin(), cur.end());
    cur.pop_back();
    return;
  }
  for (int a = rem; a >= 0; --a) {
    cur.push_back(static_cast<std::uint8_t>(a));
    gen_exps(rem - a, slots - 1, cur, out);
    cur.pop_back();
  }
}

std::mutex g_shape_mutex;

}  // namespace

JetShape::JetShape(int n_vars, int order) : n_vars_(n_vars), order_(order) {
  std::vector<std::uint8_t> cur;
  for (int k = 0; k <= order; ++k) gen_exps(k, n_vars, cur, exps_);
  const std::size_t m = exps_.size() / n_vars_;
  degs_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    int d = 0;
    for (int v = 0; v < n_vars_; ++v) d += exps_[i * n_vars_ + v];
    degs_[i] = static_cast<std::uint8_t>(d);
  }
  partials_.resize(n_vars_);
}

std::size_t JetShape::count(int n_vars, int order) {
  return static_cast<std::size_t>(binom(n_vars + order, order));
}

const JetShape* JetShape::get(int n_vars, int order) {
  if (n_vars < 1 || n_vars > 16 || order < 0 || order > 24)
    throw Error(errc::invalid_argument,
                "jet shape out of range: n_vars=" + std::to_string(n_vars) +
                    " order=" + std::to_string(order));
  static std::map<std::pair<int, int>, std::unique_ptr<JetShape>> registry;
  std::lock_guard<std::mutex> lk(g_shape_mutex);
  auto& slot = registry[{n_vars, order}];
  if (!slot) slot.reset(new JetShape(n_vars, order));
  return slot.get();
}

std::size_t JetShape::position(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != n_vars_)
    throw Error(errc::invalid_argument, "multi-index arity mismatch");
  int deg = 0;
  for (int a : alpha) {
    if (a < 0) throw Error(errc::invalid_argument, "negative exponent");
    deg += a;
  }
  if (deg > order_)
    throw Error(errc::invalid_argument, "multi-index degree exceeds jet order");
  if (deg == 0) return 0;
  std::size_t pos = count(n_vars_, deg - 1);
  // within the degree block: lex with larger leading exponent first
  int rem = deg;
  for (int v = 0; v + 1 < n_vars_; ++v) {
    for (int a = rem; a > alpha[v]; --a)
      pos += count(n_vars_ - v - 2, rem - a);
    rem -= alpha[v];
  }
  return pos;
}

const JetShape::MultTable& JetShape::mult_table() const {
  std::lock_guard<std::mutex> lk(g_shape_mutex);
  if (mult_built_) return mult_;
  const std::size_t m = size();
  std::vector<std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>>
      buckets(m);
  std::vector<int> sum(n_vars_);
  for (std::size_t i = 0; i < m; ++i) {
    auto ea = exponent(i);
    for (std::size_t j = 0; j < m; ++j) {
      if (degs_[i] + degs_[j] > order_) continue;
      auto eb = exponent(j);
      double f = 1.0;
      for (int v = 0; v < n_vars_; ++v) {
        sum[v] = ea[v] + eb[v];
        f *= static_cast<double>(binom(sum[v], ea[v]));
      }
      buckets[position(sum)].emplace_back(static_cast<std::uint32_t>(i),
                                          static_cast<std::uint32_t>(j), f);
    }
  }
  mult_.offsets.assign(m + 1, 0);
  std::size_t total = 0;
  for (std::size_t k = 0; k < m; ++k) {
    mult_.offsets[k] = static_cast<std::uint32_t>(total);
    total += buckets[k].size();
  }
  mult_.offsets[m] = static_cast<std::uint32_t>(total);
  mult_.ia.resize(total);
  mult_.ib.resize(total);
  mult_.factor.resize(total);
  std::size_t at = 0;
  for (std::size_t k = 0; k < m; ++k)
    for (const auto& [ia, ib, f] : buckets[k]) {
      mult_.ia[at] = ia;
      mult_.ib[at] = ib;
      mult_.factor[at] = f;
      ++at;
    }
  mult_built_ = true;
  return mult_;
}

const std::vector<std::uint32_t>& JetShape::partial_table(int d) const {
  if (order_ == 0) throw Error(errc::order_exhausted, "partial of order-0 jet");
  const JetShape* lower = JetShape::get(n_vars_, order_ - 1);
  std::lock_guard<std::mutex> lk(g_shape_mutex);
  auto& tab = partials_[d];
  if (!tab.empty()) return tab;
  tab.resize(lower->size());
  std::vector<int> up(n_vars_);
  for (std::size_t i = 0; i < lower->size(); ++i) {
    auto e = lower->exponent(i);
    for (int v = 0; v < n_vars_; ++v) up[v] = e[v];
    up[d] += 1;
    tab[i] = static_cast<std::uint32_t>(position(up));
  }
  return tab;
}

// ---------------------------------------------------------------------------

Jet Jet::constant(int n_vars, int order, cplx v) {
  Jet j(n_vars, order);
  j.c_[0] = v;
  j.const_flag_ = true;
  return j;
}

Jet Jet::variable(int n_vars, int order, int dir, double base_value) {
  if (dir < 0 || dir >= n_vars)
    throw Error(errc::invalid_argument, "variable direction out of range");
  Jet j(n_vars, order);
  j.c_[0] = base_value;
  if (order >= 1) j.c_[1 + dir] = 1.0;  // degree-1 block is x1,...,xn in order
  j.const_flag_ = (order == 0);
  return j;
}

void Jet::require_same_shape(const Jet& o) const {
  if (shape_ != o.shape_)
    throw Error(errc::shape_mismatch,
                "jet shape mismatch: (" + std::to_string(n_vars()) + "," +
                    std::to_string(order()) + ") vs (" +
                    std::to_string(o.n_vars()) + "," +
                    std::to_string(o.order()) + ")");
}

cplx Jet::coeff(std::span<const int> alpha) const {
  return c_[shape_->position(alpha)];
}

Jet& Jet::operator+=(const Jet& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  const_flag_ = const_flag_ && o.const_flag_;
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  const_flag_ = const_flag_ && o.const_flag_;
  return *this;
}

Jet& Jet::operator*=(cplx v) {
  for (auto& x : c_) x *= v;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

Jet operator-(cplx v, const Jet& a) {
  Jet r = -a;
  r.c_[0] += v;
  return r;
}

void Jet::add_product(const Jet& a, const Jet& b, cplx scale) {
  require_same_shape(a);
  require_same_shape(b);
  if (a.const_flag_) {
    const cplx f = a.c_[0] * scale;
    if (f != cplx{}) {
      for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += f * b.c_[i];
      const_flag_ = const_flag_ && b.const_flag_;
    }
    return;
  }
  if (b.const_flag_) {
    const cplx f = b.c_[0] * scale;
    if (f != cplx{}) {
      for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += f * a.c_[i];
      const_flag_ = const_flag_ && a.const_flag_;
    }
    return;
  }
  const auto& t = shape_->mult_table();
  const cplx* pa = a.c_.data();
  const cplx* pb = b.c_.data();
  for (std::size_t k = 0; k < c_.size(); ++k) {
    cplx acc{};
    for (std::uint32_t s = t.offsets[k]; s < t.offsets[k + 1]; ++s)
      acc += t.factor[s] * pa[t.ia[s]] * pb[t.ib[s]];
    c_[k] += scale * acc;
  }
  const_flag_ = false;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.n_vars(), a.order());
  r.add_product(a, b);
  if (a.const_flag_ && b.const_flag_) r.const_flag_ = true;
  return r;
}

Jet Jet::partial(int dir) const {
  if (order() == 0)
    throw Error(errc::order_exhausted, "jet_partial: order already 0");
  if (dir < 0 || dir >= n_vars())
    throw Error(errc::invalid_argument, "partial direction out of range");
  const auto& tab = shape_->partial_table(dir);
  Jet r(n_vars(), order() - 1);
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = c_[tab[i]];
  return r;
}

Jet Jet::truncated(int new_order) const {
  if (new_order == order()) return *this;
  if (new_order > order())
    throw Error(errc::order_exhausted,
                "cannot extend jet order " + std::to_string(order()) + " to " +
                    std::to_string(new_order));
  if (new_order < 0)
    throw Error(errc::order_exhausted, "jet order budget exhausted");
  Jet r(n_vars(), new_order);
  std::copy(c_.begin(), c_.begin() + r.c_.size(), r.c_.begin());
  r.const_flag_ = const_flag_;
  return r;
}

Jet Jet::conjugated() const {
  Jet r = *this;
  for (auto& x : r.c_) x = std::conj(x);
  return r;
}

double Jet::max_abs() const {
  double m = 0.0;
  for (const auto& x : c_) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------

Jet compose_analytic(const Jet& a, std::span<const cplx> scaled_derivs) {
  const int K = a.order();
  if (static_cast<int>(scaled_derivs.size()) < K + 1)
    throw Error(errc::invalid_argument, "compose_analytic: not enough derivatives");
  Jet t = a;
  t[0] = 0.0;
  Jet r = Jet::constant(a.n_vars(), K, scaled_derivs[K]);
  for (int k = K - 1; k >= 0; --k) {
    Jet next(a.n_vars(), K);
    next.add_product(r, t);
    next += scaled_derivs[k];
    r = std::move(next);
  }
  return r;
}

namespace {
cplx require_nonzero(const Jet& a, const char* fn) {
  cplx c0 = a.value();
  if (std::abs(c0) == 0.0)
    throw Error(errc::domain, std::string(fn) + ": constant term is zero");
  return c0;
}
cplx require_positive_branch(const Jet& a, const char* fn) {
  cplx c0 = require_nonzero(a, fn);
  if (c0.imag() == 0.0 && c0.real() < 0.0)
    throw Error(errc::domain,
                std::string(fn) + ": constant term on the negative real axis");
  return c0;
}
}  // namespace

Jet reciprocal(const Jet& a) {
  cplx c0 = require_nonzero(a, "reciprocal");
  std::vector<cplx> d(a.order() + 1);
  d[0] = 1.0 / c0;
  for (int k = 1; k <= a.order(); ++k) d[k] = -d[k - 1] / c0;
  return compose_analytic(a, d);
}

Jet sqrt(const Jet& a) {
  cplx c0 = require_positive_branch(a, "sqrt");
  std::vector<cplx> d(a.order() + 1);
  d[0] = std::sqrt(c0);
  for (int k = 1; k <= a.order(); ++k)
    d[k] = d[k - 1] / c0 * (0.5 - (k - 1)) / static_cast<double>(k);
  return compose_analytic(a, d);
}

Jet exp(const Jet& a) {
  std::vector<cplx> d(a.order() + 1);
  d[0] = std::exp(a.value());
  for (int k = 1; k <= a.order(); ++k) d[k] = d[k - 1] / static_cast<double>(k);
  return compose_analytic(a, d);
}

Jet log(const Jet& a) {
  cplx c0 = require_positive_branch(a, "log");
  std::vector<cplx> d(a.order() + 1);
  d[0] = std::log(c0);
  cplx inv = 1.0 / c0, p = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    p *= inv;
    d[k] = ((k % 2) ? 1.0 : -1.0) * p / static_cast<double>(k);
  }
  return compose_analytic(a, d);
}

Jet pow(const Jet& a, double r) {
  cplx c0 = require_positive_branch(a, "pow");
  std::vector<cplx> d(a.order() + 1);
  d[0] = std::pow(c0, r);
  for (int k = 1; k <= a.order(); ++k)
    d[k] = d[k - 1] / c0 * (r - (k - 1)) / static_cast<double>(k);
  return compose_analytic(a, d);
}

Jet sin(const Jet& a) {
  const cplx i{0.0, 1.0};
  Jet e1 = exp(i * a), e2 = exp(-i * a);
  return (e1 - e2) * cplx{0.0, -0.5};
}

Jet cos(const Jet& a) {
  const cplx i{0.0, 1.0};
  Jet e1 = exp(i * a), e2 = exp(-i * a);
  return (e1 + e2) * 0.5;
}

}  // namespace cdl
