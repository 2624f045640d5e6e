// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdl {

using cplx = std::complex<double>;

enum class errc {
  invalid_argument,
  shape_mismatch,
  domain,
  order_exhausted,
  degenerate_metric,
  config,
  io,
};

struct Error : std::runtime_error {
  errc code;
  Error(errc c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

/// Multi-index bookkeeping for a fixed (n_vars, order) shape.
///
/// Enumeration contract: multi-indices are listed by total degree ascending,
/// and within a degree in lexicographic order with the larger leading
/// exponent first, e.g. for n=3, degree 2: (2,0,0),(1,1,0),(1,0,1),(0,2,0),
/// (0,1,1),(0,0,2). Truncation to a lower order is then a prefix.
class JetShape {
 public:
  static const JetShape* get(int n_vars, int order);

  int n_vars() const { return n_vars_; }
  int order() const { return order_; }
  std::size_t size() const { return exps_.size() / n_vars_; }

  /// exponent tuple of the i-th multi-index
  std::span<const std::uint8_t> exponent(std::size_t i) const {
    return {exps_.data() + i * n_vars_, static_cast<std::size_t>(n_vars_)};
  }
  std::size_t degree(std::size_t i) const { return degs_[i]; }
  /// position of a multi-index, or throws if |alpha| > order
  std::size_t position(std::span<const int> alpha) const;

  static std::size_t count(int n_vars, int order);

  struct MultTable {
    std::vector<std::uint32_t> offsets;  // size()+1 entries, result-major
    std::vector<std::uint32_t> ia, ib;
    std::vector<double> factor;  // product of componentwise binomials
  };
  const MultTable& mult_table() const;
  /// index map for d/dx_d: result coeff i reads source coeff table[i]
  const std::vector<std::uint32_t>& partial_table(int d) const;

 private:
  JetShape(int n_vars, int order);
  int n_vars_, order_;
  std::vector<std::uint8_t> exps_;  // flattened exponent tuples
  std::vector<std::uint8_t> degs_;
  mutable std::vector<std::vector<std::uint32_t>> partials_;  // per direction
  mutable MultTable mult_;
  mutable bool mult_built_ = false;
};

/// Truncated multivariate Taylor expansion of a complex scalar at a base
/// point. Coefficient convention: coeffs[alpha] is the derivative value
/// d^alpha f, i.e. f = sum coeffs[alpha] x^alpha / alpha!.
class Jet {
 public:
  Jet() : shape_(nullptr) {}
  Jet(int n_vars, int order)
      : shape_(JetShape::get(n_vars, order)), c_(shape_->size(), cplx{}) {}

  static Jet constant(int n_vars, int order, cplx v);
  static Jet variable(int n_vars, int order, int dir, double base_value);

  int n_vars() const { return shape_->n_vars(); }
  int order() const { return shape_->order(); }
  const JetShape& shape() const { return *shape_; }
  bool same_shape(const Jet& o) const { return shape_ == o.shape_; }

  cplx value() const { return c_[0]; }
  cplx& operator[](std::size_t i) { return c_[i]; }
  cplx operator[](std::size_t i) const { return c_[i]; }
  std::size_t size() const { return c_.size(); }
  const std::vector<cplx>& coeffs() const { return c_; }

  /// coefficient by multi-index (derivative convention)
  cplx coeff(std::span<const int> alpha) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(cplx v) { c_[0] += v; return *this; }
  Jet& operator-=(cplx v) { c_[0] -= v; return *this; }
  Jet& operator*=(cplx v);
  friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
  friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
  friend Jet operator+(Jet a, cplx v) { a += v; return a; }
  friend Jet operator+(cplx v, Jet a) { a += v; return a; }
  friend Jet operator-(Jet a, cplx v) { a -= v; return a; }
  friend Jet operator-(cplx v, const Jet& a);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, cplx v) { a *= v; return a; }
  friend Jet operator*(cplx v, Jet a) { a *= v; return a; }
  Jet operator-() const;

  /// accumulate a*b into *this (shapes must all match)
  void add_product(const Jet& a, const Jet& b, cplx scale = 1.0);

  Jet partial(int dir) const;
  Jet truncated(int new_order) const;
  Jet conjugated() const;  // coefficient-wise; matches conj(f) on real charts

  /// max |coeff|
  double max_abs() const;
  bool is_constant() const { return const_flag_; }

 private:
  const JetShape* shape_;
  std::vector<cplx> c_;
  bool const_flag_ = false;  // known-constant fast path; false negatives fine

  void require_same_shape(const Jet& o) const;
};

/// analytic composition f(a) for univariate analytic f, via Horner in the
/// zero-constant part of a; derivs[k] must hold f^(k)(a0)/k!.
Jet compose_analytic(const Jet& a, std::span<const cplx> scaled_derivs);

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet pow(const Jet& a, double r);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

/// min jet order over a range
template <class It>
int min_order(It first, It last) {
  int k = first->order();
  for (auto it = first; it != last; ++it) k = std::min(k, it->order());
  return k;
}

}  // namespace cdl
