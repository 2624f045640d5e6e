// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "jet.hpp"

namespace cdl {

/// Real-analytic scalar function on R^n given as polynomial + trigonometric
/// polynomial, evaluable to a Jet at any base point (closed-form derivatives).
class AnalyticScalar {
 public:
  AnalyticScalar() = default;
  explicit AnalyticScalar(int n_vars) : n_(n_vars) {}

  int n_vars() const { return n_; }
  bool empty() const { return poly_.empty() && trig_.empty(); }

  void add_monomial(std::vector<int> exps, double coeff);
  /// amp * e^{i k.x}
  void add_wave(std::vector<int> k, cplx amp);
  void add_cos(std::vector<int> k, double amp);
  void add_sin(std::vector<int> k, double amp);

  Jet eval(std::span<const double> x0, int order) const;
  double value(std::span<const double> x0) const;

  /// largest |k_v| over trig terms (0 for pure polynomials)
  int trig_degree() const;
  AnalyticScalar scaled(double s) const;

 private:
  int n_ = 0;
  struct Mono { std::vector<int> e; double c; };
  struct Wave { std::vector<int> k; cplx a; };
  std::vector<Mono> poly_;
  std::vector<Wave> trig_;
};

}  // namespace cdl
