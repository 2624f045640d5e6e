// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "chart.hpp"
#include "jet.hpp"

namespace cdl {

/// Coordinate components of an all-lower tensor on the chart; every slot has
/// dimension n. Entries are jets of a common shape.
class TensorField {
 public:
  TensorField() = default;
  TensorField(int n, int rank, int n_vars, int order)
      : n_(n), rank_(rank),
        c_(static_cast<std::size_t>(ipow(n, rank)),
           Jet::constant(n_vars, order, 0.0)) {}

  int dim() const { return n_; }
  int rank() const { return rank_; }
  int order() const { return c_.empty() ? 0 : c_[0].order(); }
  std::size_t size() const { return c_.size(); }
  Jet& flat_at(std::size_t i) { return c_[i]; }
  const Jet& flat_at(std::size_t i) const { return c_[i]; }

  template <class... I>
  Jet& operator()(I... idx) {
    return c_[offset(idx...)];
  }
  template <class... I>
  const Jet& operator()(I... idx) const {
    return c_[offset(idx...)];
  }

  TensorField truncated(int new_order) const;
  double max_abs() const;

  template <class... I>
  std::size_t offset(I... idx) const {
    static_assert(sizeof...(I) >= 1);
    std::size_t o = 0;
    ((o = o * n_ + static_cast<std::size_t>(idx)), ...);
    return o;
  }

 private:
  static std::size_t ipow(int b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
  }
  int n_ = 0, rank_ = 0;
  std::vector<Jet> c_;
};

/// (A (KN) B)(X,Y,Z,W) = A(X,Z)B(Y,W)+A(Y,W)B(X,Z)-A(X,W)B(Y,Z)-A(Y,Z)B(X,W)
TensorField kulkarni_nomizu(const TensorField& A, const TensorField& B);

/// Metric chart anchored at a base point together with the curvature stack,
/// computed lazily as coordinate-component jets. Metric jets carry order
/// `metric_order`; each derived tensor loses one order per derivative
/// (Gamma: 1, curvature: 2, Cotton: 3, Bach: 4).
class Geometry {
 public:
  Geometry(const MetricChart& chart, std::vector<double> x0, int metric_order);

  const MetricChart& chart() const { return chart_; }
  int dim() const { return n_; }
  int index_p() const { return chart_.index_p(); }
  const std::vector<double>& base_point() const { return x0_; }
  int metric_order() const { return km_; }
  const std::vector<double>& eps() const { return eps_; }

  const Jet& g(int i, int j) const { return g_[i * n_ + j]; }
  const Jet& ginv(int i, int j) const { return ginv_[i * n_ + j]; }
  const TensorField& metric() const { return g_t_; }

  /// Christoffel symbols Gamma^k_{ij}, order metric_order-1
  const Jet& christoffel(int k, int i, int j) const;

  /// R(X,Y)Z components R^l_{ijk} (upper l), order metric_order-2
  const TensorField& riemann_up() const;
  /// all-lower Riemannian curvature R(X,Y,Z,W)
  const TensorField& riemann() const;
  const TensorField& ricci() const;
  const Jet& scalar_curvature() const;  // tau
  const Jet& j_norm() const;            // J = tau / (2(n-1))
  const TensorField& schouten() const;  // P
  const TensorField& weyl() const;      // all-lower
  const TensorField& cotton() const;    // C(X,Y,Z), 3 lower
  const TensorField& bach() const;      // 2 lower

  // ---- tensor tools over component jets ----
  /// covariant derivative; the new (first) slot is the direction
  TensorField cov_deriv(const TensorField& T) const;
  /// raise a 1-form to a vector: out^mu = g^{mu nu} w_nu
  std::vector<Jet> sharp(std::span<const Jet> w) const;
  /// lower a vector: out_mu = g_{mu nu} X^nu
  std::vector<Jet> flat(std::span<const Jet> X) const;
  /// g-trace over two lower slots of T
  TensorField trace_g(const TensorField& T, int slot_a, int slot_b) const;
  /// co-differential of a symmetric 2-tensor: (delta T)(Y) =
  /// -sum_i eps_i (nabla_{s_i} T)(s_i, Y), returned as a 1-form
  std::vector<Jet> codifferential(const TensorField& T) const;
  /// divergence of a vector field (upper components)
  Jet divergence(std::span<const Jet> X) const;
  /// scalar Laplacian tr_g(nabla nabla f)
  Jet laplacian(const Jet& f) const;
  /// T^2(X,Y) = T(T(X)^sharp, Y)
  TensorField tensor_square(const TensorField& T) const;

 private:
  void build_inverse();

  MetricChart chart_;
  std::vector<double> x0_;
  int n_, km_;
  std::vector<double> eps_;
  std::vector<Jet> g_, ginv_;
  TensorField g_t_;
  mutable std::optional<TensorField> gamma_;  // rank 3: (k,i,j) upper k
  mutable std::optional<TensorField> riem_up_, riem_, ric_, schouten_, weyl_,
      cotton_, bach_;
  mutable std::optional<Jet> tau_, jn_;
};

}  // namespace cdl
