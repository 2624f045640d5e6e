// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "jet.hpp"

namespace cdl {

enum class ChartFamily {
  flat,
  conformally_flat,
  sphere_stereographic,
  hyperbolic_ball,
  perturbed,
};

std::string to_string(ChartFamily f);

/// Analytic semi-Riemannian metric g_ij on a coordinate chart, signature
/// (p,q) with timelike directions first. Evaluable to component jets at any
/// base point. An extra conformal factor e^{2 sigma} can be stacked on any
/// family (used for conformal-change tests).
class MetricChart {
 public:
  static MetricChart flat(int n, int p);
  static MetricChart conformally_flat(int n, int p, AnalyticScalar sigma);
  static MetricChart sphere(int n, double radius = 1.0);
  static MetricChart hyperbolic(int n, double radius = 1.0);
  /// g = diag(eps) + h with h_ij random polynomials of the given degree,
  /// coefficients seeded and scaled by amplitude; rejects signature loss at
  /// the origin.
  static MetricChart perturbed(int n, int p, std::uint64_t seed,
                               double amplitude, int degree);

  /// same chart with metric multiplied by e^{2 sigma}
  MetricChart rescaled(const AnalyticScalar& sigma) const;

  int dim() const { return n_; }
  int index_p() const { return p_; }
  ChartFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  double radius() const { return radius_; }
  bool has_conformal_inverse() const;  // g^{-1} available without elimination

  /// n x n symmetric matrix of component jets at x0 (row-major, all entries)
  std::vector<Jet> metric_jets(std::span<const double> x0, int order) const;
  /// inverse metric jets when the family structure gives them directly
  std::optional<std::vector<Jet>> inverse_metric_jets(
      std::span<const double> x0, int order) const;
  /// signs (-1,...,-1,+1,...,+1)
  std::vector<double> eps() const;
  /// largest trig frequency appearing in the metric (0 if polynomial)
  int trig_degree() const;

  /// validates nondegeneracy + signature of the constant term at x0
  void validate_at(std::span<const double> x0) const;

 private:
  MetricChart(int n, int p, ChartFamily f) : n_(n), p_(p), family_(f) {}
  Jet conformal_factor(std::span<const double> x0, int order) const;

  int n_, p_;
  ChartFamily family_;
  std::string name_;
  double radius_ = 1.0;
  AnalyticScalar sigma_;        // for conformally_flat
  AnalyticScalar extra_sigma_;  // stacked rescale (any family)
  bool has_extra_ = false;
  std::vector<AnalyticScalar> perturbation_;  // upper-triangular h_ij
};

}  // namespace cdl
