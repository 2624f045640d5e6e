// SPDX-License-Identifier: Apache-2.0
#include "chart.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace cdl {

std::string to_string(ChartFamily f) {
  switch (f) {
    case ChartFamily::flat: return "flat";
    case ChartFamily::conformally_flat: return "conformally_flat";
    case ChartFamily::sphere_stereographic: return "sphere_stereographic";
    case ChartFamily::hyperbolic_ball: return "hyperbolic_ball";
    case ChartFamily::perturbed: return "perturbed";
  }
  return "?";
}

MetricChart MetricChart::flat(int n, int p) {
  MetricChart c(n, p, ChartFamily::flat);
  c.name_ = "flat";
  return c;
}

MetricChart MetricChart::conformally_flat(int n, int p, AnalyticScalar sigma) {
  MetricChart c(n, p, ChartFamily::conformally_flat);
  c.sigma_ = std::move(sigma);
  c.name_ = "conformally_flat";
  return c;
}

MetricChart MetricChart::sphere(int n, double radius) {
  MetricChart c(n, 0, ChartFamily::sphere_stereographic);
  c.radius_ = radius;
  c.name_ = "sphere_stereographic";
  return c;
}

MetricChart MetricChart::hyperbolic(int n, double radius) {
  MetricChart c(n, 0, ChartFamily::hyperbolic_ball);
  c.radius_ = radius;
  c.name_ = "hyperbolic_ball";
  return c;
}

MetricChart MetricChart::perturbed(int n, int p, std::uint64_t seed,
                                   double amplitude, int degree) {
  MetricChart c(n, p, ChartFamily::perturbed);
  c.name_ = "perturbed";
  std::mt19937_64 rng(seed);
  auto uni = [&rng]() {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  };
  const JetShape* sh = JetShape::get(n, degree);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      AnalyticScalar h(n);
      for (std::size_t t = 1; t < sh->size(); ++t) {
        auto e = sh->exponent(t);
        std::vector<int> exps(e.begin(), e.end());
        double scale = amplitude / ((1.0 + sh->degree(t)) * (1.0 + sh->degree(t)));
        h.add_monomial(std::move(exps), scale * uni());
      }
      c.perturbation_.push_back(std::move(h));
    }
  std::vector<double> origin(n, 0.0);
  c.validate_at(origin);
  return c;
}

MetricChart MetricChart::rescaled(const AnalyticScalar& sigma) const {
  MetricChart c = *this;
  if (c.has_extra_)
    throw Error(errc::invalid_argument, "chart already carries a rescale");
  c.extra_sigma_ = sigma;
  c.has_extra_ = true;
  c.name_ += "+rescale";
  return c;
}

bool MetricChart::has_conformal_inverse() const {
  return family_ != ChartFamily::perturbed;
}

std::vector<double> MetricChart::eps() const {
  std::vector<double> e(n_, 1.0);
  for (int i = 0; i < p_; ++i) e[i] = -1.0;
  return e;
}

int MetricChart::trig_degree() const {
  int d = sigma_.trig_degree();
  if (has_extra_) d = std::max(d, extra_sigma_.trig_degree());
  for (const auto& h : perturbation_) d = std::max(d, h.trig_degree());
  return d;
}

Jet MetricChart::conformal_factor(std::span<const double> x0,
                                  int order) const {
  // e^{2 sigma_total} for the conformal-type families; flat -> 1
  switch (family_) {
    case ChartFamily::flat:
    case ChartFamily::perturbed: {
      Jet one = Jet::constant(n_, order, 1.0);
      if (!has_extra_) return one;
      return exp(2.0 * extra_sigma_.eval(x0, order));
    }
    case ChartFamily::conformally_flat: {
      Jet s = sigma_.eval(x0, order);
      if (has_extra_) s += extra_sigma_.eval(x0, order);
      return exp(2.0 * s);
    }
    case ChartFamily::sphere_stereographic:
    case ChartFamily::hyperbolic_ball: {
      const double sgn =
          family_ == ChartFamily::sphere_stereographic ? 1.0 : -1.0;
      Jet r2 = Jet::constant(n_, order, 0.0);
      for (int d = 0; d < n_; ++d) {
        Jet xd = Jet::variable(n_, order, d, x0[d]);
        r2 += xd * xd;
      }
      const double R2 = radius_ * radius_;
      Jet den = R2 + sgn * r2;
      if (sgn < 0 && den.value().real() <= 0.0)
        throw Error(errc::domain, "hyperbolic_ball: base point outside the ball");
      Jet f = (4.0 * R2 * R2) * reciprocal(den * den);
      if (has_extra_) f = f * exp(2.0 * extra_sigma_.eval(x0, order));
      return f;
    }
  }
  throw Error(errc::invalid_argument, "unknown chart family");
}

std::vector<Jet> MetricChart::metric_jets(std::span<const double> x0,
                                          int order) const {
  std::vector<Jet> g(static_cast<std::size_t>(n_) * n_,
                     Jet::constant(n_, order, 0.0));
  auto e = eps();
  if (family_ == ChartFamily::perturbed) {
    std::size_t at = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        Jet h = perturbation_[at++].eval(x0, order);
        if (i == j) h += e[i];
        g[i * n_ + j] = h;
        g[j * n_ + i] = h;
      }
    if (has_extra_) {
      Jet f = exp(2.0 * extra_sigma_.eval(x0, order));
      for (auto& x : g) x = x * f;
    }
    return g;
  }
  Jet f = conformal_factor(x0, order);
  for (int i = 0; i < n_; ++i) g[i * n_ + i] = e[i] * f;
  return g;
}

std::optional<std::vector<Jet>> MetricChart::inverse_metric_jets(
    std::span<const double> x0, int order) const {
  if (!has_conformal_inverse()) return std::nullopt;
  Jet finv = reciprocal(conformal_factor(x0, order));
  std::vector<Jet> gi(static_cast<std::size_t>(n_) * n_,
                      Jet::constant(n_, order, 0.0));
  auto e = eps();
  for (int i = 0; i < n_; ++i) gi[i * n_ + i] = e[i] * finv;
  return gi;
}

void MetricChart::validate_at(std::span<const double> x0) const {
  auto g = metric_jets(x0, 0);
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = g[i * n_ + j].value().real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  int neg = 0, pos = 0;
  for (int i = 0; i < n_; ++i) {
    double ev = es.eigenvalues()[i];
    if (std::abs(ev) < 1e-10)
      throw Error(errc::degenerate_metric, "metric degenerate at base point");
    (ev < 0 ? neg : pos)++;
  }
  if (neg != p_)
    throw Error(errc::degenerate_metric,
                "metric signature (" + std::to_string(neg) + "," +
                    std::to_string(pos) + ") does not match requested (" +
                    std::to_string(p_) + "," + std::to_string(n_ - p_) + ")");
}

}  // namespace cdl
