// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "clifford.hpp"
#include "curvature.hpp"

namespace cdl {

/// Component vector of a spinor field relative to the context's orthonormal
/// frame: 2^m complex jets of a common shape.
struct SpinorField {
  std::vector<Jet> c;
  std::string provenance;

  int order() const { return min_order(c.begin(), c.end()); }
  SpinorField truncated(int K) const;
  double max_abs() const;
  SpinorField& operator+=(const SpinorField& o);
  SpinorField& operator-=(const SpinorField& o);
  friend SpinorField operator+(SpinorField a, const SpinorField& b) { a += b; return a; }
  friend SpinorField operator-(SpinorField a, const SpinorField& b) { a -= b; return a; }
  friend SpinorField operator*(cplx s, SpinorField a) {
    for (auto& j : a.c) j *= s;
    return a;
  }
};

/// apply a constant matrix to a jet vector, skipping zero entries
std::vector<Jet> mat_apply(const MatC& m, std::span<const Jet> v);

/// Geometry anchored at a base point plus the orthonormal frame field
/// (signed Gram-Schmidt over jets, timelike-first), the spin connection
/// coefficients, and frame components of the curvature tensors.
class SpinContext {
 public:
  SpinContext(const MetricChart& chart, std::vector<double> x0,
              int metric_order);

  const Geometry& geo() const { return geo_; }
  int dim() const { return geo_.dim(); }
  int index_p() const { return geo_.index_p(); }
  double eps(int i) const { return geo_.eps()[i]; }
  const CliffordRep& rep() const { return *rep_; }
  const TractorCliffordRep& trep() const { return *trep_; }
  int spinor_dim() const { return rep_->rep_dim(); }

  /// frame coefficients: s_i = A(i,mu) d_mu, jets of metric order
  const Jet& frame(int i, int mu) const { return A_[i * dim() + mu]; }
  /// spin connection omega(mu,i,j) = g(nabla_mu s_i, s_j), order Km-1
  const Jet& omega(int mu, int i, int j) const {
    return om_[(mu * dim() + i) * dim() + j];
  }

  // frame components of curvature tensors (cached)
  const TensorField& schouten_frame() const;   // P(s_i, s_j)
  const TensorField& cotton_frame() const;     // C(s_a, s_b, s_i)
  const TensorField& weyl_frame() const;       // W(s_a, s_b, s_c, s_d)
  /// frame components of coordinate covectors: B(mu,i) = g(d_mu, s_i)
  const TensorField& coord_frame_form() const;

  SpinorField zero_spinor(int order) const;
  SpinorField random_spinor(int order, int degree, std::uint64_t seed,
                            double scale = 1.0) const;

  // ---- core operators ----
  /// nabla_{d_mu} psi
  SpinorField cov_deriv(const SpinorField& psi, int mu) const;
  /// nabla_{s_i} psi
  SpinorField cov_deriv_frame(const SpinorField& psi, int i) const;
  /// Dirac operator
  SpinorField dirac(const SpinorField& psi) const;
  /// Dirac applied k times
  SpinorField dirac_pow(const SpinorField& psi, int k) const;
  /// Bochner Laplacian via the frame route: sum_i eps_i (nabla^2 psi)(s_i,s_i)
  SpinorField bochner(const SpinorField& psi) const;
  /// independent coordinate-route oracle g^{mu nu}(nabla_mu nabla_nu -
  /// Gamma^l_{mu nu} nabla_l) psi
  SpinorField bochner_coordinate(const SpinorField& psi) const;

  // ---- Clifford actions over jets ----
  /// Clifford multiplication by the coordinate vector d_mu
  SpinorField coord_mult(const SpinorField& psi, int mu) const;
  /// Clifford multiplication by a vector given in frame components
  SpinorField frame_vector_mult(std::span<const Jet> vf,
                                const SpinorField& psi) const;
  /// Clifford multiplication by a 2-form given in frame components
  SpinorField two_form_mult(const TensorField& wf, const SpinorField& psi) const;
  /// Clifford multiplication by a k-form given in frame components (k slots)
  SpinorField form_mult(const TensorField& wf, const SpinorField& psi) const;
  /// Clifford mult by a 1-form's sharp, coordinate components w_mu
  SpinorField oneform_sharp_mult(std::span<const Jet> w,
                                 const SpinorField& psi) const;
  /// T(s_i)^sharp in frame components: out(i,j) = eps_j T(s_i, s_j)
  TensorField sharp_rows_frame(const TensorField& T) const;

  // ---- brackets and products ----
  /// (T, nabla psi) = sum_i eps_i T(s_i)^sharp . nabla_{s_i} psi
  SpinorField bracket_T_nabla(const TensorField& T,
                              const SpinorField& psi) const;
  /// (nabla, T.psi) via the rewriting identity
  /// (T, nabla psi) - (codifferential T)^sharp . psi
  SpinorField bracket_nabla_T(const TensorField& T,
                              const SpinorField& psi) const;
  /// independent oracle: -delta^nabla (T.psi) computed directly in
  /// coordinates
  SpinorField bracket_nabla_T_direct(const TensorField& T,
                                     const SpinorField& psi) const;
  /// (C,P.psi) (order "CP") or (P,C.psi) (order "PC")
  SpinorField bracket_cotton_schouten(const SpinorField& psi, bool cp) const;
  enum class CurvProduct { WW, CW, WC };
  SpinorField curvature_product(CurvProduct kind, const SpinorField& psi) const;

  /// hermitian pairing <psi, phi> as a jet (linear in psi, conjugate-linear
  /// in phi)
  Jet pairing(const SpinorField& psi, const SpinorField& phi) const;

  /// residual of the pointwise divergence identity for a symmetric T:
  /// div(Y_w) - sum_i eps_i[<T(s_i)^# nab_i psi, phi> -
  /// (-1)^p <psi, T(s_i)^# nab_i phi>] - (-1)^p <psi, (delta T)^# phi>
  Jet divergence_identity_residual(const TensorField& T, const SpinorField& psi,
                                   const SpinorField& phi) const;

 private:
  void build_frame();
  void build_spin_connection();

  Geometry geo_;
  const CliffordRep* rep_;
  const TractorCliffordRep* trep_;
  std::vector<Jet> A_;
  std::vector<Jet> om_;
  mutable std::optional<TensorField> p_frame_, c_frame_, w_frame_, b_coord_;
};

}  // namespace cdl
