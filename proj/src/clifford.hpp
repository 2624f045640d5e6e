// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "jet.hpp"

namespace cdl {

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

/// Concrete complexified Clifford representation for signature (p,q):
/// gamma matrices built by the Kronecker-product recipe, the element b of
/// the invariant hermitian product, and the signs eps_j.
///
/// The hermitian product <v,w> = (b.v, w) is linear in the first argument
/// and conjugate-linear in the second.
class CliffordRep {
 public:
  CliffordRep(int p, int q);

  int p() const { return p_; }
  int q() const { return q_; }
  int n() const { return p_ + q_; }
  int rep_dim() const { return static_cast<int>(gamma_[0].rows()); }
  const MatC& gamma(int j) const { return gamma_[j]; }  // j in [0, n)
  const MatC& b_matrix() const { return b_; }
  double eps(int j) const { return j < p_ ? -1.0 : 1.0; }

  cplx product(const VecC& v, const VecC& w) const;  // (b v, conj w)
  /// volume element gamma_1 ... gamma_n
  MatC volume_element() const;

  /// Clifford action of a k-form given by components w(e_{i1},...,e_{ik})
  /// on the chosen index tuples; w must be fully antisymmetric. Used at the
  /// representation level (scalar components).
  VecC form_action(int k, const std::function<cplx(std::span<const int>)>& w,
                   const VecC& v) const;

  /// second odd component variant (last generator negated); only meaningful
  /// for odd n
  void flip_last_generator();

 private:
  int p_, q_;
  std::vector<MatC> gamma_;
  MatC b_;
  void rebuild_b();
};

/// shared, immutable rep cache
const CliffordRep& clifford_rep(int p, int q);

/// The (p+1,q+1) representation together with the isotropic splitting data
/// f+/f- and the identification of W+ = ker(f+ .) with Delta_{p,q}.
/// For odd base dimension the inner representation uses the second odd
/// component so that `embed` intertwines the base gamma action exactly.
class TractorCliffordRep {
 public:
  TractorCliffordRep(int p, int q);

  const CliffordRep& base() const { return *base_; }
  const CliffordRep& inner() const { return inner_; }
  int base_dim() const { return base_->rep_dim(); }
  int inner_dim() const { return inner_.rep_dim(); }

  const MatC& f_plus() const { return f_plus_; }
  const MatC& f_minus() const { return f_minus_; }
  /// inner-rep gamma of the base direction j (paper's e_{j+1})
  const MatC& mid_gamma(int j) const { return inner_.gamma(j + 1); }

  /// embed matrix E: Delta_{p,q} -> Delta_{p+1,q+1} with image W+;
  /// satisfies mid_gamma(j) E = E base.gamma(j)
  const MatC& embed() const { return embed_; }

  /// v = E w1 + f_minus E w2  ->  (w1, w2)
  std::pair<VecC, VecC> split(const VecC& v) const;
  VecC assemble(const VecC& w1, const VecC& w2) const;

  bool flipped_inner() const { return flipped_; }

 private:
  const CliffordRep* base_;
  CliffordRep inner_;
  MatC f_plus_, f_minus_, embed_, embed_pinv_, w1_proj_, w2_proj_;
  bool flipped_ = false;
  void build_split_data();
  bool solve_intertwiner(MatC& out) const;
};

const TractorCliffordRep& tractor_rep(int p, int q);

}  // namespace cdl
