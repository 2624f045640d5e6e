// SPDX-License-Identifier: Apache-2.0
#include "clifford.hpp"

#include <map>
#include <mutex>

namespace cdl {

namespace {

MatC kron(const MatC& a, const MatC& b) {
  MatC r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

MatC mat_g1() {
  MatC m(2, 2);
  m << cplx(0, 1), 0, 0, cplx(0, -1);
  return m;
}
MatC mat_g2() {
  MatC m(2, 2);
  m << 0, cplx(0, 1), cplx(0, 1), 0;
  return m;
}
MatC mat_T() {
  MatC m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

}  // namespace

CliffordRep::CliffordRep(int p, int q) : p_(p), q_(q) {
  if (p < 0 || q < 0 || p + q < 1)
    throw Error(errc::invalid_argument, "CliffordRep: need p,q >= 0, p+q >= 1");
  const int n = p + q;
  const int m = n / 2;
  const MatC G1 = mat_g1(), G2 = mat_g2(), T = mat_T(),
             E = MatC::Identity(2, 2);
  auto tau = [p](int j) { return j <= p ? cplx(0, 1) : cplx(1, 0); };
  for (int j = 1; j <= 2 * m; ++j) {
    const int trailing = (j - 1) / 2;
    MatC acc = MatC::Identity(1, 1);
    for (int s = 0; s < m - 1 - trailing; ++s) acc = kron(acc, E);
    acc = kron(acc, j % 2 == 1 ? G1 : G2);
    for (int s = 0; s < trailing; ++s) acc = kron(acc, T);
    gamma_.push_back(tau(j) * acc);
  }
  if (n % 2 == 1) {
    MatC acc = MatC::Identity(1, 1);
    for (int s = 0; s < m; ++s) acc = kron(acc, T);
    acc = cplx(0, 1) * acc;
    // the printed recipe assumes e_n spacelike; all-timelike odd case needs
    // the same tau factor as the other generators
    if (2 * m + 1 <= p) acc = tau(2 * m + 1) * acc;
    gamma_.push_back(acc);
  }
  rebuild_b();
}

void CliffordRep::rebuild_b() {
  const int dim = rep_dim();
  b_ = MatC::Identity(dim, dim) *
       std::pow(cplx(0, 1), static_cast<double>((p_ * (p_ - 1)) / 2));
  for (int j = 0; j < p_; ++j) b_ = b_ * gamma_[j];
}

void CliffordRep::flip_last_generator() {
  if (n() % 2 == 0)
    throw Error(errc::invalid_argument, "flip_last_generator: n must be odd");
  gamma_.back() = -gamma_.back();
  rebuild_b();
}

cplx CliffordRep::product(const VecC& v, const VecC& w) const {
  // (b v, w) with (x,y) = sum x_i conj(y_i); Eigen's dot conjugates its
  // object argument, so pair as w.dot(b v)
  return w.dot(b_ * v);
}

MatC CliffordRep::volume_element() const {
  MatC acc = MatC::Identity(rep_dim(), rep_dim());
  for (const auto& g : gamma_) acc = acc * g;
  return acc;
}

VecC CliffordRep::form_action(int k,
                              const std::function<cplx(std::span<const int>)>& w,
                              const VecC& v) const {
  const int nn = n();
  VecC out = VecC::Zero(rep_dim());
  std::vector<int> idx(k);
  // iterate over increasing index tuples i1 < ... < ik
  std::function<void(int, int, double, const MatC&)> rec =
      [&](int depth, int start, double sign, const MatC& acc) {
        if (depth == k) {
          out += sign * w(idx) * (acc * v);
          return;
        }
        for (int i = start; i < nn; ++i) {
          idx[depth] = i;
          rec(depth + 1, i + 1, sign * eps(i), acc * gamma_[i]);
        }
      };
  MatC id = MatC::Identity(rep_dim(), rep_dim());
  rec(0, 0, 1.0, id);
  return out;
}

namespace {
std::mutex g_rep_mutex;
std::mutex g_tractor_mutex;
}

const CliffordRep& clifford_rep(int p, int q) {
  static std::map<std::pair<int, int>, std::unique_ptr<CliffordRep>> cache;
  std::lock_guard<std::mutex> lk(g_rep_mutex);
  auto& slot = cache[{p, q}];
  if (!slot) slot.reset(new CliffordRep(p, q));
  return *slot;
}

TractorCliffordRep::TractorCliffordRep(int p, int q)
    : base_(&clifford_rep(p, q)), inner_(p + 1, q + 1) {
  build_split_data();
  MatC S;
  if (!solve_intertwiner(S)) {
    // odd base dimension: the restriction to W+ carries the other odd
    // component; switch the inner rep to it and rebuild
    inner_.flip_last_generator();
    flipped_ = true;
    build_split_data();
    if (!solve_intertwiner(S))
      throw Error(errc::invalid_argument,
                  "tractor rep: no intertwiner for either odd component");
  }
  embed_ = embed_ * S;  // now mid_gamma(j) embed = embed base.gamma(j)
  embed_pinv_ =
      (embed_.adjoint() * embed_).inverse() * embed_.adjoint();
}

void TractorCliffordRep::build_split_data() {
  const int n = base_->n();
  const MatC& e0 = inner_.gamma(0);
  const MatC& en1 = inner_.gamma(n + 1);
  const double s2 = std::sqrt(2.0);
  f_plus_ = (en1 - e0) / s2;
  f_minus_ = (en1 + e0) / s2;
  // kernel basis of f_plus via column-pivoted LU (deterministic)
  Eigen::FullPivLU<MatC> lu(f_plus_);
  lu.setThreshold(1e-9);
  MatC ker = lu.kernel();
  if (ker.cols() != inner_.rep_dim() / 2)
    throw Error(errc::invalid_argument, "f_plus kernel has wrong dimension");
  // orthonormalize for stable pseudoinverse
  Eigen::HouseholderQR<MatC> qr(ker);
  embed_ = qr.householderQ() * MatC::Identity(inner_.rep_dim(), ker.cols());
  // projections recovering w1 and f_- w2: w1 = -1/2 f+ f- v, w2 = -1/2 f+ v
  w1_proj_ = -0.5 * f_plus_ * f_minus_;
  w2_proj_ = -0.5 * f_plus_;
}

bool TractorCliffordRep::solve_intertwiner(MatC& out) const {
  const int n = base_->n();
  const int dd = base_->rep_dim();
  MatC pinv = (embed_.adjoint() * embed_).inverse() * embed_.adjoint();
  // stack column-major vec equations (I (x) R_j - B_j^T (x) I) vec(S) = 0
  MatC M(n * dd * dd, dd * dd);
  for (int j = 0; j < n; ++j) {
    MatC R = pinv * mid_gamma(j) * embed_;
    const MatC& B = base_->gamma(j);
    MatC eye = MatC::Identity(dd, dd);
    MatC blk = kron(eye, R) - kron(B.transpose(), eye);
    M.block(j * dd * dd, 0, dd * dd, dd * dd) = blk;
  }
  Eigen::JacobiSVD<MatC> svd(M, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) > 1e-8 * sv(0)) return false;
  VecC vecS = svd.matrixV().col(dd * dd - 1);
  MatC S(dd, dd);
  for (int c = 0; c < dd; ++c)
    for (int r = 0; r < dd; ++r) S(r, c) = vecS(c * dd + r);
  // deterministic normalization: unit Frobenius scale, first big entry real
  S *= std::sqrt(static_cast<double>(dd)) / S.norm();
  for (int i = 0; i < dd * dd; ++i) {
    cplx v = S(i / dd, i % dd);
    if (std::abs(v) > 0.5 / dd) {
      S *= std::abs(v) / v;
      break;
    }
  }
  out = S;
  return true;
}

std::pair<VecC, VecC> TractorCliffordRep::split(const VecC& v) const {
  VecC w1 = embed_pinv_ * (w1_proj_ * v);
  VecC w2 = embed_pinv_ * (w2_proj_ * v);
  return {w1, w2};
}

VecC TractorCliffordRep::assemble(const VecC& w1, const VecC& w2) const {
  return embed_ * w1 + f_minus_ * (embed_ * w2);
}

const TractorCliffordRep& tractor_rep(int p, int q) {
  static std::map<std::pair<int, int>, std::unique_ptr<TractorCliffordRep>>
      cache;
  std::lock_guard<std::mutex> lk(g_tractor_mutex);
  auto& slot = cache[{p, q}];
  if (!slot) slot.reset(new TractorCliffordRep(p, q));
  return *slot;
}

}  // namespace cdl
