#include "flow.hpp"

#include <cmath>

namespace enstrack::detail {
namespace {

constexpr int kTaylorDegree = 10;
constexpr double kTaylorRadius = 1.0 / 64.0;

}  // namespace

BlockFlow make_block_flow(const Matrix& a, double h, const Matrix* source) {
  const auto n = a.rows();
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  double s = 0.5 * h;
  while (norm * s > kTaylorRadius) {
    s *= 0.5;
    ++squarings;
  }

  // Taylor start at s: E = sum (As)^k/k!, Phi = sum D_k s^{k+1}/(k+1)!,
  // D_0 = C, D_{k+1} = A^T D_k + D_k A.
  Matrix e = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= kTaylorDegree; ++k) {
    term = term * a * (s / k);
    e += term;
  }
  Matrix phi;
  if (source) {
    Matrix d = *source;
    double coef = s;
    phi = d * coef;
    for (int k = 1; k <= kTaylorDegree; ++k) {
      d = (a.transpose() * d + d * a).eval();
      coef *= s / (k + 1);
      phi += d * coef;
    }
  }

  auto double_up = [&] {
    if (source) {
      phi += e.transpose() * phi * e;
      phi = 0.5 * (phi + phi.transpose()).eval();
    }
    e = (e * e).eval();
  };
  for (int i = 0; i < squarings; ++i) double_up();

  BlockFlow out;
  out.half = e;
  if (source) out.source_half = phi;
  double_up();
  out.full = e;
  if (source) out.source_full = phi;
  return out;
}

EnsembleFlow make_ensemble_flow(const std::vector<Matrix>& blocks, double h,
                                const Matrix* source) {
  EnsembleFlow flow;
  flow.blocks.reserve(blocks.size());
  for (const auto& a : blocks) flow.blocks.push_back(make_block_flow(a, h, source));
  for (const auto& b : flow.blocks) {
    flow.half_ptrs.push_back(b.half.data());
    flow.full_ptrs.push_back(b.full.data());
  }
  return flow;
}

void apply_blocks(const std::vector<BlockFlow>& flows, bool full, bool transpose, const Vector& x,
                  Vector& out) {
  const auto n = flows.front().half.rows();
  out.resize(x.size());
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const auto& e = full ? flows[i].full : flows[i].half;
    const auto off = static_cast<Eigen::Index>(i) * n;
    if (transpose) {
      out.segment(off, n).noalias() = e.transpose() * x.segment(off, n);
    } else {
      out.segment(off, n).noalias() = e * x.segment(off, n);
    }
  }
}

}  // namespace enstrack::detail
