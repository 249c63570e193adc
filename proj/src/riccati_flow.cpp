#include "riccati_flow.hpp"

#include "enstrack/simd/kernels.hpp"
#include "flow.hpp"

namespace enstrack::detail {
namespace {

void symmetrize(RowMatrix& p) {
  const auto d = p.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double v = 0.5 * (p(i, j) + p(j, i));
      p(i, j) = v;
      p(j, i) = v;
    }
  }
}

}  // namespace

void run_riccati_flow(const EnsembleSystem& ens, const TimeGrid& grid,
                      const std::vector<Vector>* forcing_half, const NodeSink& sink) {
  const auto& kern = simd::kernels();
  const std::size_t count = ens.members();
  const std::size_t n = ens.state_dim();
  const std::size_t dim = ens.extended_dim();
  const std::size_t len = dim * dim;
  const std::size_t steps = grid.steps();
  const double h = grid.dt();
  const double w = ens.output_weight();
  const auto ni = static_cast<Eigen::Index>(n);
  const auto di = static_cast<Eigen::Index>(dim);

  if (forcing_half && forcing_half->size() != 2 * steps + 1) {
    throw DimensionError("riccati: forcing has " + std::to_string(forcing_half->size()) +
                         " samples, expected " + std::to_string(2 * steps + 1));
  }

  const Matrix source = w * ens.q().transpose() * ens.q();
  const EnsembleFlow flow = make_ensemble_flow(ens.blocks(), h, &source);
  const Matrix b_stack = ens.stacked_b();
  const Matrix terminal = w * ens.p().transpose() * ens.p();

  RowMatrix pi = RowMatrix::Zero(di, di);
  for (std::size_t i = 0; i < count; ++i) {
    pi.block(static_cast<Eigen::Index>(i) * ni, static_cast<Eigen::Index>(i) * ni, ni, ni) =
        terminal;
  }

  RowMatrix a = RowMatrix::Zero(di, di), b = a, u = a, tmp = a, y = a, yt = a;
  RowMatrix k1 = a, k2 = a, k3 = a, k4 = a;
  RowMatrix pb1, pb2, pb3, pb4;

  // out = E^T x E for symmetric x, block pairs i <= j only; the lower blocks are
  // mirrored so out is exactly symmetric.
  auto congruence = [&](const RowMatrix& x, RowMatrix& out) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto off = static_cast<Eigen::Index>(i) * ni;
      const auto rest = di - off;
      const std::size_t at = static_cast<std::size_t>(off) * dim + static_cast<std::size_t>(off);
      kern.block_diag_product(x.data() + at, dim, n, flow.half_ptrs.data() + i, count - i, n,
                              y.data() + at, dim);
      yt.block(off, off, rest, ni).noalias() = y.block(off, off, ni, rest).transpose();
      kern.block_diag_product(yt.data() + at, dim, static_cast<std::size_t>(rest),
                              flow.half_ptrs.data() + i, 1, n, out.data() + at, dim);
    }
    for (Eigen::Index r = 0; r < di; ++r) {
      for (Eigen::Index c = r + 1; c < di; ++c) out(r, c) = out(c, r);
    }
  };
  auto add_source = [&](RowMatrix& x, bool full) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto& s = full ? flow.blocks[i].source_full : flow.blocks[i].source_half;
      x.block(static_cast<Eigen::Index>(i) * ni, static_cast<Eigen::Index>(i) * ni, ni, ni) += s;
    }
  };
  auto nonlinear = [&](const RowMatrix& p, RowMatrix& pb, RowMatrix& out) {
    pb.noalias() = p * b_stack;
    kern.sym_rank_update(pb.data(), dim, static_cast<std::size_t>(pb.cols()), -1.0, 0.0,
                         out.data());
  };

  const bool offset = forcing_half != nullptr;
  Vector hv = Vector::Zero(di);
  Vector ah, bh, hs, tmpv, kh1, kh2, kh3, kh4;
  auto offset_rhs = [&](const RowMatrix& p, const RowMatrix& pb, const Vector& state,
                        const Vector& f, Vector& out) {
    const Vector bth = b_stack.transpose() * state;
    out.noalias() = p * f;
    out.noalias() -= pb * bth;
  };
  auto flow_t = [&](const Vector& x, bool full, Vector& out) {
    apply_blocks(flow.blocks, full, true, x, out);
  };

  for (std::size_t k = 0;; ++k) {
    nonlinear(pi, pb1, k1);
    if (!pi.allFinite() || !pb1.allFinite() || (offset && !hv.allFinite())) {
      throw DivergenceError("riccati flow produced non-finite values", k);
    }
    sink(FlowNode{k, pi, pb1, offset ? &hv : nullptr});
    if (k == steps) break;

    const std::size_t j = 2 * (steps - k);  // forward-time half-lattice index of tau_k

    congruence(pi, a);
    kern.xpay(pi.data(), 0.5 * h, k1.data(), tmp.data(), len);
    congruence(tmp, b);

    if (offset) {
      offset_rhs(pi, pb1, hv, (*forcing_half)[j], kh1);
      flow_t(hv, false, ah);
      tmpv = hv + 0.5 * h * kh1;
      flow_t(tmpv, false, bh);
    }

    u = b;
    add_source(u, false);
    nonlinear(u, pb2, k2);
    if (offset) offset_rhs(u, pb2, bh, (*forcing_half)[j - 1], kh2);

    kern.xpay(a.data(), 0.5 * h, k2.data(), u.data(), len);
    add_source(u, false);
    nonlinear(u, pb3, k3);
    if (offset) {
      hs = ah + 0.5 * h * kh2;
      offset_rhs(u, pb3, hs, (*forcing_half)[j - 1], kh3);
    }

    kern.xpay(a.data(), h, k3.data(), tmp.data(), len);
    congruence(tmp, u);
    add_source(u, true);
    nonlinear(u, pb4, k4);
    if (offset) {
      tmpv = ah + h * kh3;
      flow_t(tmpv, false, hs);
      offset_rhs(u, pb4, hs, (*forcing_half)[j - 2], kh4);
    }

    // tmp = a + (b - a)/3 + h/3 (k2 + k3)
    {
      double* t = tmp.data();
      const double* pa = a.data();
      const double* pbm = b.data();
      const double* p2 = k2.data();
      const double* p3 = k3.data();
      const double third = 1.0 / 3.0;
      const double ht = h / 3.0;
      for (std::size_t i = 0; i < len; ++i) {
        t[i] = pa[i] + third * (pbm[i] - pa[i]) + ht * (p2[i] + p3[i]);
      }
    }
    congruence(tmp, pi);
    add_source(pi, true);
    kern.axpy(h / 6.0, k4.data(), pi.data(), len);
    symmetrize(pi);

    if (offset) {
      tmpv = ah + (bh - ah) / 3.0 + (h / 3.0) * (kh2 + kh3);
      flow_t(tmpv, false, hv);
      hv += (h / 6.0) * kh4;
    }
  }
}

}  // namespace enstrack::detail
