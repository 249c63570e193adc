#include "enstrack/pde1d.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "enstrack/random.hpp"

namespace enstrack::pde {

Mesh1D::Mesh1D(std::size_t nodes) {
  if (nodes < 3) throw RangeError("mesh: need at least 3 nodes");
  const auto n = static_cast<Eigen::Index>(nodes);
  spacing_ = 1.0 / static_cast<double>(nodes - 1);
  nodes_.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    nodes_(j) = static_cast<double>(j) / static_cast<double>(nodes - 1);
  }
  weights_ = Vector::Constant(n, spacing_);
  weights_(0) = weights_(n - 1) = 0.5 * spacing_;
  sqrt_weights_ = weights_.cwiseSqrt();
}

Vector Mesh1D::to_orthonormal(const Vector& nodal) const {
  if (nodal.size() != nodes_.size()) throw DimensionError("mesh: nodal vector length mismatch");
  return nodal.cwiseProduct(sqrt_weights_);
}

Vector Mesh1D::to_nodal(const Vector& coords) const {
  if (coords.size() != nodes_.size()) throw DimensionError("mesh: coordinate length mismatch");
  return coords.cwiseQuotient(sqrt_weights_);
}

Matrix diffusion_basis(const Mesh1D& mesh, const DiffusionSpec& spec) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Matrix psi(n, static_cast<Eigen::Index>(spec.terms));
  for (std::size_t j = 1; j <= spec.terms; ++j) {
    const double freq = static_cast<double>((j + 1) / 2) * std::numbers::pi;
    const double amp = std::pow(static_cast<double>(j), -spec.decay);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = mesh.nodes()(i);
      psi(i, static_cast<Eigen::Index>(j - 1)) =
          amp * (j % 2 == 0 ? std::sin(freq * s) : std::cos(freq * s));
    }
  }
  return psi;
}

Vector standard_normals(std::uint64_t seed, std::uint64_t draw, std::size_t count) {
  const Philox4x32 rng(seed);
  Vector out(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) out(static_cast<Eigen::Index>(i)) = rng.normal(draw, i);
  return out;
}

Vector diffusion_field(const Matrix& basis, const DiffusionSpec& spec, const Vector& sigma) {
  if (sigma.size() != basis.cols()) {
    throw DimensionError("diffusion: expected " + std::to_string(basis.cols()) +
                         " coefficients, got " + std::to_string(sigma.size()));
  }
  return spec.mean * (basis * sigma).array().exp().matrix();
}

DiffusionSample sample_diffusion(const DiffusionSpec& spec, const Mesh1D& mesh,
                                 std::uint64_t seed, std::uint64_t draw, double ell) {
  if (!(ell >= 0.0)) throw RangeError("diffusion: ell must be >= 0");
  DiffusionSample out;
  out.spec = spec;
  out.ell = ell;
  out.sigma = standard_normals(seed, draw, spec.terms);
  out.field = diffusion_field(diffusion_basis(mesh, spec), spec, ell * out.sigma);
  return out;
}

Matrix assemble_cdr(const Vector& a, double b, double c, const Mesh1D& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  if (a.size() != n) throw DimensionError("assembly: diffusion has the wrong length");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(a(j) > 0.0) || !std::isfinite(a(j))) {
      throw RangeError("assembly: diffusion must be positive, got " + std::to_string(a(j)) +
                       " at node " + std::to_string(j));
    }
  }
  const double h = mesh.spacing();
  const double h2 = h * h;
  Matrix m = Matrix::Zero(n, n);
  // Faces j+1/2; the Neumann ghost mirrors the first interior face.
  for (Eigen::Index j = 0; j < n; ++j) {
    const double right = j + 1 < n ? 0.5 * (a(j) + a(j + 1)) : 0.5 * (a(j) + a(j - 1));
    const double left = j > 0 ? 0.5 * (a(j) + a(j - 1)) : 0.5 * (a(j) + a(j + 1));
    const Eigen::Index jr = j + 1 < n ? j + 1 : j - 1;
    const Eigen::Index jl = j > 0 ? j - 1 : j + 1;
    m(j, jr) += right / h2;
    m(j, jl) += left / h2;
    m(j, j) -= (left + right) / h2;
    m(j, j) -= c;
    // Central difference of (b y)_s; the mirrored ghost makes it vanish at
    // the boundary nodes.
    if (j > 0 && j + 1 < n) {
      m(j, j + 1) -= b / (2.0 * h);
      m(j, j - 1) += b / (2.0 * h);
    }
  }
  return m;
}

Matrix build_actuators(const Mesh1D& mesh, const std::vector<std::array<double, 2>>& intervals) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Matrix b = Matrix::Zero(n, static_cast<Eigen::Index>(intervals.size()));
  constexpr double eps = 1e-12;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto [lo, hi] = intervals[i];
    if (!(lo < hi) || lo < 0.0 || hi > 1.0) {
      throw RangeError("actuator " + std::to_string(i) + ": interval [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "] is empty or outside [0,1]");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double s = mesh.nodes()(j);
      if (s >= lo - eps && s <= hi + eps) b(j, static_cast<Eigen::Index>(i)) = 1.0;
    }
    if (b.col(static_cast<Eigen::Index>(i)).sum() == 0.0) {
      throw RangeError("actuator " + std::to_string(i) + " covers no mesh node");
    }
  }
  return b;
}

Matrix build_projection(const Mesh1D& mesh, const std::vector<Mode>& modes) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Matrix f(n, static_cast<Eigen::Index>(modes.size()));
  for (std::size_t k = 0; k < modes.size(); ++k) {
    for (Eigen::Index j = 0; j < n; ++j) f(j, static_cast<Eigen::Index>(k)) = modes[k](mesh.node(j));
  }
  const Matrix wf = mesh.weights().asDiagonal() * f;
  const Matrix gram = f.transpose() * wf;
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-14 * ldlt.vectorD().maxCoeff()) {
    throw Error("projection: Gram matrix of the modes is singular");
  }
  return f * ldlt.solve(wf.transpose());
}

Matrix build_projection_q(const Mesh1D& mesh, const std::vector<Mode>& modes, double weight) {
  return weight * build_projection(mesh, modes);
}

TargetSignal heat_target(const Mesh1D& mesh, double kappa, const Vector& y0,
                         const TimeGrid& grid) {
  if (!(kappa > 0.0)) throw RangeError("heat target: diffusivity must be positive");
  const Matrix lap =
      assemble_cdr(Vector::Constant(static_cast<Eigen::Index>(mesh.size()), kappa), 0.0, 0.0,
                   mesh);
  return TargetSignal::from_dynamics(lap, y0, grid);
}

std::vector<Mode> default_output_modes() {
  return {[](double) { return 1.0; }, [](double s) { return std::cos(std::numbers::pi * s); },
          [](double s) { return std::cos(2.0 * std::numbers::pi * s); }};
}

ParameterFamily cdr_family(const CdrSetup& setup, const Mesh1D& mesh) {
  const Vector& sw = mesh.sqrt_weights();
  const Vector isw = sw.cwiseInverse();
  const Matrix basis = diffusion_basis(mesh, setup.diffusion);
  const DiffusionSpec spec = setup.diffusion;
  const double b = setup.convection;
  const double c = setup.reaction;
  auto dynamics = [basis, spec, b, c, mesh, sw, isw](const Vector& sigma) {
    const Matrix a = assemble_cdr(diffusion_field(basis, spec, sigma), b, c, mesh);
    return Matrix(sw.asDiagonal() * a * isw.asDiagonal());
  };
  const Matrix act = sw.asDiagonal() * build_actuators(mesh, setup.actuators);
  const Matrix proj = build_projection_q(mesh, default_output_modes(), setup.output_weight);
  const Matrix q = sw.asDiagonal() * proj * isw.asDiagonal();
  const auto n = static_cast<Eigen::Index>(mesh.size());
  return ParameterFamily("cdr", setup.diffusion.terms, dynamics, act, q,
                         Matrix::Identity(n, n));
}

}  // namespace enstrack::pde
