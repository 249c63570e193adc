#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "enstrack/parallel.hpp"
#include "enstrack/pde1d.hpp"

using namespace enstrack;
using namespace enstrack::pde;

namespace {

constexpr double kPi = std::numbers::pi;

Vector samples(const Mesh1D& mesh, double (*f)(double)) {
  Vector v(static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t j = 0; j < mesh.size(); ++j) v(static_cast<Eigen::Index>(j)) = f(mesh.node(j));
  return v;
}

double wnorm(const Mesh1D& mesh, const Vector& v) {
  return std::sqrt(v.cwiseProduct(mesh.weights()).dot(v));
}

}  // namespace

TEST(Mesh, TrapezoidWeights) {
  const Mesh1D mesh(101);
  EXPECT_NEAR(mesh.weights().sum(), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(mesh.weights()(0), 0.005);
  EXPECT_EQ(mesh.node(100), 1.0);
  const Vector v = Vector::LinSpaced(101, -1, 2);
  EXPECT_NEAR((mesh.to_nodal(mesh.to_orthonormal(v)) - v).norm(), 0.0, 1e-13);
  EXPECT_THROW(Mesh1D(2), RangeError);
}

TEST(Diffusion, ZeroEllIsMean) {
  const Mesh1D mesh(101);
  const auto s = sample_diffusion(DiffusionSpec{}, mesh, 2024, 0, 0.0);
  for (Eigen::Index j = 0; j < s.field.size(); ++j) EXPECT_EQ(s.field(j), 0.1);
}

TEST(Diffusion, PositiveAndReproducible) {
  const Mesh1D mesh(101);
  for (std::uint64_t d = 0; d < 20; ++d) {
    const auto s = sample_diffusion(DiffusionSpec{}, mesh, 7, d, 2.0);
    EXPECT_GT(s.field.minCoeff(), 0.0);
  }
  // draws are pure functions of (seed, draw): compare a threaded generation
  std::vector<Vector> serial, threaded(16);
  for (std::uint64_t d = 0; d < 16; ++d) serial.push_back(standard_normals(99, d, 100));
  parallel_for(16, 4, [&](std::size_t d) { threaded[d] = standard_normals(99, d, 100); });
  for (std::size_t d = 0; d < 16; ++d) EXPECT_EQ(serial[d], threaded[d]);
}

TEST(Diffusion, BasisLayout) {
  const Mesh1D mesh(11);
  const Matrix psi = diffusion_basis(mesh, DiffusionSpec{0.1, 1.5, 4});
  // psi_1 = cos(pi s), psi_2 = 2^-1.5 sin(pi s), psi_3 = 3^-1.5 cos(2 pi s)
  for (std::size_t j = 0; j < 11; ++j) {
    const double s = mesh.node(j);
    const auto i = static_cast<Eigen::Index>(j);
    EXPECT_NEAR(psi(i, 0), std::cos(kPi * s), 1e-15);
    EXPECT_NEAR(psi(i, 1), std::pow(2.0, -1.5) * std::sin(kPi * s), 1e-15);
    EXPECT_NEAR(psi(i, 2), std::pow(3.0, -1.5) * std::cos(2 * kPi * s), 1e-15);
    EXPECT_NEAR(psi(i, 3), std::pow(4.0, -1.5) * std::sin(2 * kPi * s), 1e-15);
  }
}

TEST(Assembly, ConstantsAndSymmetry) {
  const Mesh1D mesh(101);
  const Vector a = Vector::Constant(101, 0.1);
  const Matrix r = assemble_cdr(a, 0.0, -1.0, mesh);
  EXPECT_LE((r * Vector::Ones(101) - Vector::Ones(101)).norm(), 1e-9);

  const Matrix l = assemble_cdr(a, 0.0, 0.0, mesh);
  EXPECT_LE((l * Vector::Ones(101)).norm(), 1e-9);
  const Matrix wl = mesh.weights().asDiagonal() * l;
  EXPECT_LE((wl - wl.transpose()).norm(), 1e-10 * wl.norm());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (wl + wl.transpose()));
  EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-9);

  // variable diffusion keeps both properties
  const auto s = sample_diffusion(DiffusionSpec{}, mesh, 1, 3, 1.0);
  const Matrix lv = assemble_cdr(s.field, 0.0, 0.0, mesh);
  const Matrix wv = mesh.weights().asDiagonal() * lv;
  EXPECT_LE((lv * Vector::Ones(101)).norm(), 1e-9);
  EXPECT_LE((wv - wv.transpose()).norm(), 1e-10 * wv.norm());
}

TEST(Assembly, NeumannSpectrum) {
  const Mesh1D mesh(101);
  const Matrix l = assemble_cdr(Vector::Constant(101, 0.1), 0.0, 0.0, mesh);
  Eigen::EigenSolver<Matrix> es(l);
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i).real());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  EXPECT_NEAR(ev[0], 0.0, 1e-9);
  for (int k = 1; k <= 5; ++k) {
    const double want = -0.1 * (k * kPi) * (k * kPi);
    EXPECT_LE(std::abs(ev[static_cast<std::size_t>(k)] - want), 0.01 * std::abs(want)) << "k = " << k;
  }
}

TEST(Assembly, RejectsNonPositiveDiffusion) {
  const Mesh1D mesh(11);
  Vector a = Vector::Constant(11, 0.1);
  a(4) = 0.0;
  EXPECT_THROW(assemble_cdr(a, 0.0, 0.0, mesh), RangeError);
}

TEST(Actuators, Counting) {
  const Mesh1D mesh(101);
  const Matrix full = build_actuators(mesh, {{0.0, 1.0}});
  EXPECT_EQ(full, Matrix::Ones(101, 1));
  const Matrix b = build_actuators(mesh, CdrSetup{}.actuators);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(b.col(i).sum(), 21.0);
  EXPECT_EQ(b.col(0).dot(b.col(1)), 0.0);
  EXPECT_EQ(b.col(1).dot(b.col(2)), 0.0);
  EXPECT_THROW(build_actuators(mesh, {{0.5, 0.4}}), RangeError);
  EXPECT_THROW(build_actuators(Mesh1D(3), {{0.1, 0.2}}), RangeError);
}

TEST(Projection, RangeOrthogonalityIdempotence) {
  const Mesh1D mesh(101);
  const Matrix p = build_projection(mesh, default_output_modes());
  EXPECT_LE((p * Vector::Ones(101) - Vector::Ones(101)).norm(), 1e-12);
  const Vector c3 = samples(mesh, [](double s) { return std::cos(3 * kPi * s); });
  EXPECT_LE(wnorm(mesh, p * c3), 1e-3);
  EXPECT_LE((p * p - p).norm(), 1e-10);
  // self-adjoint in the weighted inner product
  const Matrix wp = mesh.weights().asDiagonal() * p;
  EXPECT_LE((wp - wp.transpose()).norm(), 1e-10);
  EXPECT_THROW(build_projection(mesh, {[](double) { return 1.0; }, [](double) { return 2.0; }}),
               Error);
}

TEST(HeatTarget, ConservationAndDecay) {
  const Mesh1D mesh(101);
  const TimeGrid grid(5.0, 500);
  const Vector y0 = samples(mesh, [](double s) { return std::sin(2 * kPi * s) - 1.0; });
  const auto g = heat_target(mesh, 0.1, y0, grid);
  EXPECT_EQ(g.value(0), y0);
  const double m0 = mesh.weights().dot(g.value(0));
  EXPECT_NEAR(m0, -1.0, 1e-12);
  double prev = 1e300;
  for (std::size_t k = 0; k <= 500; k += 10) {
    EXPECT_NEAR(mesh.weights().dot(g.value(k)), m0, 1e-8);
    const double dev = wnorm(mesh, g.value(k) + Vector::Ones(101));
    EXPECT_LT(dev, prev);
    prev = dev;
  }
  // slowest surviving Neumann mode is cos(pi x), coefficient 4 sqrt(2) / (3 pi)
  const double slow = 4.0 * std::sqrt(2.0) / (3.0 * kPi) * std::exp(-0.1 * kPi * kPi * 5.0);
  EXPECT_NEAR(prev, slow, 0.02 * slow);
}

TEST(CdrFamily, OrthonormalSimilarity) {
  const Mesh1D mesh(101);
  const CdrSetup setup;
  const auto fam = cdr_family(setup, mesh);
  EXPECT_EQ(fam.state_dim(), 101u);
  EXPECT_EQ(fam.input_dim(), 3u);
  EXPECT_EQ(fam.parameter_dim(), 100u);
  // zero convection: generator symmetric in orthonormal coordinates
  const Vector sigma = standard_normals(5, 1, 100);
  const Matrix a = fam.a(sigma);
  EXPECT_LE((a - a.transpose()).norm(), 1e-9 * a.norm());
  // Q is sqrt(10) times an orthogonal projector in these coordinates
  const Matrix q = fam.q() / std::sqrt(10.0);
  EXPECT_LE((q - q.transpose()).norm(), 1e-10);
  EXPECT_LE((q * q - q).norm(), 1e-10);
  EXPECT_THROW(fam.a(Vector::Zero(3)), DimensionError);
}
