#include <gtest/gtest.h>

#include <random>

#include "enstrack/model.hpp"

using namespace enstrack;

namespace {

ParameterFamily osc() {
  Matrix q(1, 2);
  q << std::sqrt(10.0), 0.0;
  return oscillator_family(q, Matrix::Identity(2, 2));
}

}  // namespace

TEST(TimeGrid, NodesAndLocate) {
  TimeGrid g(5.0, 5000);
  EXPECT_EQ(g.node(5000), 5.0);
  EXPECT_DOUBLE_EQ(g.dt(), 1e-3);
  auto [k, f] = g.locate(5.0);
  EXPECT_EQ(k, 4999u);
  EXPECT_EQ(f, 1.0);
  auto [k2, f2] = g.locate(0.0025);
  EXPECT_EQ(k2, 2u);
  EXPECT_NEAR(f2, 0.5, 1e-9);
  EXPECT_THROW(TimeGrid(5.0, 1), RangeError);
  EXPECT_THROW(TimeGrid(-1.0, 10), RangeError);
}

TEST(Model, OscillatorExtendedSystem) {
  const auto fam = osc();
  const double s[] = {-2.0, 0.0, 2.0};
  const auto ens = build_ensemble(fam, ParameterEnsemble::scalars(s));
  EXPECT_EQ(ens.extended_dim(), 6u);
  const Matrix a = ens.dense_a();
  for (int i = 0; i < 3; ++i) {
    Matrix blk(2, 2);
    blk << 0, 1, -1, -s[i];
    EXPECT_EQ(a.block(2 * i, 2 * i, 2, 2), blk);
  }
  // off-diagonal blocks vanish
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) EXPECT_EQ(a.block(2 * i, 2 * j, 2, 2).norm(), 0.0);
    }
  }
  Matrix b(6, 1);
  b << 0, 1, 0, 1, 0, 1;
  EXPECT_EQ(ens.stacked_b(), b);
  EXPECT_DOUBLE_EQ(ens.output_weight(), 1.0 / 3.0);
}

TEST(Model, SingletonMatchesLti) {
  const auto fam = osc();
  const auto ens = build_ensemble(fam, ParameterEnsemble::scalars(std::vector<double>{0.7}));
  const auto sys = fam.system(scalar_parameter(0.7));
  EXPECT_EQ(ens.dense_a(), sys.a);
  EXPECT_EQ(ens.stacked_b(), sys.b);
  EXPECT_EQ(ens.output_weight(), 1.0);
}

TEST(Model, DuplicateEntriesGiveIdenticalBlocks) {
  const auto ens = build_ensemble(osc(), ParameterEnsemble::scalars(std::vector<double>{1.3, 1.3}));
  EXPECT_EQ(ens.block(0), ens.block(1));
}

TEST(Model, ExtendAndAdjoint) {
  Vector z(2);
  z << 1, 2;
  Vector e(6);
  e << 1, 2, 1, 2, 1, 2;
  EXPECT_EQ(extend(z, 3), e);
  Vector w(4);
  w << 1, 2, 3, 4;
  Vector s(2);
  s << 4, 6;
  EXPECT_EQ(adjoint_extend(w, 2), s);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Vector zz(3), ww(12);
    for (auto& v : zz) v = nd(rng);
    for (auto& v : ww) v = nd(rng);
    // direct evaluation of both inner products
    double lhs = 0, rhs = 0;
    for (int i = 0; i < 12; ++i) lhs += zz(i % 3) * ww(i);
    const Vector aw = adjoint_extend(ww, 3);
    for (int i = 0; i < 3; ++i) rhs += zz(i) * aw(i);
    EXPECT_NEAR(extend(zz, 4).dot(ww), lhs, 1e-12);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
  EXPECT_THROW(adjoint_extend(w, 3), DimensionError);
}

TEST(Model, DeltaA) {
  const auto fam = osc();
  const auto d = delta_a(fam, ParameterEnsemble::scalars(std::vector<double>{-1.0, 1.0}),
                         scalar_parameter(0.0));
  Matrix b0(2, 2), b1(2, 2);
  b0 << 0, 0, 0, 1;
  b1 << 0, 0, 0, -1;
  EXPECT_EQ(d.blocks[0], b0);
  EXPECT_EQ(d.blocks[1], b1);
  EXPECT_NEAR(d.norm, 1.0, 1e-12);

  const auto z = delta_a(fam, ParameterEnsemble::scalars(std::vector<double>{0.5, 0.5, 0.5}),
                         scalar_parameter(0.5));
  EXPECT_EQ(z.norm, 0.0);

  const auto six = delta_a(fam, ParameterEnsemble::symmetric_grid(2.0, 5), scalar_parameter(4.0));
  EXPECT_NEAR(six.norm, 6.0, 1e-12);
}

TEST(Model, SymmetricGrid) {
  const auto e = ParameterEnsemble::symmetric_grid(2.0, 5);
  const double want[] = {-2, -1, 0, 1, 2};
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(e[i](0), want[i]);
  EXPECT_EQ(ParameterEnsemble::symmetric_grid(3.0, 1)[0](0), 0.0);
  EXPECT_NEAR(e.mean()(0), 0.0, 1e-15);
  EXPECT_THROW(ParameterEnsemble::symmetric_grid(1.0, 0), DimensionError);
}

TEST(Model, Permuted) {
  const auto e = ParameterEnsemble::symmetric_grid(1.0, 3);
  const std::size_t p[] = {2, 0, 1};
  const auto q = e.permuted(p);
  EXPECT_EQ(q[0], e[2]);
  EXPECT_EQ(q[1], e[0]);
  const std::size_t bad[] = {0, 0, 1};
  EXPECT_THROW(e.permuted(bad), Error);
}

TEST(Model, Validation) {
  EXPECT_THROW(ParameterEnsemble(std::vector<Vector>{}), Error);
  LtiSystem s{Matrix::Zero(2, 2), Matrix::Zero(3, 1), Matrix::Zero(1, 2), Matrix::Zero(2, 2)};
  EXPECT_THROW(s.validate(), DimensionError);
  const auto fam = osc();
  EXPECT_THROW(fam.a(Vector::Zero(2)), DimensionError);
}
