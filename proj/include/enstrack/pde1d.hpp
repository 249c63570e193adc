#pragma once

// Convection-diffusion-reaction on (0,1) with homogeneous Neumann boundaries,
//
//   y' = (a y_s)_s - c y - (b y)_s + sum_i u_i 1_{O_i},
//
// discretized by conservative second-order finite differences on a uniform
// node mesh with trapezoid mass weights. Diffusion is lognormal:
//   a(s) = abar * exp(sum_j sigma_j psi_j(s)),
//   psi_{2j}(s) = (2j)^-nu sin(j pi s),  psi_{2j-1}(s) = (2j-1)^-nu cos(j pi s).

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "enstrack/feedback.hpp"
#include "enstrack/model.hpp"
#include "enstrack/types.hpp"

namespace enstrack::pde {

class Mesh1D {
 public:
  explicit Mesh1D(std::size_t nodes);

  std::size_t size() const noexcept { return static_cast<std::size_t>(nodes_.size()); }
  double spacing() const noexcept { return spacing_; }
  double node(std::size_t j) const { return nodes_(static_cast<Eigen::Index>(j)); }
  const Vector& nodes() const noexcept { return nodes_; }
  const Vector& weights() const noexcept { return weights_; }
  /// sqrt(w): maps nodal values to coordinates where the weighted inner
  /// product is Euclidean.
  const Vector& sqrt_weights() const noexcept { return sqrt_weights_; }

  Vector to_orthonormal(const Vector& nodal) const;
  Vector to_nodal(const Vector& coords) const;

 private:
  Vector nodes_;
  Vector weights_;
  Vector sqrt_weights_;
  double spacing_;
};

struct DiffusionSpec {
  double mean = 0.1;   // abar
  double decay = 1.5;  // nu
  std::size_t terms = 100;
};

struct DiffusionSample {
  Vector sigma;  // drawn standard normals, unscaled
  double ell = 1.0;
  Vector field;  // a at the mesh nodes
  DiffusionSpec spec;
};

/// n x terms matrix of psi_j at the nodes (column j-1 holds psi_j).
Matrix diffusion_basis(const Mesh1D& mesh, const DiffusionSpec& spec);

/// `count` standard normals of stream `draw` under `seed`.
Vector standard_normals(std::uint64_t seed, std::uint64_t draw, std::size_t count);

/// a = abar * exp(basis * sigma).
Vector diffusion_field(const Matrix& basis, const DiffusionSpec& spec, const Vector& sigma);

DiffusionSample sample_diffusion(const DiffusionSpec& spec, const Mesh1D& mesh,
                                 std::uint64_t seed, std::uint64_t draw, double ell);

/// Nodal generator for diffusion a (nodal values), constant convection b and
/// reaction c.
Matrix assemble_cdr(const Vector& a, double b, double c, const Mesh1D& mesh);

Matrix build_actuators(const Mesh1D& mesh, const std::vector<std::array<double, 2>>& intervals);

using Mode = std::function<double(double)>;

/// Weighted-orthogonal projection onto span(modes), nodal n x n form.
Matrix build_projection(const Mesh1D& mesh, const std::vector<Mode>& modes);
Matrix build_projection_q(const Mesh1D& mesh, const std::vector<Mode>& modes, double weight);

/// g' = kappa g_ss with Neumann boundaries, g(0) = y0 (nodal values).
TargetSignal heat_target(const Mesh1D& mesh, double kappa, const Vector& y0,
                         const TimeGrid& grid);

struct CdrSetup {
  std::size_t nodes = 101;
  DiffusionSpec diffusion;
  double convection = 0.0;
  double reaction = -1.0;
  std::vector<std::array<double, 2>> actuators{{0.1, 0.3}, {0.4, 0.6}, {0.7, 0.9}};
  double output_weight = 3.1622776601683795;  // sqrt(10)
};

std::vector<Mode> default_output_modes();

/// Parameter family in orthonormal coordinates; the parameter is the (already
/// ell-scaled) coefficient vector sigma of length spec.terms.
ParameterFamily cdr_family(const CdrSetup& setup, const Mesh1D& mesh);

}  // namespace enstrack::pde
