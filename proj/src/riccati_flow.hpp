#pragma once

#include <functional>
#include <vector>

#include "enstrack/model.hpp"
#include "enstrack/types.hpp"

namespace enstrack::detail {

struct FlowNode {
  std::size_t k;         // reversed-time node index
  const RowMatrix& pi;   // Pi(tau_k), symmetrized
  const RowMatrix& pi_b; // Pi(tau_k) * stacked B
  const Vector* h;       // H(tau_k) = h(T - tau_k), or nullptr
};

using NodeSink = std::function<void(const FlowNode&)>;

// Integrating-factor RK4 for the Riccati flow, optionally co-integrating
//   dH/dtau = (A^T - Pi B B^T) H + Pi f(T - tau),  H(0) = 0.
// forcing_half holds f on the half-step lattice in forward time (2K+1 entries).
void run_riccati_flow(const EnsembleSystem& ens, const TimeGrid& grid,
                      const std::vector<Vector>* forcing_half, const NodeSink& sink);

}  // namespace enstrack::detail
