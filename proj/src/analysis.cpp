#include "enstrack/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "enstrack/parallel.hpp"
#include "enstrack/random.hpp"

namespace enstrack {

std::vector<Vector> make_probes(std::size_t n, std::size_t count, std::uint64_t seed,
                                const ControlledTrajectory* traj, const TargetSignal* g) {
  const Philox4x32 rng(seed);
  std::vector<Vector> probes;
  probes.reserve(count + (traj ? traj->states.size() : 0));
  for (std::size_t p = 0; p < count; ++p) {
    Vector z(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) z(static_cast<Eigen::Index>(i)) = rng.normal(p, i);
    probes.push_back(std::move(z));
  }
  if (traj) {
    if (!g) throw Error("probes: trajectory probes need the target");
    for (std::size_t k = 0; k < traj->states.size(); ++k) {
      probes.push_back(traj->states[k] - g->value(k));
    }
  }
  return probes;
}

double law_difference(const AffineFeedbackLaw& a, const AffineFeedbackLaw& b,
                      const std::vector<Vector>& probes) {
  if (!(a.schedule().grid == b.schedule().grid)) {
    throw DimensionError("law difference: laws live on different grids");
  }
  const std::size_t steps = a.schedule().grid.steps();
  double worst = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const Matrix dg = a.schedule().gains[steps - k] - b.schedule().gains[steps - k];
    const Vector doff = a.schedule().offsets[k] - b.schedule().offsets[k];
    for (const auto& z : probes) {
      const double d = (dg * z + doff).norm() / (1.0 + z.norm());
      worst = std::max(worst, d);
    }
  }
  return worst;
}

double permutation_invariance_gap(const ParameterFamily& family, const ParameterEnsemble& sigma,
                                  std::span<const std::size_t> permutation,
                                  const TargetSignal& g, const TimeGrid& grid,
                                  const std::vector<Vector>& probes) {
  const ParameterEnsemble permuted = sigma.permuted(permutation);
  auto base = solve_offset_and_gains(build_ensemble(family, sigma), grid, g, grid.steps());
  auto other = solve_offset_and_gains(build_ensemble(family, permuted), grid, g, grid.steps());
  return law_difference(make_feedback(base.schedule), make_feedback(other.schedule), probes);
}

double GapReport::scale() const noexcept { return 1.0 + std::abs(left) + std::abs(right); }

bool GapReport::nonnegative(double tol) const noexcept { return gap >= -tol * scale(); }

EnsemblePipeline build_pipeline(const ParameterFamily& family, const ParameterEnsemble& training,
                                const TargetSignal& g, const Vector& y0, const TimeGrid& grid,
                                std::size_t stride, bool with_extended) {
  EnsembleSystem ens = build_ensemble(family, training);
  Synthesis synth = solve_offset_and_gains(ens, grid, g, stride);
  AffineFeedbackLaw law = make_feedback(synth.schedule, "ensemble");
  EnsemblePipeline out{std::move(ens), std::move(synth), std::move(law), std::nullopt, {}};
  if (with_extended) {
    const Forcing forcing = residual_forcing(out.system, g);
    out.extended = simulate_extended(out.system, *out.synthesis.schedule, forcing, g,
                                     y0 - g.value(0), grid);
    out.extended_cost = evaluate_cost(*out.extended, g, family.q(), family.p());
  }
  return out;
}

namespace {

Suboptimality gaps_from(const EnsemblePipeline& pipeline, const ParameterFamily& family,
                        const ParameterEnsemble& training, const Vector& sigma,
                        const ControlledTrajectory& applied, const CostBreakdown& applied_cost,
                        const SingleOptimal& single) {
  if (!pipeline.extended) throw Error("gaps: pipeline was built without the extended run");
  const double delta = delta_a(family, training, sigma).norm;
  Suboptimality s;
  s.applied_cost = applied_cost;
  s.single_cost = single.cost;

  s.ensemble_vs_lifted.left = applied_cost.total();
  s.ensemble_vs_lifted.right = pipeline.extended_cost.total();
  s.ensemble_vs_lifted.gap = s.ensemble_vs_lifted.left - s.ensemble_vs_lifted.right;
  s.ensemble_vs_lifted.delta_norm = delta;
  s.ensemble_vs_lifted.sigma = sigma;

  s.single_vs_applied.left = applied_cost.total();
  s.single_vs_applied.right = single.cost.total();
  s.single_vs_applied.gap = s.single_vs_applied.left - s.single_vs_applied.right;
  s.single_vs_applied.delta_norm = delta;
  s.single_vs_applied.sigma = sigma;

  const auto& ext = *pipeline.extended;
  const std::size_t count = ext.members;
  for (std::size_t k = 0; k < ext.states.size(); ++k) {
    const Vector lifted = extend(applied.states[k], count);
    s.state_gap = std::max(s.state_gap, (ext.states[k] - lifted).norm());
    s.control_gap = std::max(s.control_gap, (ext.controls[k] - applied.controls[k]).norm());
  }
  return s;
}

}  // namespace

Suboptimality suboptimality_gaps(const EnsemblePipeline& pipeline, const ParameterFamily& family,
                                 const ParameterEnsemble& training, const Vector& sigma,
                                 const TargetSignal& g, const Vector& y0, const TimeGrid& grid) {
  const auto applied = simulate_closed_loop(family, sigma, pipeline.law, g, y0, grid);
  const auto cost = evaluate_cost(applied, g, family.q(), family.p());
  const auto single = solve_single_optimal(family, sigma, g, y0, grid);
  return gaps_from(pipeline, family, training, sigma, applied, cost, single);
}

Suboptimality suboptimality_gaps(const ParameterFamily& family, const ParameterEnsemble& training,
                                 const Vector& sigma, const TargetSignal& g, const Vector& y0,
                                 const TimeGrid& grid) {
  const auto pipeline = build_pipeline(family, training, g, y0, grid, grid.steps(), true);
  return suboptimality_gaps(pipeline, family, training, sigma, g, y0, grid);
}

namespace {

struct EllResult {
  std::vector<SweepRow> costs;
  std::vector<GapRow> gaps;
  std::vector<TrajectoryRecord> trajectories;
  RiccatiInvariants invariants;
};

EllResult run_ell(const ParameterFamily& family, const SweepSpec& spec, std::size_t index,
                  const TargetSignal& g, const Vector& y0, const TimeGrid& grid) {
  const double ell = spec.ells[index];
  EllResult out;
  const bool keep = spec.trajectory_ell && *spec.trajectory_ell == ell;
  auto row = [&](std::size_t test_id, const Vector& sigma, std::string feedback,
                 std::string convention) {
    SweepRow r;
    r.ell_index = index;
    r.ell = ell;
    r.test_id = test_id;
    r.sigma = sigma;
    r.feedback = std::move(feedback);
    r.convention = std::move(convention);
    return r;
  };

  const ParameterEnsemble training = spec.training(ell);
  const ParameterEnsemble test = spec.test(ell);

  std::optional<EnsemblePipeline> pipeline;
  std::vector<std::optional<AffineFeedbackLaw>> averaged(spec.conventions.size());
  std::string setup_error;
  try {
    pipeline.emplace(build_pipeline(family, training, g, y0, grid, spec.stride, spec.gaps));
    if (spec.check_invariants) out.invariants = check_invariants(pipeline->synthesis.riccati);
  } catch (const Error& e) {
    setup_error = std::string("ensemble synthesis: ") + e.what();
  }
  std::vector<std::string> averaged_error(spec.conventions.size());
  for (std::size_t c = 0; c < spec.conventions.size(); ++c) {
    try {
      averaged[c].emplace(make_averaged_feedback(family, training, g, grid, spec.conventions[c]));
    } catch (const Error& e) {
      averaged_error[c] = std::string("averaged synthesis: ") + e.what();
    }
  }

  for (std::size_t t = 0; t < test.size(); ++t) {
    const Vector& sigma = test[t];

    SweepRow ens_row = row(t, sigma, "ensemble", "");
    std::optional<ControlledTrajectory> applied;
    if (pipeline) {
      try {
        applied.emplace(simulate_closed_loop(family, sigma, pipeline->law, g, y0, grid));
        ens_row.cost = evaluate_cost(*applied, g, family.q(), family.p());
        if (keep) out.trajectories.push_back({ell, t, "ensemble", "", *applied});
      } catch (const Error& e) {
        ens_row.error = e.what();
      }
    } else {
      ens_row.error = setup_error;
    }
    out.costs.push_back(ens_row);

    for (std::size_t c = 0; c < spec.conventions.size(); ++c) {
      const std::string conv(to_string(spec.conventions[c]));
      SweepRow r = row(t, sigma, "averaged", conv);
      if (averaged[c]) {
        try {
          auto traj = simulate_closed_loop(family, sigma, *averaged[c], g, y0, grid);
          r.cost = evaluate_cost(traj, g, family.q(), family.p());
          if (keep) out.trajectories.push_back({ell, t, "averaged", conv, std::move(traj)});
        } catch (const Error& e) {
          r.error = e.what();
        }
      } else {
        r.error = averaged_error[c];
      }
      out.costs.push_back(std::move(r));
    }

    if (!spec.single_optimal_rows && !spec.gaps) continue;
    std::optional<SingleOptimal> single;
    std::string single_error;
    try {
      single.emplace(solve_single_optimal(family, sigma, g, y0, grid));
    } catch (const Error& e) {
      single_error = e.what();
    }
    if (spec.single_optimal_rows) {
      SweepRow r = row(t, sigma, "single-optimal", "");
      if (single) {
        r.cost = single->cost;
        if (keep) out.trajectories.push_back({ell, t, "single-optimal", "", single->trajectory});
      } else {
        r.error = single_error;
      }
      out.costs.push_back(std::move(r));
    }
    if (spec.gaps) {
      GapRow gr;
      gr.ell_index = index;
      gr.ell = ell;
      gr.test_id = t;
      gr.sigma = sigma;
      if (!pipeline) {
        gr.error = setup_error;
      } else if (!applied) {
        gr.error = ens_row.error;
      } else if (!single) {
        gr.error = single_error;
      } else {
        gr.gaps = gaps_from(*pipeline, family, training, sigma, *applied, ens_row.cost, *single);
      }
      out.gaps.push_back(std::move(gr));
    }
  }
  return out;
}

}  // namespace

SweepTable uncertainty_sweep(const ParameterFamily& family, const SweepSpec& spec,
                             const TargetSignal& g, const Vector& y0, const TimeGrid& grid) {
  for (double ell : spec.ells) {
    if (!(ell >= 0.0) || !std::isfinite(ell)) throw RangeError("sweep: ell must be >= 0");
  }
  if (!spec.training || !spec.test) throw Error("sweep: training and test generators required");
  std::vector<EllResult> results(spec.ells.size());
  parallel_for(spec.ells.size(), spec.threads, [&](std::size_t i) {
    results[i] = run_ell(family, spec, i, g, y0, grid);
  });
  SweepTable table;
  for (auto& r : results) {
    std::move(r.costs.begin(), r.costs.end(), std::back_inserter(table.costs));
    std::move(r.gaps.begin(), r.gaps.end(), std::back_inserter(table.gaps));
    std::move(r.trajectories.begin(), r.trajectories.end(),
              std::back_inserter(table.trajectories));
    table.invariants.push_back(r.invariants);
  }
  return table;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DimensionError("slope: need at least two paired points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw RangeError("slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw RangeError("slope: x values are all equal");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace enstrack
