#pragma once

#include <cstdint>
#include <vector>

#include "scengen/model.hpp"
#include "scengen/rng.hpp"

namespace scengen {

struct TrainConfig {
  int burn_in = 100;
  int total_sweeps = 150;
  std::uint64_t seed = 1;
  Hyperparams hp;

  void validate() const {
    hp.validate();
    if (burn_in < 0) throw std::invalid_argument("TrainConfig: burn_in must be >= 0");
    if (total_sweeps <= burn_in) {
      throw std::invalid_argument("TrainConfig: total_sweeps must exceed burn_in");
    }
  }
};

struct TraceRow {
  std::uint64_t sweep = 0;
  double log_likelihood = 0;
  double gamma_e = 0;
  double gamma_s = 0;
  double mean_pi = 0;
  int active_atoms = 0;  // atoms with at least one active instance
};

struct TrainResult {
  ModelEstimate estimate;
  GibbsState state;  // final sweep's full latent state
  std::vector<TraceRow> trace;
};

// Substream labels; every draw in a sweep is a pure function of
// (state.seed, state.sweep_count, group, instance index).
enum class StreamGroup : std::uint64_t {
  init = 0,
  atoms = 1,
  coefficients = 2,
  pi = 3,
  gammas = 4,
  simulate = 5,
  forecast = 6,
};

/// Prior-rooted initial state: atoms ~ N(0, 1/t), precisions at
/// max(prior mean, 1), coefficients from their prior at that precision,
/// activations Bernoulli(1/2), pi from the Beta prior.
GibbsState init_state(const Eigen::MatrixXd& Z, int q, int r,
                      const Hyperparams& hp, std::uint64_t seed);
GibbsState init_state(const std::vector<Instance>& data, const Hyperparams& hp,
                      std::uint64_t seed);

/// Closed-form conditional parameters, exposed separately from the draws so
/// unit tests can check them against hand arithmetic and quadrature.
struct AtomPosterior {
  double precision = 0;   // scalar: t + gamma_e * sum_i (b_ik s_ik)^2
  Eigen::VectorXd mean;   // (gamma_e / precision) * sum_i b_ik s_ik r_ik
};
AtomPosterior atom_posterior(const GibbsState& state, int k);

struct ActivationPosterior {
  double alpha = 0;     // gamma_s + gamma_e ||d_k||^2
  double beta = 0;      // gamma_e d_k . r_ik
  double p_active = 0;  // P(b_ik = 1 | rest), s_ik marginalized
};
ActivationPosterior activation_posterior(const GibbsState& state, int i, int k);

struct GammaPosterior {
  double shape = 0;
  double rate = 0;
};
struct BetaPosterior {
  double shape1 = 0;
  double shape2 = 0;
};
BetaPosterior pi_posterior(const GibbsState& state, const Hyperparams& hp, int k);
GammaPosterior gamma_s_posterior(const GibbsState& state, const Hyperparams& hp);
GammaPosterior gamma_e_posterior(const GibbsState& state, const Hyperparams& hp);

/// Single-site conditional draws. Each keeps the residual cache in sync.
void update_atom(GibbsState& state, int k, Rng& rng);
void update_activation(GibbsState& state, int i, int k, Rng& rng);
void update_coefficient(GibbsState& state, int i, int k, Rng& rng);
void update_pi(GibbsState& state, const Hyperparams& hp, int k, Rng& rng);
void update_gamma_s(GibbsState& state, const Hyperparams& hp, Rng& rng);
void update_gamma_e(GibbsState& state, const Hyperparams& hp, Rng& rng);

/// One full pass in fixed order: atoms (sequential in k), then per instance
/// the (activation, coefficient) pairs for every k, then pi, then both
/// precisions. Instances use independent substreams keyed by
/// (seed, sweep_count, i), so instance-parallel execution matches sequential
/// execution exactly. Throws NumericalError naming the sweep and update on
/// numerical blow-up.
void sweep(GibbsState& state, const Hyperparams& hp);

/// Runs total_sweeps sweeps from init_state on standardized data and returns
/// the final sweep's state as the estimate, packaged with the training
/// standardization. Instances are standardized internally.
TrainResult train(const std::vector<Instance>& data, const TrainConfig& config);

}  // namespace scengen
