#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scengen/model.hpp"
#include "scengen/rng.hpp"
#include "scengen/train.hpp"

namespace scengen {

struct ForecastConfig {
  int n_scenarios = 21;
  int predict_burn_in = 100;
  int thinning = 5;
  std::uint64_t seed = 1;

  void validate() const {
    if (n_scenarios < 1) throw std::invalid_argument("ForecastConfig: n_scenarios must be >= 1");
    if (predict_burn_in < 0) throw std::invalid_argument("ForecastConfig: predict_burn_in must be >= 0");
    if (thinning < 1) throw std::invalid_argument("ForecastConfig: thinning must be >= 1");
  }
};

/// m scenarios for one instance, rows in physical target units.
struct Ensemble {
  std::string instance_id;
  Eigen::MatrixXd scenarios;  // m x q
  Eigen::VectorXd mean_scenario;
};

/// Stream for one instance's predict-time chain; exposed so the chain can be
/// replayed externally (the draws are: init, then one predict_sweep per sweep).
Rng forecast_chain_rng(std::uint64_t seed, const std::string& instance_id);

/// Chain start: b_k ~ Bernoulli(pi_k), then s_k ~ N(0, 1/gamma_s).
void predict_chain_init(const ModelEstimate& theta, Eigen::VectorXd& s,
                        Eigen::VectorXi& b, Rng& rng);

/// One Gibbs pass over (s, b) against the predictor block only: the training
/// update formulas with d_k replaced by its D_x sub-column, residuals against
/// the standardized predictor window, and (pi, gamma_s, gamma_e) frozen.
void predict_sweep(Eigen::VectorXd& s, Eigen::VectorXi& b,
                   const Eigen::VectorXd& x_std, const ModelEstimate& theta,
                   Rng& rng);

/// Conditional scenario ensemble for a raw predictor window. Standardizes x
/// with the training statistics, runs one chain (burn-in, then every
/// thinning-th state retained), and maps each retained (s, b) through
/// D_y(s⊙b), destandardized. Scenarios carry no additive observation noise.
Ensemble forecast(const ModelEstimate& theta, const std::string& instance_id,
                  const Eigen::VectorXd& x_raw, const ForecastConfig& config);

/// Draws n instances from the full generative model (noise included),
/// destandardized into physical units through theta's standardization.
std::vector<Instance> simulate(const ModelEstimate& theta, int n,
                               std::uint64_t seed);

/// Model parameters drawn from the hierarchical prior (identity
/// standardization).
ModelEstimate sample_prior_model(const Hyperparams& hp, int q, int r,
                                 std::uint64_t seed);

/// Full latent state (parameters and per-instance coefficients) drawn from
/// the prior; no data attached yet. Pair with draw_observations.
GibbsState sample_prior_state(const Hyperparams& hp, int q, int r, int N,
                              std::uint64_t seed);

/// Z = D(B⊙S) + E with fresh noise; refresh_residual(state, Z) attaches it.
Eigen::MatrixXd draw_observations(const GibbsState& state, Rng& rng);

}  // namespace scengen
