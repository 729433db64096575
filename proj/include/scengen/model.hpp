#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scengen {

/// Raised when a sampler or scoring step produces non-finite values.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hyperparameters of the beta-Bernoulli factor model. The Beta concentration
/// is named b_beta because b is taken by the activation vectors.
struct Hyperparams {
  double a = 1.0;
  double b_beta = 1.0;
  double c = 1e-6;  // Gamma(c, d) prior on the coefficient precision
  double d = 1e-6;
  double e = 1e-6;  // Gamma(e, f) prior on the noise precision
  double f = 1e-6;
  int K = 100;

  Hyperparams() = default;
  Hyperparams(double a_, double b_beta_, double c_, double d_, double e_,
              double f_, int K_)
      : a(a_), b_beta(b_beta_), c(c_), d(d_), e(e_), f(f_), K(K_) {
    validate();
  }

  double beta_shape1() const { return a / K; }
  double beta_shape2() const { return (K - 1) * b_beta / K; }

  /// Rejects non-positive scalars and K < 2. K = 1 would make the second
  /// Beta shape (K-1)b/K vanish, so it is not constructible.
  void validate() const;
};

/// One forecast case: predictor window x (length r) and target window y
/// (length q), in physical units unless stated otherwise. The concatenation
/// z = [x; y] has length t = q + r.
struct Instance {
  std::string id;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// Shared (q, r) of a non-empty instance set. Throws if instances disagree
/// in dimension, contain non-finite values, or have empty windows.
std::pair<int, int> instance_dims(const std::vector<Instance>& data);

/// Stacks instances into a t x N matrix of columns z_i = [x_i; y_i].
Eigen::MatrixXd concat_instances(const std::vector<Instance>& data);

/// t x K atom matrix with its fixed partition: the first r rows act on the
/// predictor window (D_x), the last q rows on the target window (D_y).
struct Dictionary {
  Eigen::MatrixXd atoms;
  int q = 0;
  int r = 0;

  int t() const { return q + r; }
  int K() const { return static_cast<int>(atoms.cols()); }
  Eigen::Block<const Eigen::MatrixXd> predictor_block() const {
    return atoms.topRows(r);
  }
  Eigen::Block<const Eigen::MatrixXd> target_block() const {
    return atoms.bottomRows(q);
  }
  void validate() const;
};

/// Per-dimension affine transform fitted on training data. Scales are
/// strictly positive; destandardize(standardize(v)) == v.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd scales;

  int size() const { return static_cast<int>(means.size()); }
  Eigen::VectorXd standardize(const Eigen::VectorXd& v) const;
  Eigen::VectorXd destandardize(const Eigen::VectorXd& v) const;
  static Standardizer identity(int t);
};

/// Point estimate consumed at predict time: dictionary, activation
/// probabilities, both precisions, and the training standardization.
struct ModelEstimate {
  Dictionary dictionary;
  Eigen::VectorXd pi;
  double gamma_s = 1.0;
  double gamma_e = 1.0;
  Standardizer standardization;

  void validate() const;
};

/// Full latent state of the Gibbs sampler. `residual` caches z_i - D(b_i⊙s_i)
/// column-wise; every update is responsible for keeping it in sync.
/// All randomness is a pure function of (seed, sweep_count, update group,
/// instance index), so the pair (seed, sweep_count) is the stream position.
struct GibbsState {
  Dictionary dictionary;
  Eigen::MatrixXd S;   // K x N Gaussian coefficients
  Eigen::MatrixXi B;   // K x N activations in {0,1}
  Eigen::VectorXd pi;  // length K
  double gamma_s = 1.0;
  double gamma_e = 1.0;
  std::uint64_t sweep_count = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd residual;  // t x N cache of Z - D(B⊙S)

  int N() const { return static_cast<int>(S.cols()); }
};

/// D·(s ⊙ b): noise-free reconstruction of a full window.
Eigen::VectorXd reconstruct(const Dictionary& dict, const Eigen::VectorXd& s,
                            const Eigen::VectorXi& b);

/// D_y·(s ⊙ b): the target part only; equals the tail of reconstruct().
Eigen::VectorXd reconstruct_target(const Dictionary& dict,
                                   const Eigen::VectorXd& s,
                                   const Eigen::VectorXi& b);

/// Residual with atom k's contribution added back:
/// z - D(s⊙b) + d_k·(s_k·b_k). This is the r_ik used by the Gibbs updates.
Eigen::VectorXd residual_excluding(const Dictionary& dict,
                                   const Eigen::VectorXd& s,
                                   const Eigen::VectorXi& b,
                                   const Eigen::VectorXd& z, int k);

/// Additive components of the unnormalized log prior x likelihood of Eq-style
/// hierarchical state. Used by sampler-correctness tests only.
struct LogJointParts {
  double atom_prior = 0;        // N(0, 1/t) per dictionary entry
  double coeff_prior = 0;       // N(0, 1/gamma_s) per coefficient
  double activation_prior = 0;  // Bernoulli(pi_k) mass of B
  double pi_prior = 0;          // Beta(a/K, (K-1)b/K)
  double gamma_s_prior = 0;     // Gamma(c, d), shape-rate
  double gamma_e_prior = 0;     // Gamma(e, f), shape-rate
  double likelihood = 0;        // N(z; D(b⊙s), 1/gamma_e)

  double total() const {
    return atom_prior + coeff_prior + activation_prior + pi_prior +
           gamma_s_prior + gamma_e_prior + likelihood;
  }
};

LogJointParts log_joint_parts(const GibbsState& state, const Eigen::MatrixXd& Z,
                              const Hyperparams& hp);
double log_joint(const GibbsState& state, const Eigen::MatrixXd& Z,
                 const Hyperparams& hp);
double log_joint(const GibbsState& state, const std::vector<Instance>& data,
                 const Hyperparams& hp);

/// Recomputes the residual cache from observations Z (t x N).
void refresh_residual(GibbsState& state, const Eigen::MatrixXd& Z);

/// Gaussian data log-likelihood of the state's cached residuals.
double data_log_likelihood(const GibbsState& state);

}  // namespace scengen
