#include "scengen/forecast.hpp"

#include <cmath>
#include <cstdio>

namespace scengen {

namespace {

double stable_active_probability(double pi_k, double gamma_s, double alpha,
                                 double beta) {
  const double log_p1 = std::log(pi_k) + 0.5 * (std::log(gamma_s) - std::log(alpha)) +
                        beta * beta / (2.0 * alpha);
  const double log_p0 = std::log1p(-pi_k);
  const double m = std::max(log_p1, log_p0);
  const double w1 = std::exp(log_p1 - m);
  const double w0 = std::exp(log_p0 - m);
  return w1 / (w0 + w1);
}

// One pass over k with an incrementally maintained predictor-block residual.
// predict_sweep() recomputes the residual at entry and calls this, and
// forecast() does exactly the same each sweep, so both paths agree bitwise.
void predict_pass(Eigen::VectorXd& s, Eigen::VectorXi& b,
                  Eigen::VectorXd& residual, const ModelEstimate& theta,
                  const Eigen::VectorXd& atom_sq_x, Rng& rng) {
  const auto Dx = theta.dictionary.predictor_block();
  const int K = theta.dictionary.K();
  for (int k = 0; k < K; ++k) {
    const auto dx = Dx.col(k);
    const double dsq = atom_sq_x[k];
    const double s_old = s[k];
    const double w_old = b[k] ? s_old : 0.0;
    const double dot_r = dx.dot(residual) + dsq * w_old;
    const double alpha = theta.gamma_s + theta.gamma_e * dsq;
    const double beta = theta.gamma_e * dot_r;

    const int b_new =
        rng.bernoulli(stable_active_probability(theta.pi[k], theta.gamma_s, alpha, beta))
            ? 1
            : 0;
    double s_new;
    if (b_new) {
      s_new = beta / alpha + rng.normal() / std::sqrt(alpha);
    } else {
      s_new = rng.normal() / std::sqrt(theta.gamma_s);
    }
    const double w_new = b_new ? s_new : 0.0;
    if (w_new != w_old) residual -= dx * (w_new - w_old);
    b[k] = b_new;
    s[k] = s_new;
  }
}

Eigen::VectorXd predictor_residual(const Eigen::VectorXd& s,
                                   const Eigen::VectorXi& b,
                                   const Eigen::VectorXd& x_std,
                                   const ModelEstimate& theta) {
  const Eigen::VectorXd w = s.cwiseProduct(b.cast<double>());
  return x_std - theta.dictionary.predictor_block() * w;
}

}  // namespace

Rng forecast_chain_rng(std::uint64_t seed, const std::string& instance_id) {
  return Rng::keyed(seed, {static_cast<std::uint64_t>(StreamGroup::forecast),
                           hash_bytes(instance_id.data(), instance_id.size())});
}

void predict_chain_init(const ModelEstimate& theta, Eigen::VectorXd& s,
                        Eigen::VectorXi& b, Rng& rng) {
  const int K = theta.dictionary.K();
  s.resize(K);
  b.resize(K);
  for (int k = 0; k < K; ++k) b[k] = rng.bernoulli(theta.pi[k]) ? 1 : 0;
  const double sd = 1.0 / std::sqrt(theta.gamma_s);
  for (int k = 0; k < K; ++k) s[k] = sd * rng.normal();
}

void predict_sweep(Eigen::VectorXd& s, Eigen::VectorXi& b,
                   const Eigen::VectorXd& x_std, const ModelEstimate& theta,
                   Rng& rng) {
  if (x_std.size() != theta.dictionary.r) {
    throw std::invalid_argument("predict_sweep: x must have r entries");
  }
  if (s.size() != theta.dictionary.K() || b.size() != theta.dictionary.K()) {
    throw std::invalid_argument("predict_sweep: s and b must have K entries");
  }
  const auto Dx = theta.dictionary.predictor_block();
  Eigen::VectorXd atom_sq_x(theta.dictionary.K());
  for (int k = 0; k < theta.dictionary.K(); ++k) {
    atom_sq_x[k] = Dx.col(k).squaredNorm();
  }
  Eigen::VectorXd residual = predictor_residual(s, b, x_std, theta);
  predict_pass(s, b, residual, theta, atom_sq_x, rng);
}

Ensemble forecast(const ModelEstimate& theta, const std::string& instance_id,
                  const Eigen::VectorXd& x_raw, const ForecastConfig& config) {
  config.validate();
  theta.validate();
  const int q = theta.dictionary.q;
  const int r = theta.dictionary.r;
  const int K = theta.dictionary.K();
  if (x_raw.size() != r) {
    throw std::invalid_argument("forecast: predictor window must have r = " +
                                std::to_string(r) + " entries");
  }

  const Eigen::VectorXd x_std =
      (x_raw - theta.standardization.means.head(r))
          .cwiseQuotient(theta.standardization.scales.head(r));
  const Eigen::VectorXd y_means = theta.standardization.means.tail(q);
  const Eigen::VectorXd y_scales = theta.standardization.scales.tail(q);

  const auto Dx = theta.dictionary.predictor_block();
  Eigen::VectorXd atom_sq_x(K);
  for (int k = 0; k < K; ++k) atom_sq_x[k] = Dx.col(k).squaredNorm();

  Rng rng = forecast_chain_rng(config.seed, instance_id);
  Eigen::VectorXd s;
  Eigen::VectorXi b;
  predict_chain_init(theta, s, b, rng);

  Ensemble out;
  out.instance_id = instance_id;
  out.scenarios.resize(config.n_scenarios, q);

  auto run_sweep = [&] {
    Eigen::VectorXd residual = predictor_residual(s, b, x_std, theta);
    predict_pass(s, b, residual, theta, atom_sq_x, rng);
  };

  for (int i = 0; i < config.predict_burn_in; ++i) run_sweep();
  for (int m = 0; m < config.n_scenarios; ++m) {
    for (int i = 0; i < config.thinning; ++i) run_sweep();
    const Eigen::VectorXd y_std = reconstruct_target(theta.dictionary, s, b);
    out.scenarios.row(m) = (y_std.cwiseProduct(y_scales) + y_means).transpose();
  }
  out.mean_scenario = out.scenarios.colwise().mean().transpose();
  return out;
}

std::vector<Instance> simulate(const ModelEstimate& theta, int n,
                               std::uint64_t seed) {
  theta.validate();
  if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
  const int q = theta.dictionary.q;
  const int r = theta.dictionary.r;
  const int K = theta.dictionary.K();
  Rng rng = Rng::keyed(seed, {static_cast<std::uint64_t>(StreamGroup::simulate)});

  std::vector<Instance> out;
  out.reserve(n);
  const double coeff_sd = 1.0 / std::sqrt(theta.gamma_s);
  const double noise_sd = 1.0 / std::sqrt(theta.gamma_e);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXi b(K);
    Eigen::VectorXd s(K);
    for (int k = 0; k < K; ++k) b[k] = rng.bernoulli(theta.pi[k]) ? 1 : 0;
    for (int k = 0; k < K; ++k) s[k] = coeff_sd * rng.normal();
    Eigen::VectorXd z = reconstruct(theta.dictionary, s, b);
    for (int j = 0; j < q + r; ++j) z[j] += noise_sd * rng.normal();
    z = theta.standardization.destandardize(z);

    Instance inst;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "sim%06d", i);
    inst.id = idbuf;
    inst.x = z.head(r);
    inst.y = z.tail(q);
    out.push_back(std::move(inst));
  }
  return out;
}

ModelEstimate sample_prior_model(const Hyperparams& hp, int q, int r,
                                 std::uint64_t seed) {
  hp.validate();
  if (q < 1 || r < 1) throw std::invalid_argument("sample_prior_model: q, r must be >= 1");
  const int t = q + r;
  Rng rng = Rng::keyed(seed, {static_cast<std::uint64_t>(StreamGroup::init), 1});

  ModelEstimate theta;
  theta.dictionary.q = q;
  theta.dictionary.r = r;
  theta.dictionary.atoms.resize(t, hp.K);
  const double atom_sd = 1.0 / std::sqrt(static_cast<double>(t));
  for (int k = 0; k < hp.K; ++k) {
    for (int j = 0; j < t; ++j) theta.dictionary.atoms(j, k) = atom_sd * rng.normal();
  }
  theta.pi.resize(hp.K);
  for (int k = 0; k < hp.K; ++k) {
    theta.pi[k] = rng.beta(hp.beta_shape1(), hp.beta_shape2());
  }
  theta.gamma_s = rng.gamma(hp.c, hp.d);
  theta.gamma_e = rng.gamma(hp.e, hp.f);
  theta.standardization = Standardizer::identity(t);
  return theta;
}

GibbsState sample_prior_state(const Hyperparams& hp, int q, int r, int N,
                              std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("sample_prior_state: N must be >= 1");
  const ModelEstimate theta = sample_prior_model(hp, q, r, seed);
  Rng rng = Rng::keyed(seed, {static_cast<std::uint64_t>(StreamGroup::init), 2});

  GibbsState st;
  st.seed = seed;
  st.dictionary = theta.dictionary;
  st.pi = theta.pi;
  st.gamma_s = theta.gamma_s;
  st.gamma_e = theta.gamma_e;
  st.S.resize(hp.K, N);
  st.B.resize(hp.K, N);
  const double coeff_sd = 1.0 / std::sqrt(st.gamma_s);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < hp.K; ++k) {
      st.B(k, i) = rng.bernoulli(st.pi[k]) ? 1 : 0;
      st.S(k, i) = coeff_sd * rng.normal();
    }
  }
  st.residual = Eigen::MatrixXd::Zero(q + r, N);
  return st;
}

Eigen::MatrixXd draw_observations(const GibbsState& state, Rng& rng) {
  const int t = state.dictionary.t();
  const int N = state.N();
  const Eigen::MatrixXd W = state.S.cwiseProduct(state.B.cast<double>());
  Eigen::MatrixXd Z = state.dictionary.atoms * W;
  const double noise_sd = 1.0 / std::sqrt(state.gamma_e);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < t; ++j) Z(j, i) += noise_sd * rng.normal();
  }
  return Z;
}

}  // namespace scengen
