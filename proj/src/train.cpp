#include "scengen/train.hpp"

#include <cmath>
#include <string>

#include "scengen/series.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace scengen {

namespace {

std::uint64_t group_id(StreamGroup g) { return static_cast<std::uint64_t>(g); }

double stable_active_probability(double pi_k, double gamma_s, double alpha,
                                 double beta) {
  // log-space odds with the common max subtracted; tolerates pi in {0, 1}
  const double log_p1 = std::log(pi_k) + 0.5 * (std::log(gamma_s) - std::log(alpha)) +
                        beta * beta / (2.0 * alpha);
  const double log_p0 = std::log1p(-pi_k);
  const double m = std::max(log_p1, log_p0);
  const double w1 = std::exp(log_p1 - m);
  const double w0 = std::exp(log_p0 - m);
  return w1 / (w0 + w1);
}

// Activation + coefficient pass for one instance; atom norms are precomputed
// once per sweep. Must mirror update_activation/update_coefficient exactly.
void coefficient_pass(GibbsState& st, int i, const Eigen::VectorXd& atom_sq,
                      Rng& rng) {
  const int K = st.dictionary.K();
  for (int k = 0; k < K; ++k) {
    const auto d = st.dictionary.atoms.col(k);
    const double dsq = atom_sq[k];
    const double s_old = st.S(k, i);
    const double w_old = st.B(k, i) ? s_old : 0.0;
    const double dot_r = d.dot(st.residual.col(i)) + dsq * w_old;
    const double alpha = st.gamma_s + st.gamma_e * dsq;
    const double beta = st.gamma_e * dot_r;

    const int b_new =
        rng.bernoulli(stable_active_probability(st.pi[k], st.gamma_s, alpha, beta))
            ? 1
            : 0;
    double s_new;
    if (b_new) {
      s_new = beta / alpha + rng.normal() / std::sqrt(alpha);
    } else {
      s_new = rng.normal() / std::sqrt(st.gamma_s);
    }
    const double w_new = b_new ? s_new : 0.0;
    if (w_new != w_old) st.residual.col(i) -= d * (w_new - w_old);
    st.B(k, i) = b_new;
    st.S(k, i) = s_new;
  }
}

void check_finite(const GibbsState& st, const char* where) {
  if (!std::isfinite(st.gamma_s) || !std::isfinite(st.gamma_e) ||
      !st.pi.allFinite() || !st.dictionary.atoms.allFinite() ||
      !st.S.allFinite() || !st.residual.allFinite()) {
    throw NumericalError(std::string(where) + ": non-finite state");
  }
}

}  // namespace

GibbsState init_state(const Eigen::MatrixXd& Z, int q, int r,
                      const Hyperparams& hp, std::uint64_t seed) {
  hp.validate();
  const int t = q + r;
  const int N = static_cast<int>(Z.cols());
  if (Z.rows() != t) throw std::invalid_argument("init_state: Z must have q + r rows");
  if (N < 2) throw std::invalid_argument("init_state: need at least 2 instances");
  if (!Z.allFinite()) throw std::invalid_argument("init_state: non-finite data");

  Rng rng = Rng::keyed(seed, {group_id(StreamGroup::init)});
  GibbsState st;
  st.seed = seed;
  st.dictionary.q = q;
  st.dictionary.r = r;
  st.gamma_s = std::max(hp.c / hp.d, 1.0);
  st.gamma_e = std::max(hp.e / hp.f, 1.0);

  st.dictionary.atoms.resize(t, hp.K);
  const double atom_sd = 1.0 / std::sqrt(static_cast<double>(t));
  for (int k = 0; k < hp.K; ++k) {
    for (int j = 0; j < t; ++j) st.dictionary.atoms(j, k) = atom_sd * rng.normal();
  }

  st.pi.resize(hp.K);
  for (int k = 0; k < hp.K; ++k) {
    st.pi[k] = rng.beta(hp.beta_shape1(), hp.beta_shape2());
  }

  st.S.resize(hp.K, N);
  st.B.resize(hp.K, N);
  const double coeff_sd = 1.0 / std::sqrt(st.gamma_s);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < hp.K; ++k) {
      st.S(k, i) = coeff_sd * rng.normal();
      st.B(k, i) = rng.bernoulli(0.5) ? 1 : 0;
    }
  }

  refresh_residual(st, Z);
  return st;
}

GibbsState init_state(const std::vector<Instance>& data, const Hyperparams& hp,
                      std::uint64_t seed) {
  const auto [q, r] = instance_dims(data);
  return init_state(concat_instances(data), q, r, hp, seed);
}

AtomPosterior atom_posterior(const GibbsState& st, int k) {
  if (k < 0 || k >= st.dictionary.K()) {
    throw std::invalid_argument("atom_posterior: atom index out of range");
  }
  const int t = st.dictionary.t();
  const Eigen::VectorXd w =
      st.S.row(k).cwiseProduct(st.B.row(k).cast<double>()).transpose();
  const double sumsq = w.squaredNorm();
  AtomPosterior post;
  post.precision = t + st.gamma_e * sumsq;
  post.mean = (st.gamma_e / post.precision) *
              (st.residual * w + st.dictionary.atoms.col(k) * sumsq);
  return post;
}

ActivationPosterior activation_posterior(const GibbsState& st, int i, int k) {
  if (k < 0 || k >= st.dictionary.K() || i < 0 || i >= st.N()) {
    throw std::invalid_argument("activation_posterior: index out of range");
  }
  const auto d = st.dictionary.atoms.col(k);
  const double dsq = d.squaredNorm();
  const double w_cur = st.B(k, i) ? st.S(k, i) : 0.0;
  const double dot_r = d.dot(st.residual.col(i)) + dsq * w_cur;
  ActivationPosterior post;
  post.alpha = st.gamma_s + st.gamma_e * dsq;
  post.beta = st.gamma_e * dot_r;
  post.p_active = stable_active_probability(st.pi[k], st.gamma_s, post.alpha, post.beta);
  return post;
}

BetaPosterior pi_posterior(const GibbsState& st, const Hyperparams& hp, int k) {
  if (k < 0 || k >= st.dictionary.K()) {
    throw std::invalid_argument("pi_posterior: atom index out of range");
  }
  const double n_k = st.B.row(k).sum();
  return {hp.beta_shape1() + n_k, hp.beta_shape2() + st.N() - n_k};
}

GammaPosterior gamma_s_posterior(const GibbsState& st, const Hyperparams& hp) {
  // every s_ik carries the Gaussian prior, active or not
  return {hp.c + 0.5 * st.N() * st.dictionary.K(),
          hp.d + 0.5 * st.S.squaredNorm()};
}

GammaPosterior gamma_e_posterior(const GibbsState& st, const Hyperparams& hp) {
  return {hp.e + 0.5 * st.N() * st.dictionary.t(),
          hp.f + 0.5 * st.residual.squaredNorm()};
}

void update_atom(GibbsState& st, int k, Rng& rng) {
  const auto post = atom_posterior(st, k);
  if (!std::isfinite(post.precision) || !(post.precision > 0)) {
    throw NumericalError("update_atom k=" + std::to_string(k) +
                         ": non-finite precision");
  }
  const int t = st.dictionary.t();
  const double sd = 1.0 / std::sqrt(post.precision);
  Eigen::VectorXd fresh(t);
  for (int j = 0; j < t; ++j) fresh[j] = post.mean[j] + sd * rng.normal();

  const Eigen::VectorXd w =
      st.S.row(k).cwiseProduct(st.B.row(k).cast<double>()).transpose();
  st.residual.noalias() -= (fresh - st.dictionary.atoms.col(k)) * w.transpose();
  st.dictionary.atoms.col(k) = fresh;
}

void update_activation(GibbsState& st, int i, int k, Rng& rng) {
  const auto post = activation_posterior(st, i, k);
  const int b_new = rng.bernoulli(post.p_active) ? 1 : 0;
  const double w_old = st.B(k, i) ? st.S(k, i) : 0.0;
  const double w_new = b_new ? st.S(k, i) : 0.0;
  if (w_new != w_old) {
    st.residual.col(i) -= st.dictionary.atoms.col(k) * (w_new - w_old);
  }
  st.B(k, i) = b_new;
}

void update_coefficient(GibbsState& st, int i, int k, Rng& rng) {
  const auto post = activation_posterior(st, i, k);
  double s_new;
  if (st.B(k, i)) {
    s_new = post.beta / post.alpha + rng.normal() / std::sqrt(post.alpha);
  } else {
    s_new = rng.normal() / std::sqrt(st.gamma_s);
  }
  const double w_old = st.B(k, i) ? st.S(k, i) : 0.0;
  const double w_new = st.B(k, i) ? s_new : 0.0;
  if (w_new != w_old) {
    st.residual.col(i) -= st.dictionary.atoms.col(k) * (w_new - w_old);
  }
  st.S(k, i) = s_new;
}

void update_pi(GibbsState& st, const Hyperparams& hp, int k, Rng& rng) {
  const auto post = pi_posterior(st, hp, k);
  st.pi[k] = rng.beta(post.shape1, post.shape2);
}

void update_gamma_s(GibbsState& st, const Hyperparams& hp, Rng& rng) {
  const auto post = gamma_s_posterior(st, hp);
  st.gamma_s = rng.gamma(post.shape, post.rate);
}

void update_gamma_e(GibbsState& st, const Hyperparams& hp, Rng& rng) {
  const auto post = gamma_e_posterior(st, hp);
  st.gamma_e = rng.gamma(post.shape, post.rate);
}

void sweep(GibbsState& st, const Hyperparams& hp) {
  const int K = st.dictionary.K();
  const int N = st.N();

  Rng atom_rng = Rng::keyed(st.seed, {st.sweep_count, group_id(StreamGroup::atoms)});
  for (int k = 0; k < K; ++k) update_atom(st, k, atom_rng);
  check_finite(st, "update_atom");

  Eigen::VectorXd atom_sq(K);
  for (int k = 0; k < K; ++k) atom_sq[k] = st.dictionary.atoms.col(k).squaredNorm();

#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < N; ++i) {
    Rng rng = Rng::keyed(
        st.seed, {st.sweep_count, group_id(StreamGroup::coefficients),
                  static_cast<std::uint64_t>(i)});
    coefficient_pass(st, i, atom_sq, rng);
  }
  check_finite(st, "update_coefficient");

  Rng pi_rng = Rng::keyed(st.seed, {st.sweep_count, group_id(StreamGroup::pi)});
  for (int k = 0; k < K; ++k) update_pi(st, hp, k, pi_rng);

  Rng gamma_rng = Rng::keyed(st.seed, {st.sweep_count, group_id(StreamGroup::gammas)});
  update_gamma_s(st, hp, gamma_rng);
  update_gamma_e(st, hp, gamma_rng);
  check_finite(st, "update_gamma");

  ++st.sweep_count;
}

TrainResult train(const std::vector<Instance>& data, const TrainConfig& config) {
  config.validate();
  const auto [q, r] = instance_dims(data);

  const Standardizer standardizer = fit_standardizer(data);
  Eigen::MatrixXd Z = concat_instances(data);
  for (Eigen::Index i = 0; i < Z.cols(); ++i) {
    Z.col(i) = standardizer.standardize(Z.col(i));
  }

  TrainResult result;
  result.state = init_state(Z, q, r, config.hp, config.seed);
  result.trace.reserve(config.total_sweeps);
  for (int s = 0; s < config.total_sweeps; ++s) {
    try {
      sweep(result.state, config.hp);
    } catch (const NumericalError& err) {
      throw NumericalError("training failed at sweep " + std::to_string(s + 1) +
                           ": " + err.what());
    }
    TraceRow row;
    row.sweep = result.state.sweep_count;
    row.log_likelihood = data_log_likelihood(result.state);
    row.gamma_e = result.state.gamma_e;
    row.gamma_s = result.state.gamma_s;
    row.mean_pi = result.state.pi.mean();
    row.active_atoms = 0;
    for (int k = 0; k < config.hp.K; ++k) {
      if (result.state.B.row(k).sum() > 0) ++row.active_atoms;
    }
    result.trace.push_back(row);
  }

  result.estimate.dictionary = result.state.dictionary;
  result.estimate.pi = result.state.pi;
  result.estimate.gamma_s = result.state.gamma_s;
  result.estimate.gamma_e = result.state.gamma_e;
  result.estimate.standardization = standardizer;
  result.estimate.validate();
  return result;
}

}  // namespace scengen
