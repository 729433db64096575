#include "scengen/model.hpp"

#include <cmath>
#include <numbers>

namespace scengen {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

double log_gamma_pdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double log_beta_const(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

void Hyperparams::validate() const {
  if (!(a > 0) || !(b_beta > 0) || !(c > 0) || !(d > 0) || !(e > 0) || !(f > 0)) {
    throw std::invalid_argument("Hyperparams: a, b_beta, c, d, e, f must be > 0");
  }
  if (K < 2) {
    throw std::invalid_argument(
        "Hyperparams: K must be >= 2; K = 1 degenerates the Beta prior's "
        "second shape (K-1)b/K to zero");
  }
}

std::pair<int, int> instance_dims(const std::vector<Instance>& data) {
  if (data.empty()) throw std::invalid_argument("instance set is empty");
  const int r = static_cast<int>(data.front().x.size());
  const int q = static_cast<int>(data.front().y.size());
  if (r < 1 || q < 1) {
    throw std::invalid_argument("instance '" + data.front().id +
                                "': predictor and target windows must be non-empty");
  }
  for (const auto& inst : data) {
    if (inst.x.size() != r || inst.y.size() != q) {
      throw std::invalid_argument("instance '" + inst.id +
                                  "': window dimensions differ from the first instance");
    }
    if (!inst.x.allFinite() || !inst.y.allFinite()) {
      throw std::invalid_argument("instance '" + inst.id + "': non-finite value");
    }
  }
  return {q, r};
}

Eigen::MatrixXd concat_instances(const std::vector<Instance>& data) {
  const auto [q, r] = instance_dims(data);
  Eigen::MatrixXd Z(q + r, data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    Z.col(i).head(r) = data[i].x;
    Z.col(i).tail(q) = data[i].y;
  }
  return Z;
}

void Dictionary::validate() const {
  if (q < 1 || r < 1) throw std::invalid_argument("Dictionary: q and r must be >= 1");
  if (atoms.rows() != q + r) {
    throw std::invalid_argument("Dictionary: atom matrix must have q + r rows");
  }
  if (atoms.cols() < 1) throw std::invalid_argument("Dictionary: no atoms");
}

Eigen::VectorXd Standardizer::standardize(const Eigen::VectorXd& v) const {
  if (v.size() != means.size()) {
    throw std::invalid_argument("Standardizer: dimension mismatch");
  }
  return (v - means).cwiseQuotient(scales);
}

Eigen::VectorXd Standardizer::destandardize(const Eigen::VectorXd& v) const {
  if (v.size() != means.size()) {
    throw std::invalid_argument("Standardizer: dimension mismatch");
  }
  return v.cwiseProduct(scales) + means;
}

Standardizer Standardizer::identity(int t) {
  return {Eigen::VectorXd::Zero(t), Eigen::VectorXd::Ones(t)};
}

void ModelEstimate::validate() const {
  dictionary.validate();
  if (pi.size() != dictionary.K()) {
    throw std::invalid_argument("ModelEstimate: pi length must equal K");
  }
  if ((pi.array() < 0).any() || (pi.array() > 1).any()) {
    throw std::invalid_argument("ModelEstimate: pi entries must lie in [0,1]");
  }
  if (!(gamma_s > 0) || !(gamma_e > 0)) {
    throw std::invalid_argument("ModelEstimate: precisions must be > 0");
  }
  if (standardization.means.size() != dictionary.t() ||
      standardization.scales.size() != dictionary.t()) {
    throw std::invalid_argument("ModelEstimate: standardization must cover all t dimensions");
  }
  if ((standardization.scales.array() <= 0).any()) {
    throw std::invalid_argument("ModelEstimate: standardization scales must be > 0");
  }
}

Eigen::VectorXd reconstruct(const Dictionary& dict, const Eigen::VectorXd& s,
                            const Eigen::VectorXi& b) {
  if (s.size() != dict.K() || b.size() != dict.K()) {
    throw std::invalid_argument("reconstruct: s and b must have K entries");
  }
  const Eigen::VectorXd w = s.cwiseProduct(b.cast<double>());
  return dict.atoms * w;
}

Eigen::VectorXd reconstruct_target(const Dictionary& dict,
                                   const Eigen::VectorXd& s,
                                   const Eigen::VectorXi& b) {
  if (s.size() != dict.K() || b.size() != dict.K()) {
    throw std::invalid_argument("reconstruct_target: s and b must have K entries");
  }
  const Eigen::VectorXd w = s.cwiseProduct(b.cast<double>());
  return dict.target_block() * w;
}

Eigen::VectorXd residual_excluding(const Dictionary& dict,
                                   const Eigen::VectorXd& s,
                                   const Eigen::VectorXi& b,
                                   const Eigen::VectorXd& z, int k) {
  if (k < 0 || k >= dict.K()) {
    throw std::invalid_argument("residual_excluding: atom index out of range");
  }
  if (z.size() != dict.t()) {
    throw std::invalid_argument("residual_excluding: z must have t entries");
  }
  Eigen::VectorXd res = z - reconstruct(dict, s, b);
  res += dict.atoms.col(k) * (s[k] * static_cast<double>(b[k]));
  return res;
}

LogJointParts log_joint_parts(const GibbsState& state, const Eigen::MatrixXd& Z,
                              const Hyperparams& hp) {
  hp.validate();
  const auto& dict = state.dictionary;
  const int t = dict.t();
  const int K = dict.K();
  const int N = state.N();
  if (Z.rows() != t || Z.cols() != N) {
    throw std::invalid_argument("log_joint: data dimensions do not match state");
  }
  if (!Z.allFinite() || !dict.atoms.allFinite() || !state.S.allFinite() ||
      !state.pi.allFinite() || !std::isfinite(state.gamma_s) ||
      !std::isfinite(state.gamma_e)) {
    throw NumericalError("log_joint: non-finite state or data");
  }

  LogJointParts parts;
  parts.atom_prior = 0.5 * K * t * (std::log(static_cast<double>(t)) - kLog2Pi) -
                     0.5 * t * dict.atoms.squaredNorm();
  parts.coeff_prior = 0.5 * N * K * (std::log(state.gamma_s) - kLog2Pi) -
                      0.5 * state.gamma_s * state.S.squaredNorm();

  for (int k = 0; k < K; ++k) {
    const double pi_k = state.pi[k];
    for (int i = 0; i < N; ++i) {
      parts.activation_prior +=
          state.B(k, i) ? std::log(pi_k) : std::log1p(-pi_k);
    }
  }

  const double a1 = hp.beta_shape1();
  const double a2 = hp.beta_shape2();
  for (int k = 0; k < K; ++k) {
    parts.pi_prior += (a1 - 1.0) * std::log(state.pi[k]) +
                      (a2 - 1.0) * std::log1p(-state.pi[k]) -
                      log_beta_const(a1, a2);
  }

  parts.gamma_s_prior = log_gamma_pdf(state.gamma_s, hp.c, hp.d);
  parts.gamma_e_prior = log_gamma_pdf(state.gamma_e, hp.e, hp.f);

  const Eigen::MatrixXd W = state.S.cwiseProduct(state.B.cast<double>());
  const double rss = (Z - dict.atoms * W).squaredNorm();
  parts.likelihood =
      0.5 * N * t * (std::log(state.gamma_e) - kLog2Pi) - 0.5 * state.gamma_e * rss;

  if (std::isnan(parts.total())) {
    throw NumericalError("log_joint: evaluation produced NaN");
  }
  return parts;
}

double log_joint(const GibbsState& state, const Eigen::MatrixXd& Z,
                 const Hyperparams& hp) {
  return log_joint_parts(state, Z, hp).total();
}

double log_joint(const GibbsState& state, const std::vector<Instance>& data,
                 const Hyperparams& hp) {
  return log_joint(state, concat_instances(data), hp);
}

void refresh_residual(GibbsState& state, const Eigen::MatrixXd& Z) {
  if (Z.rows() != state.dictionary.t() || Z.cols() != state.N()) {
    throw std::invalid_argument("refresh_residual: data dimensions do not match state");
  }
  const Eigen::MatrixXd W = state.S.cwiseProduct(state.B.cast<double>());
  state.residual = Z - state.dictionary.atoms * W;
}

double data_log_likelihood(const GibbsState& state) {
  const int t = state.dictionary.t();
  const int N = state.N();
  return 0.5 * N * t * (std::log(state.gamma_e) - kLog2Pi) -
         0.5 * state.gamma_e * state.residual.squaredNorm();
}

}  // namespace scengen
