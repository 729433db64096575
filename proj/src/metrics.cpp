#include "scengen/metrics.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "scengen/rng.hpp"

namespace scengen {

void VerificationCase::validate() const {
  if (ensemble.rows() < 2) {
    throw std::invalid_argument("VerificationCase: need at least 2 ensemble members");
  }
  if (ensemble.cols() != actual.size()) {
    throw std::invalid_argument("VerificationCase: ensemble and actual dimensions differ");
  }
  if (!ensemble.allFinite() || !actual.allFinite()) {
    throw std::invalid_argument("VerificationCase: non-finite value");
  }
}

double mst_length(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 2) throw std::invalid_argument("mst_length: need at least 2 points");

  // Prim with O(n^2) best-edge tracking; n is small (ensemble sized).
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  in_tree[0] = true;
  for (int j = 1; j < n; ++j) best[j] = (points.row(j) - points.row(0)).norm();

  double total = 0.0;
  for (int added = 1; added < n; ++added) {
    int next = -1;
    double next_dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (!in_tree[j] && best[j] < next_dist) {
        next = j;
        next_dist = best[j];
      }
    }
    total += next_dist;
    in_tree[next] = true;
    for (int j = 0; j < n; ++j) {
      if (!in_tree[j]) {
        const double dist = (points.row(j) - points.row(next)).norm();
        if (dist < best[j]) best[j] = dist;
      }
    }
  }
  return total;
}

int mst_rank(const VerificationCase& c, std::uint64_t tie_seed) {
  c.validate();
  const int m = static_cast<int>(c.ensemble.rows());
  const double base = mst_length(c.ensemble);

  int below = 0;
  int ties = 0;
  Eigen::MatrixXd swapped = c.ensemble;
  for (int j = 0; j < m; ++j) {
    swapped.row(j) = c.actual.transpose();
    const double len = mst_length(swapped);
    swapped.row(j) = c.ensemble.row(j);
    if (len < base) ++below;
    else if (len == base) ++ties;
  }
  int rank = 1 + below;
  if (ties > 0) {
    Rng rng(tie_seed);
    rank += static_cast<int>(rng.below(static_cast<std::uint64_t>(ties) + 1));
  }
  return rank;
}

RankHistogram rank_histogram(const std::vector<int>& ranks, int m) {
  if (m < 1) throw std::invalid_argument("rank_histogram: m must be >= 1");
  RankHistogram hist;
  hist.counts.assign(m + 1, 0);
  for (int rank : ranks) {
    if (rank < 1 || rank > m + 1) {
      throw std::invalid_argument("rank_histogram: rank " + std::to_string(rank) +
                                  " outside 1.." + std::to_string(m + 1));
    }
    ++hist.counts[rank - 1];
  }
  const double expected = static_cast<double>(ranks.size()) / (m + 1);
  hist.chi_square = 0.0;
  if (!ranks.empty()) {
    for (long count : hist.counts) {
      const double diff = count - expected;
      hist.chi_square += diff * diff / expected;
    }
  }
  hist.p_value = chi_square_p_value(hist.chi_square, m);
  return hist;
}

std::pair<int, Eigen::VectorXd> closest_scenario(const VerificationCase& c) {
  c.validate();
  int best = 0;
  double best_dist = (c.ensemble.row(0).transpose() - c.actual).norm();
  for (int j = 1; j < c.ensemble.rows(); ++j) {
    const double dist = (c.ensemble.row(j).transpose() - c.actual).norm();
    if (dist < best_dist) {
      best = j;
      best_dist = dist;
    }
  }
  return {best, c.ensemble.row(best).transpose() - c.actual};
}

HorizonErrors horizon_errors(const std::vector<VerificationCase>& cases) {
  if (cases.empty()) throw std::invalid_argument("horizon_errors: no cases");
  const Eigen::Index q = cases.front().actual.size();
  HorizonErrors out;
  out.rmse = Eigen::VectorXd::Zero(q);
  out.mae = Eigen::VectorXd::Zero(q);
  out.bias = Eigen::VectorXd::Zero(q);
  for (const auto& c : cases) {
    if (c.actual.size() != q) {
      throw std::invalid_argument("horizon_errors: cases disagree in horizon length");
    }
    const Eigen::VectorXd err = closest_scenario(c).second;
    out.rmse += err.cwiseProduct(err);
    out.mae += err.cwiseAbs();
    out.bias += err;
  }
  const double n = static_cast<double>(cases.size());
  out.rmse = (out.rmse / n).cwiseSqrt();
  out.mae /= n;
  out.bias /= n;
  return out;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  int support = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) {
      tau = candidate;
      support = static_cast<int>(j + 1);
    }
  }
  (void)support;
  return (v.array() - tau).max(0.0);
}

HullDistance hull_distance(const Eigen::MatrixXd& ensemble,
                           const Eigen::VectorXd& actual) {
  const int m = static_cast<int>(ensemble.rows());
  const Eigen::Index q = ensemble.cols();
  if (m < 1) throw std::invalid_argument("hull_distance: need at least 1 member");
  if (q != actual.size()) {
    throw std::invalid_argument("hull_distance: dimension mismatch");
  }
  const double norm_factor = std::sqrt(static_cast<double>(q));
  if (m == 1) {
    return {(ensemble.row(0).transpose() - actual).norm() / norm_factor, true};
  }

  // min over the simplex of 0.5 ||S^T lambda - a||^2; gradient G lambda - c.
  const Eigen::MatrixXd G = ensemble * ensemble.transpose();
  const Eigen::VectorXd c = ensemble * actual;

  // gradient Lipschitz constant: top eigenvalue of G (m is ensemble sized)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolver(G, Eigen::EigenvaluesOnly);
  const double lipschitz = eigensolver.eigenvalues().maxCoeff();
  const double base_step = lipschitz > 0 ? 1.0 / lipschitz : 1.0;

  // Start at the closest vertex; monotone descent keeps the result at or
  // below the closest-member distance.
  int best = 0;
  double best_dist = (ensemble.row(0).transpose() - actual).norm();
  for (int j = 1; j < m; ++j) {
    const double dist = (ensemble.row(j).transpose() - actual).norm();
    if (dist < best_dist) {
      best = j;
      best_dist = dist;
    }
  }
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  lambda[best] = 1.0;

  // Projected gradient with line search to identify the active face, then an
  // exact equality-constrained solve on that face with a KKT optimality
  // check. A plain fixed-step loop zigzags past the iteration budget on
  // near-degenerate ensembles and misses the oracle tolerance.
  double dist = best_dist;
  Eigen::VectorXd grad = G * lambda - c;
  double step = base_step;
  bool converged = false;
  constexpr int kMaxIterations = 10000;

  const auto distance_at = [&](const Eigen::VectorXd& weights) {
    return (ensemble.transpose() * weights - actual).norm();
  };

  // stationarity on the simplex: grad_j constant on the support, larger off it
  const auto kkt_satisfied = [&](const Eigen::VectorXd& weights,
                                 const Eigen::VectorXd& gradient) {
    const double nu = gradient.dot(weights);
    const double tol = 1e-11 * (1.0 + gradient.lpNorm<Eigen::Infinity>());
    for (int j = 0; j < m; ++j) {
      if (gradient[j] < nu - tol) return false;
      if (weights[j] > 0 && std::abs(gradient[j] - nu) > tol) return false;
    }
    return true;
  };

  // unconstrained minimizer over the affine hull of the supported members
  const auto face_solve = [&](const Eigen::VectorXd& weights,
                              Eigen::VectorXd& out) {
    std::vector<int> support;
    for (int j = 0; j < m; ++j) {
      if (weights[j] > 0) support.push_back(j);
    }
    const int na = static_cast<int>(support.size());
    if (na == 0) return false;
    Eigen::MatrixXd kkt(na + 1, na + 1);
    Eigen::VectorXd rhs(na + 1);
    for (int u = 0; u < na; ++u) {
      for (int v = 0; v < na; ++v) kkt(u, v) = G(support[u], support[v]);
      kkt(u, na) = 1.0;
      kkt(na, u) = 1.0;
      rhs[u] = c[support[u]];
    }
    kkt(na, na) = 0.0;
    rhs[na] = 1.0;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd solution = lu.solve(rhs);
    out = Eigen::VectorXd::Zero(m);
    for (int u = 0; u < na; ++u) out[support[u]] = solution[u];
    return true;
  };

  // active-set descent: jump to the face minimizer when feasible, otherwise
  // walk toward it until a weight hits zero and drops out of the support
  const auto refine_on_faces = [&](Eigen::VectorXd& weights) {
    for (int guard = 0; guard <= m; ++guard) {
      Eigen::VectorXd face;
      if (!face_solve(weights, face)) return;
      if ((face.array() >= 0.0).all()) {
        weights = face;
        return;
      }
      const Eigen::VectorXd dir = face - weights;
      double t = 1.0;
      for (int j = 0; j < m; ++j) {
        if (dir[j] < 0.0 && weights[j] > 0.0) {
          t = std::min(t, weights[j] / -dir[j]);
        }
      }
      weights += t * dir;
      for (int j = 0; j < m; ++j) {
        if (weights[j] < 1e-15) weights[j] = 0.0;
      }
    }
  };

  for (int it = 0; it < kMaxIterations; ++it) {
    const Eigen::VectorXd candidate = project_to_simplex(lambda - step * grad);
    const Eigen::VectorXd direction = candidate - lambda;
    if (direction.lpNorm<Eigen::Infinity>() == 0.0 && kkt_satisfied(lambda, grad)) {
      converged = true;
      break;
    }
    const Eigen::VectorXd g_dir = G * direction;
    const double curvature = direction.dot(g_dir);
    const double slope = grad.dot(direction);
    double stride = 1.0;
    if (curvature > 0) stride = std::clamp(-slope / curvature, 0.0, 1.0);
    lambda += stride * direction;
    grad += stride * g_dir;

    // Barzilai-Borwein step for the next iteration
    step = curvature > 0 ? direction.squaredNorm() / curvature : base_step;

    // subspace refinement once the support settles
    refine_on_faces(lambda);
    grad = G * lambda - c;

    const double next = distance_at(lambda);
    const bool settled = std::abs(next - dist) < 1e-12;
    dist = next;
    if (settled && kkt_satisfied(lambda, grad)) {
      converged = true;
      break;
    }
  }
  dist = distance_at(lambda);
  return {dist / norm_factor, converged};
}

HullDistance hull_distance(const VerificationCase& c) {
  c.validate();
  return hull_distance(c.ensemble, c.actual);
}

double sharpness(const Eigen::MatrixXd& ensemble) {
  const int m = static_cast<int>(ensemble.rows());
  if (m < 2) throw std::invalid_argument("sharpness: need at least 2 members");
  double diameter = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      diameter = std::max(diameter, (ensemble.row(i) - ensemble.row(j)).norm());
    }
  }
  return diameter;
}

double chi_square_p_value(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_p_value: dof must be >= 1");
  if (!(statistic >= 0)) {
    throw std::invalid_argument("chi_square_p_value: statistic must be >= 0");
  }
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

}  // namespace scengen
