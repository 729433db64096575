#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "scengen/model.hpp"

namespace scengen {

/// One verification unit: an ensemble (rows are scenarios) and the observed
/// target, both in physical units.
struct VerificationCase {
  Eigen::MatrixXd ensemble;  // m x q, m >= 2
  Eigen::VectorXd actual;    // length q

  void validate() const;
};

/// Total Euclidean edge length of a minimum spanning tree over the rows of
/// `points` (Prim on the dense distance matrix). Requires n >= 2.
double mst_length(const Eigen::MatrixXd& points);

/// Rank of the scenarios-only MST length among the m+1 lengths obtained by
/// replacing each member in turn with the actual target; ascending, ties
/// broken uniformly at random from tie_seed. Result in 1..m+1.
int mst_rank(const VerificationCase& c, std::uint64_t tie_seed);

struct RankHistogram {
  std::vector<long> counts;  // length m+1
  double chi_square = 0;
  double p_value = 1;
};

/// Bins ranks in 1..m+1 and tests flatness: chi_square against the uniform
/// expectation, p-value from the chi-square distribution with m dof.
RankHistogram rank_histogram(const std::vector<int>& ranks, int m);

/// Index of the scenario closest to the actual (full-window Euclidean
/// distance, ties to the lowest index) and its error vector
/// scenario - actual.
std::pair<int, Eigen::VectorXd> closest_scenario(const VerificationCase& c);

struct HorizonErrors {
  Eigen::VectorXd rmse;
  Eigen::VectorXd mae;
  Eigen::VectorXd bias;  // forecast - actual: positive means over-forecast
};

/// Per-horizon RMSE / MAE / bias of the closest-scenario errors across cases.
HorizonErrors horizon_errors(const std::vector<VerificationCase>& cases);

struct HullDistance {
  double value = 0;  // optimal distance / sqrt(q)
  bool converged = true;
};

/// Distance from the actual target to the convex hull of the scenarios:
/// min over the simplex of ||ensemble^T lambda - actual||, solved by
/// projected gradient with exact sort-based simplex projection, normalized
/// by sqrt(q). Requires m >= 1.
HullDistance hull_distance(const Eigen::MatrixXd& ensemble,
                           const Eigen::VectorXd& actual);
HullDistance hull_distance(const VerificationCase& c);

/// Exact Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Ensemble diameter: the largest pairwise Euclidean distance. m >= 2.
double sharpness(const Eigen::MatrixXd& ensemble);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_p_value(double statistic, int dof);

}  // namespace scengen
