#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "scengen/metrics.hpp"
#include "scengen/rng.hpp"

using namespace scengen;

namespace {

Eigen::MatrixXd points_from(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.begin()->size());
  Eigen::MatrixXd m(n, d);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

double tree_length_from_prufer(const Eigen::MatrixXd& points,
                               const std::vector<int>& prufer) {
  const int n = static_cast<int>(points.rows());
  std::vector<int> degree(n, 1);
  for (int v : prufer) ++degree[v];
  double total = 0.0;
  std::vector<bool> done(n, false);
  for (int v : prufer) {
    int leaf = -1;
    for (int u = 0; u < n; ++u) {
      if (degree[u] == 1 && !done[u]) {
        leaf = u;
        break;
      }
    }
    done[leaf] = true;
    --degree[leaf];
    --degree[v];
    total += (points.row(leaf) - points.row(v)).norm();
  }
  int first = -1;
  for (int u = 0; u < n; ++u) {
    if (degree[u] == 1 && !done[u]) {
      if (first < 0) {
        first = u;
      } else {
        total += (points.row(first) - points.row(u)).norm();
      }
    }
  }
  return total;
}

// exhaustive minimum over all n^(n-2) labelled spanning trees of K_n
double brute_force_mst(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  if (n == 2) return (points.row(0) - points.row(1)).norm();
  std::vector<int> prufer(n - 2, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    best = std::min(best, tree_length_from_prufer(points, prufer));
    int pos = static_cast<int>(prufer.size()) - 1;
    while (pos >= 0 && prufer[pos] == n - 1) {
      prufer[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++prufer[pos];
  }
  return best;
}

// closest point on a 2-D triangle (Ericson, Real-Time Collision Detection)
Eigen::Vector2d closest_point_on_triangle(const Eigen::Vector2d& p,
                                          const Eigen::Vector2d& a,
                                          const Eigen::Vector2d& b,
                                          const Eigen::Vector2d& c) {
  const Eigen::Vector2d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Eigen::Vector2d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Eigen::Vector2d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

TEST_CASE("mst_length hand cases") {
  CHECK(mst_length(points_from({{0, 0}, {1, 0}, {2, 0}})) == doctest::Approx(2.0));
  CHECK(mst_length(points_from({{0, 0}, {1, 0}, {1, 1}, {0, 1}})) ==
        doctest::Approx(3.0));
  CHECK_THROWS_AS(mst_length(Eigen::MatrixXd::Zero(1, 3)), std::invalid_argument);
}

TEST_CASE("mst_length equals brute-force enumeration on random sets") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));  // up to 6 points
    const int d = 1 + static_cast<int>(rng.below(3));
    Eigen::MatrixXd points(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) points(i, j) = 10 * rng.normal();
    }
    CHECK(mst_length(points) == doctest::Approx(brute_force_mst(points)).epsilon(1e-9));
  }
}

TEST_CASE("mst_length invariances") {
  Rng rng(5);
  Eigen::MatrixXd points(6, 2);
  for (int i = 0; i < 6; ++i) {
    points(i, 0) = rng.normal();
    points(i, 1) = rng.normal();
  }
  const double base = mst_length(points);

  // permutation
  Eigen::MatrixXd shuffled = points;
  shuffled.row(0).swap(shuffled.row(3));
  CHECK(mst_length(shuffled) == doctest::Approx(base).epsilon(1e-12));

  // rotation + translation
  const double angle = 0.7;
  Eigen::Matrix2d rot;
  rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  Eigen::MatrixXd moved = (points * rot.transpose()).rowwise() + Eigen::RowVector2d(3, -4);
  CHECK(mst_length(moved) == doctest::Approx(base).epsilon(1e-12));

  // scaling
  CHECK(mst_length(2.5 * points) == doctest::Approx(2.5 * base).epsilon(1e-12));
}

TEST_CASE("mst_rank hand cases") {
  VerificationCase outlier{points_from({{0, 0}, {1, 0}}), Eigen::Vector2d(10, 0)};
  CHECK(mst_rank(outlier, 1) == 1);  // lengths {1, 9, 10}

  VerificationCase central{points_from({{0, 0}, {1, 0}}), Eigen::Vector2d(0.5, 0)};
  CHECK(mst_rank(central, 1) == 3);  // lengths {1, 0.5, 0.5}

  VerificationCase tie{points_from({{0, 0}, {1, 0}}), Eigen::Vector2d(0, 0)};
  int at2 = 0, at3 = 0;
  const int trials = 2000;
  for (int s = 0; s < trials; ++s) {
    const int rank = mst_rank(tie, static_cast<std::uint64_t>(s));
    REQUIRE((rank == 2 || rank == 3));
    (rank == 2 ? at2 : at3)++;
  }
  // fair coin within 4 sigma
  CHECK(std::abs(at2 - trials / 2) < 4 * std::sqrt(trials * 0.25));
  CHECK(at2 + at3 == trials);
}

TEST_CASE("mst_rank is uniform when the actual is exchangeable") {
  Rng rng(31337);
  const int m = 5, trials = 10000;
  std::vector<int> ranks;
  ranks.reserve(trials);
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::MatrixXd ensemble(m, 2);
    for (int i = 0; i < m; ++i) {
      ensemble(i, 0) = rng.normal();
      ensemble(i, 1) = rng.normal();
    }
    Eigen::Vector2d actual(rng.normal(), rng.normal());
    ranks.push_back(mst_rank({ensemble, actual}, rng.next()));
  }
  const RankHistogram hist = rank_histogram(ranks, m);
  CHECK(hist.p_value > 0.01);
}

TEST_CASE("rank_histogram flatness statistics") {
  // perfectly uniform counts
  std::vector<int> uniform;
  for (int rank = 1; rank <= 6; ++rank) {
    for (int c = 0; c < 7; ++c) uniform.push_back(rank);
  }
  const RankHistogram flat = rank_histogram(uniform, 5);
  CHECK(flat.chi_square == doctest::Approx(0.0));
  CHECK(flat.p_value == doctest::Approx(1.0));
  CHECK(flat.counts == std::vector<long>(6, 7));

  // all ranks identical: chi^2 = n * m
  std::vector<int> clumped(22, 1);
  const RankHistogram spike = rank_histogram(clumped, 21);
  CHECK(spike.chi_square == doctest::Approx(462.0).epsilon(1e-12));
  CHECK(spike.p_value < 1e-20);

  CHECK_THROWS_AS(rank_histogram({0}, 5), std::invalid_argument);
  CHECK_THROWS_AS(rank_histogram({7}, 5), std::invalid_argument);
}

TEST_CASE("chi-square tail probabilities match reference values") {
  CHECK(chi_square_p_value(4.0, 1) == doctest::Approx(0.04550026389635857).epsilon(1e-10));
  CHECK(chi_square_p_value(3.0, 2) == doctest::Approx(0.22313016014842982).epsilon(1e-10));
  CHECK(chi_square_p_value(10.0, 10) == doctest::Approx(0.44049328506521257).epsilon(1e-10));
  CHECK(chi_square_p_value(25.0, 21) == doctest::Approx(0.24716407892265999).epsilon(1e-10));
  CHECK(chi_square_p_value(0.0, 7) == doctest::Approx(1.0));
}

TEST_CASE("closest_scenario picks the nearest member with tie to lowest index") {
  VerificationCase c{points_from({{0, 0}, {3, 3}}), Eigen::Vector2d(1, 1)};
  const auto [idx, err] = closest_scenario(c);
  CHECK(idx == 0);
  CHECK(err[0] == doctest::Approx(-1.0));
  CHECK(err[1] == doctest::Approx(-1.0));

  VerificationCase exact{points_from({{0, 0}, {1, 1}, {2, 2}}), Eigen::Vector2d(2, 2)};
  const auto [idx2, err2] = closest_scenario(exact);
  CHECK(idx2 == 2);
  CHECK(err2.norm() == 0.0);

  VerificationCase tie{points_from({{0, 1}, {0, -1}, {5, 5}}), Eigen::Vector2d(0, 0)};
  CHECK(closest_scenario(tie).first == 0);
}

TEST_CASE("horizon_errors hand fixture") {
  // closest errors (1,-1) and (3,1): ensembles built so those are the minima
  std::vector<VerificationCase> cases;
  cases.push_back({points_from({{1, -1}, {100, 100}}), Eigen::Vector2d(0, 0)});
  cases.push_back({points_from({{3, 1}, {100, 100}}), Eigen::Vector2d(0, 0)});
  const HorizonErrors errs = horizon_errors(cases);
  CHECK(errs.rmse[0] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK(errs.rmse[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(errs.mae[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(errs.mae[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(errs.bias[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(errs.bias[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("horizon_errors single case and exact-forecast limits") {
  std::vector<VerificationCase> one;
  one.push_back({points_from({{2, -3}, {50, 50}}), Eigen::Vector2d(0, 0)});
  const HorizonErrors errs = horizon_errors(one);
  CHECK(errs.rmse[0] == doctest::Approx(2.0));
  CHECK(errs.mae[1] == doctest::Approx(3.0));
  CHECK(errs.bias[1] == doctest::Approx(-3.0));

  std::vector<VerificationCase> zero;
  zero.push_back({points_from({{1, 2}, {1, 2}}), Eigen::Vector2d(1, 2)});
  zero.push_back({points_from({{4, 5}, {4, 5}}), Eigen::Vector2d(4, 5)});
  const HorizonErrors z = horizon_errors(zero);
  CHECK(z.rmse.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(z.mae.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(z.bias.lpNorm<Eigen::Infinity>() == 0.0);

  CHECK_THROWS_AS(horizon_errors({}), std::invalid_argument);
}

TEST_CASE("horizon error identities hold on random cases") {
  Rng rng(17);
  std::vector<VerificationCase> cases;
  for (int i = 0; i < 30; ++i) {
    Eigen::MatrixXd ensemble(4, 3);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 3; ++b) ensemble(a, b) = rng.normal();
    }
    Eigen::Vector3d actual(rng.normal(), rng.normal(), rng.normal());
    cases.push_back({ensemble, actual});
  }
  const HorizonErrors errs = horizon_errors(cases);
  for (int h = 0; h < 3; ++h) {
    CHECK(errs.mae[h] <= errs.rmse[h] + 1e-12);
    CHECK(std::abs(errs.bias[h]) <= errs.mae[h] + 1e-12);
  }
}

TEST_CASE("simplex projection") {
  const Eigen::VectorXd p = project_to_simplex(Eigen::Vector3d(0.2, 0.3, 0.5));
  CHECK((p - Eigen::Vector3d(0.2, 0.3, 0.5)).lpNorm<Eigen::Infinity>() < 1e-15);

  const Eigen::VectorXd q = project_to_simplex(Eigen::Vector3d(10, 0, 0));
  CHECK((q - Eigen::Vector3d(1, 0, 0)).lpNorm<Eigen::Infinity>() < 1e-15);

  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd v(5);
    for (int j = 0; j < 5; ++j) v[j] = 3 * rng.normal();
    const Eigen::VectorXd proj = project_to_simplex(v);
    CHECK((proj.array() >= -1e-15).all());
    CHECK(proj.sum() == doctest::Approx(1.0).epsilon(1e-12));
    // projection is the nearest simplex point: compare to random candidates
    for (int c = 0; c < 10; ++c) {
      Eigen::VectorXd candidate(5);
      double total = 0;
      for (int j = 0; j < 5; ++j) {
        candidate[j] = rng.uniform_open();
        total += candidate[j];
      }
      candidate /= total;
      CHECK((v - proj).norm() <= (v - candidate).norm() + 1e-12);
    }
  }
}

TEST_CASE("hull_distance membership cases") {
  const Eigen::MatrixXd S = points_from({{0, 0}, {1, 0}});
  CHECK(hull_distance(S, Eigen::Vector2d(1, 0)).value == doctest::Approx(0.0));
  CHECK(hull_distance(S, Eigen::Vector2d(0.25, 0)).value ==
        doctest::Approx(0.0).epsilon(1e-9));

  const HullDistance above = hull_distance(S, Eigen::Vector2d(0.5, 1));
  CHECK(above.value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(above.converged);

  // single member: plain distance, normalized
  CHECK(hull_distance(points_from({{3, 4}}), Eigen::Vector2d(0, 0)).value ==
        doctest::Approx(5.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("hull_distance matches exact point-to-triangle projection") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd tri(3, 2);
    for (int i = 0; i < 3; ++i) {
      tri(i, 0) = 5 * rng.normal();
      tri(i, 1) = 5 * rng.normal();
    }
    const Eigen::Vector2d p(5 * rng.normal(), 5 * rng.normal());
    const Eigen::Vector2d nearest = closest_point_on_triangle(
        p, tri.row(0).transpose(), tri.row(1).transpose(), tri.row(2).transpose());
    const double expected = (p - nearest).norm() / std::sqrt(2.0);
    const HullDistance hd = hull_distance(tri, p);
    CHECK(hd.value == doctest::Approx(expected).epsilon(1e-6));
    CHECK(std::abs(hd.value - expected) < 1e-6);
  }
}

TEST_CASE("hull_distance is zero exactly on hull membership") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd ensemble(4, 3);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 3; ++j) ensemble(i, j) = rng.normal();
    }
    // interior point: random convex combination
    Eigen::VectorXd lambda(4);
    double total = 0;
    for (int i = 0; i < 4; ++i) {
      lambda[i] = rng.uniform_open();
      total += lambda[i];
    }
    lambda /= total;
    const Eigen::VectorXd inside = ensemble.transpose() * lambda;
    CHECK(hull_distance(ensemble, inside).value < 1e-7);

    // outside: push past the farthest vertex along a random direction
    Eigen::Vector3d dir(rng.normal(), rng.normal(), rng.normal());
    dir.normalize();
    double reach = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
      reach = std::max(reach, ensemble.row(i).dot(dir.transpose()));
    }
    const Eigen::VectorXd outside = (reach + 1.0) * dir;
    CHECK(hull_distance(ensemble, outside).value > 1e-4);

    // hull distance times sqrt(q) never exceeds the closest member distance
    Eigen::Vector3d anywhere(rng.normal(), rng.normal(), rng.normal());
    double nearest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
      nearest = std::min(nearest, (ensemble.row(i).transpose() - anywhere).norm());
    }
    CHECK(hull_distance(ensemble, anywhere).value * std::sqrt(3.0) <= nearest + 1e-9);
  }
}

TEST_CASE("sharpness is the ensemble diameter") {
  CHECK(sharpness(points_from({{1, 1}, {1, 1}, {1, 1}})) == doctest::Approx(0.0));
  CHECK(sharpness(points_from({{0, 0}, {3, 4}, {0, 1}})) == doctest::Approx(5.0));
  CHECK_THROWS_AS(sharpness(points_from({{1, 1}})), std::invalid_argument);

  Rng rng(13);
  Eigen::MatrixXd ensemble(5, 3);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 3; ++j) ensemble(i, j) = rng.normal();
  }
  const double diameter = sharpness(ensemble);
  CHECK(diameter >= 0.0);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(diameter >= (ensemble.row(i) - ensemble.row(j)).norm() - 1e-12);
    }
  }
  Eigen::MatrixXd permuted(5, 3);
  const int order[5] = {4, 2, 0, 3, 1};
  for (int i = 0; i < 5; ++i) permuted.row(i) = ensemble.row(order[i]);
  CHECK(sharpness(permuted) == doctest::Approx(diameter).epsilon(1e-15));
}

TEST_CASE("verification case validation") {
  VerificationCase bad{Eigen::MatrixXd::Zero(1, 3), Eigen::VectorXd::Zero(3)};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  VerificationCase mismatch{Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS(mismatch.validate(), std::invalid_argument);
}
