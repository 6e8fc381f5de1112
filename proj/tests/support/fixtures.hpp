#pragma once

// Shared inputs: the six-node circle model and its published summaries.

#include <Eigen/Dense>

#include "bdg/graph.hpp"

namespace bdg::fixture {

inline Eigen::MatrixXd six_node_k() {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(6, 6);
  for (int i = 0; i < 5; ++i) k(i, i + 1) = k(i + 1, i) = 0.5;
  k(0, 5) = k(5, 0) = 0.4;
  return k;
}

inline Graph six_node_graph() { return Graph::parse("6;0-1,0-5,1-2,2-3,3-4,4-5"); }

inline Eigen::MatrixXd upper_to_full(const double (&u)[6][6]) {
  Eigen::MatrixXd m(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) m(i, j) = m(j, i) = u[i][j];
  return m;
}

inline Eigen::MatrixXd six_node_phat() {
  static const double u[6][6] = {{0, 0.98, 0.05, 0.02, 0.03, 0.92}, {0, 0, 0.99, 0.04, 0.01, 0.04},
                                 {0, 0, 0, 0.99, 0.04, 0.02},       {0, 0, 0, 0, 0.99, 0.06},
                                 {0, 0, 0, 0, 0, 0.98},             {0, 0, 0, 0, 0, 0}};
  return upper_to_full(u);
}

inline Eigen::MatrixXd six_node_khat() {
  static const double u[6][6] = {{1.16, 0.58, -0.01, 0.00, -0.01, 0.44}, {0, 1.18, 0.58, -0.01, 0.00, -0.01},
                                 {0, 0, 1.18, 0.58, -0.01, 0.00},        {0, 0, 0, 1.18, 0.58, -0.01},
                                 {0, 0, 0, 0, 1.17, 0.57},               {0, 0, 0, 0, 0, 1.16}};
  return upper_to_full(u);
}

inline constexpr double kSixNodeTrueGraphProb = 0.66;
inline constexpr double kSixNodeCE = 0.47;

}  // namespace bdg::fixture
