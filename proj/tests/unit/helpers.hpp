#pragma once

#include <random>

#include "hfcheck/fockspace.hpp"
#include "hfcheck/hartreefock.hpp"
#include "oracles.hpp"

namespace testutil {

using Rng = std::mt19937_64;

inline Eigen::MatrixXcd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = {g(rng), g(rng)};
  }
  return a;
}

inline Eigen::VectorXcd random_unit(Rng& rng, Eigen::Index n) {
  return random_matrix(rng, n, 1).col(0).normalized();
}

inline hfcheck::OrbitalSet random_orbitals(Rng& rng, int m, int n) {
  return hfcheck::OrbitalSet(hfcheck::reorthonormalize(random_matrix(rng, m, n)));
}

inline Eigen::MatrixXcd random_hermitian(Rng& rng, Eigen::Index n) {
  const Eigen::MatrixXcd a = random_matrix(rng, n, n);
  return 0.5 * (a + a.adjoint());
}

inline double max_abs(const Eigen::MatrixXcd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

inline std::vector<oracle::Coefficient> to_oracle(const std::vector<hfcheck::Potential::Term>& terms) {
  std::vector<oracle::Coefficient> out;
  for (const auto& t : terms) {
    out.push_back({t.p, t.v});
    bool zero = true;
    std::vector<int> mp;
    for (int c : t.p) {
      mp.push_back(-c);
      zero = zero && c == 0;
    }
    if (!zero) out.push_back({mp, t.v});
  }
  return out;
}

}  // namespace testutil
