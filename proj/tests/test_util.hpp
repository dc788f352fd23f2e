#pragma once

#include <string>
#include <vector>

#include "oqkd/codebook.hpp"
#include "oqkd/state_vector.hpp"

namespace oqkd::testutil {

// Haar-ish random state: normalized complex gaussian entries.
inline StateVector random_state(int qubits, Rng& rng,
                                std::vector<QubitLabel> labels = {}) {
  if (labels.empty())
    for (int i = 0; i < qubits; ++i) labels.push_back("q" + std::to_string(i));
  Eigen::VectorXcd v(Eigen::Index{1} << qubits);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = Complex(rng.gaussian(), rng.gaussian());
  v /= v.norm();
  return StateVector(std::move(v), std::move(labels));
}

// Random full basis on m qubits from the QR of a gaussian matrix.
inline OrthonormalBasis random_basis(int m, Rng& rng) {
  const Eigen::Index d = Eigen::Index{1} << m;
  Eigen::MatrixXcd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  std::vector<StateVector> vectors;
  std::vector<std::string> names;
  std::vector<QubitLabel> labels;
  for (int i = 0; i < m; ++i) labels.push_back("q" + std::to_string(i));
  for (Eigen::Index c = 0; c < d; ++c) {
    vectors.emplace_back(q.col(c), labels);
    names.push_back("v" + std::to_string(c));
  }
  return OrthonormalBasis(std::move(vectors), std::move(names));
}

inline Eigen::VectorXcd amps(std::initializer_list<Complex> values) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const auto& x : values) v(i++) = x;
  return v;
}

}  // namespace oqkd::testutil
