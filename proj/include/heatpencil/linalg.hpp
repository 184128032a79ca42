#pragma once

// Small dense helpers over Eigen shared by the pencil, pipeline and bounds
// modules.

#include <Eigen/Dense>

namespace heatpencil::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

// Descending singular values.
Vector singular_values(const Matrix& a);

double spectral_norm(const Matrix& a);
double spectral_norm(const ComplexMatrix& a);

// max(rows, cols) * eps * sigma_1, the usual numerical-rank cutoff.
double rank_tolerance(const Vector& singular_values, Index rows, Index cols);
int numerical_rank(const Vector& singular_values, Index rows, Index cols);

// Moore-Penrose inverse. rank < 0 uses the numerical rank; otherwise the
// expansion is truncated to the leading `rank` singular triplets.
Matrix pseudo_inverse(const Matrix& a, int rank = -1);

}  // namespace heatpencil::linalg
