#include "heatpencil/linalg.hpp"

#include <algorithm>
#include <limits>

namespace heatpencil::linalg {

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

double rank_tolerance(const Vector& sv, Index rows, Index cols) {
  if (sv.size() == 0) return 0.0;
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sv(0);
}

int numerical_rank(const Vector& sv, Index rows, Index cols) {
  const double tol = rank_tolerance(sv, rows, cols);
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  return rank;
}

Matrix pseudo_inverse(const Matrix& a, int rank) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const int r = rank < 0 ? numerical_rank(s, a.rows(), a.cols()) : std::min<int>(rank, static_cast<int>(s.size()));
  Matrix out = Matrix::Zero(a.cols(), a.rows());
  for (int i = 0; i < r; ++i) {
    if (s(i) == 0.0) break;
    out.noalias() += svd.matrixV().col(i) * (1.0 / s(i)) * svd.matrixU().col(i).transpose();
  }
  return out;
}

}  // namespace heatpencil::linalg
