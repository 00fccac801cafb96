#pragma once

// Independent reference computations used by several tests.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXcd;

// Classic RK4 for d rho / dt = -i[H, rho] + sum_k L rho L^dag - 1/2 {L^dag L, rho}.
inline Mat lindblad_rk4(const Mat& H, const std::vector<Mat>& Ls, Mat rho, double t, int steps) {
  const std::complex<double> I(0, 1);
  Mat LdL = Mat::Zero(H.rows(), H.cols());
  for (const auto& L : Ls) LdL += L.adjoint() * L;
  auto f = [&](const Mat& r) {
    Mat d = -I * (H * r - r * H) - 0.5 * (LdL * r + r * LdL);
    for (const auto& L : Ls) d += L * r * L.adjoint();
    return d;
  };
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Mat k1 = f(rho), k2 = f(rho + 0.5 * h * k1), k3 = f(rho + 0.5 * h * k2), k4 = f(rho + h * k3);
    rho += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return rho;
}

// exp(A) by scaling and squaring of a 20-term Taylor series.
inline Mat expm_taylor(const Mat& A) {
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::pow(2.0, s) > 0.25) ++s;
  const Mat B = A / std::pow(2.0, s);
  Mat term = Mat::Identity(A.rows(), A.cols()), sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = term * B / double(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

inline Mat annihilation(int n) {
  Mat a = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

}  // namespace oracle
