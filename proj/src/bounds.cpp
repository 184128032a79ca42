#include "heatpencil/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "heatpencil/error.hpp"

namespace heatpencil::bounds {

namespace {
constexpr double kPi = std::numbers::pi;
}

void BoundInputs::validate() const {
  require(m0 >= 0.0 && std::isfinite(m0), "M0 must be nonnegative");
  require(alpha0 > 0.0, "alpha0 must be positive");
  require(m >= 1, "model order M must be at least 1");
  require(t1 > 0.0 && ts > 0.0, "T1 and Ts must be positive");
  require(l >= 2, "pencil parameter L must be at least 2");
  require(sigma_m >= 0.0 && y1_norm >= 0.0 && y0_trunc_gap >= 0.0 && kappa_xm >= 0.0, "norms must be nonnegative");
  if (n <= 9) fail(ErrorCode::HypothesisViolated, "bounds require more than 9 samples (N > 9)");
}

double tail_bound(double m0, double alpha0, int m, double t) {
  require(m0 >= 0.0 && alpha0 > 0.0 && m >= 1 && t > 0.0, "tail bound inputs must be positive");
  const double mm = static_cast<double>(m);
  return (std::numbers::sqrt2 + 1.0 / (4.0 * mm * kPi * kPi * alpha0 * t)) * m0 *
         std::exp(-alpha0 * mm * mm * kPi * kPi * t);
}

double theta(double alpha0, int m, double ts) {
  const double mm = static_cast<double>(m);
  return 2.0 * alpha0 * mm * mm * kPi * kPi * ts;
}

double m_theta_l(double theta, int l) {
  require(theta > 0.0 && l >= 2, "M_theta_L needs theta > 0 and L >= 2");
  const double lm1 = static_cast<double>(l - 1);
  if (theta >= 1.0) return std::exp(-theta);
  if (theta > 1.0 / lm1) return 2.0 / theta * std::exp(-1.0);
  return lm1 * std::exp(-lm1 * theta);
}

bool m_theta_l_near_breakpoint(double theta, int l) {
  const double low = 1.0 / static_cast<double>(l - 1);
  return std::abs(theta - 1.0) <= 0.01 || std::abs(theta - low) <= 0.01 * low;
}

FrobeniusBounds frobenius_bounds(const BoundInputs& in) {
  in.validate();
  const double th = theta(in.alpha0, in.m, in.ts);
  const double prefactor = tail_bound(in.m0, in.alpha0, in.m, in.t1);
  const double inv = 1.0 / th;
  return {prefactor * std::sqrt(m_theta_l(th, in.l) + (1.0 + inv) * (1.0 + inv)),
          prefactor * std::sqrt(m_theta_l(th, in.l + 1) + inv * (1.0 + inv) * std::exp(-th))};
}

double rho(const BoundInputs& in) {
  in.validate();
  require(in.sigma_m > 0.0, "rho requires sigma_M > 0");
  return (in.y0_trunc_gap + frobenius_bounds(in).y0) / in.sigma_m;
}

PoleBound pole_error_bound(const BoundInputs& in) {
  const double r = rho(in);
  if (!(r < 1.0)) {
    std::ostringstream msg;
    msg << "certificate unavailable (rho = " << r << " >= 1)";
    fail(ErrorCode::CertificateUnavailable, msg.str());
  }
  const FrobeniusBounds frob = frobenius_bounds(in);
  const double scale = in.kappa_xm / (in.sigma_m * (1.0 - r));

  PoleBound out;
  out.general = scale * (kGoldenRatio * r * in.y1_norm + frob.y1);
  const double th = theta(in.alpha0, in.m, in.ts);
  if (th > 1.0 / static_cast<double>(in.l - 1)) {
    out.special = scale * r * (kGoldenRatio * in.y1_norm + in.sigma_m);
  }
  out.value = out.special.value_or(out.general);
  return out;
}

AlphaBound alpha_error_bound(double pole_bound, double z_tilde, double ts, int mode_index) {
  require(pole_bound >= 0.0 && z_tilde > 0.0 && ts > 0.0, "alpha bound inputs must be positive");
  if (mode_index == 0) fail(ErrorCode::Domain, "mode 0 carries no information about alpha");
  require(mode_index > 0, "mode index must be positive");
  AlphaBound out;
  out.eigenvalue_bound = pole_bound / (ts * z_tilde);
  const double nn = static_cast<double>(mode_index);
  out.alpha_bound = out.eigenvalue_bound / (nn * nn * kPi * kPi);
  out.substitution_justified = pole_bound <= 0.1 * z_tilde;
  return out;
}

double kappa(const linalg::ComplexMatrix& x) {
  require(x.rows() == x.cols() && x.rows() > 0, "kappa needs a nonempty square matrix");
  Eigen::JacobiSVD<linalg::ComplexMatrix> svd(x);
  const auto& s = svd.singularValues();
  const double smax = s(0), smin = s(s.size() - 1);
  if (!(smin > 1e3 * std::numeric_limits<double>::epsilon() * smax)) {
    fail(ErrorCode::Defective, "eigenvector matrix is numerically singular (non-diagonalizable pencil)");
  }
  return smax / smin;
}

double kappa(const linalg::Matrix& x) { return kappa(linalg::ComplexMatrix(x.cast<std::complex<double>>())); }

std::optional<std::pair<double, double>> ErrorCertificate::alpha_interval() const {
  if (!alpha_hat || !alpha_bound) return std::nullopt;
  return std::make_pair(*alpha_hat - *alpha_bound, *alpha_hat + *alpha_bound);
}

ErrorCertificate certify(const BoundInputs& in, std::optional<double> alpha_hat, std::span<const ModeInput> modes) {
  in.validate();
  ErrorCertificate c;
  c.inputs = in;
  c.theta = theta(in.alpha0, in.m, in.ts);
  c.m_theta_l = m_theta_l(c.theta, in.l);
  c.m_theta_l1 = m_theta_l(c.theta, in.l + 1);
  c.special_branch = c.theta > 1.0 / static_cast<double>(in.l - 1);
  c.near_breakpoint = m_theta_l_near_breakpoint(c.theta, in.l);
  if (c.near_breakpoint) c.warnings.push_back("theta lies within 1% of a breakpoint of M_theta_L");
  c.tail_bound = tail_bound(in.m0, in.alpha0, in.m, in.t1);
  const FrobeniusBounds frob = frobenius_bounds(in);
  c.frob_y0 = frob.y0;
  c.frob_y1 = frob.y1;
  c.rho = rho(in);
  c.pole = pole_error_bound(in);
  c.alpha_hat = alpha_hat;

  for (const ModeInput& mode : modes) {
    ModeBound mb;
    mb.index = mode.index;
    mb.pole = mode.pole;
    mb.eigenvalue_bound = c.pole.value / (in.ts * mode.pole);
    mb.substitution_justified = c.pole.value <= 0.1 * mode.pole;
    if (mode.index > 0) {
      const AlphaBound ab = alpha_error_bound(c.pole.value, mode.pole, in.ts, mode.index);
      mb.alpha_bound = ab.alpha_bound;
      if (ab.substitution_justified && (!c.alpha_bound || ab.alpha_bound < *c.alpha_bound)) {
        c.alpha_bound = ab.alpha_bound;
        c.alpha_bound_mode = mode.index;
      }
    }
    if (!mb.substitution_justified) {
      std::ostringstream msg;
      msg << "pole bound exceeds 10% of pole " << mode.pole << "; z-bar substitution is not justified";
      c.warnings.push_back(msg.str());
    }
    c.modes.push_back(mb);
  }
  return c;
}

}  // namespace heatpencil::bounds
