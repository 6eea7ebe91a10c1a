#include "morsegpe/core_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "morsegpe/error.hpp"

namespace morsegpe {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoBoundState: return "NoBoundState";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::NoThreshold: return "NoThreshold";
    case ErrorKind::WidthCollapse: return "WidthCollapse";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::Indeterminate: return "Indeterminate";
    case ErrorKind::GridTooNarrow: return "GridTooNarrow";
    case ErrorKind::NormDrift: return "NormDrift";
    case ErrorKind::BoundaryLeak: return "BoundaryLeak";
    case ErrorKind::UnboundDrift: return "UnboundDrift";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

constexpr double kMaxExpArg = 690.0;  // exp(690) ~ 1e299

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double saturating_exp(double arg) noexcept {
  if (std::isnan(arg)) return kSaturated;
  if (arg >= kMaxExpArg) return kSaturated;
  return std::exp(arg);
}

void MorseParams::validate() const {
  require(positive_finite(depth), "MorseParams: depth D must be > 0");
  require(positive_finite(inv_length), "MorseParams: a must be > 0");
  require(positive_finite(mass), "MorseParams: mass must be > 0");
  require(positive_finite(hbar), "MorseParams: hbar must be > 0");
}

double MorseParams::depth_parameter() const {
  validate();
  const double K = std::sqrt(2.0 * mass * depth) / (hbar * inv_length);
  require(positive_finite(K), "MorseParams: K is not finite");
  return K;
}

double gamma_to_lambda(double gamma, double K) {
  require(positive_finite(K), "K must be > 0");
  return std::sqrt(2.0 * std::numbers::pi) * gamma * K * K / 2.0;
}

double lambda_to_gamma(double lambda, double K) {
  require(positive_finite(K), "K must be > 0");
  return lambda * 2.0 / (std::sqrt(2.0 * std::numbers::pi) * K * K);
}

ScaledParams::ScaledParams(double K, double gamma, double lambda, double delta0,
                           double p0)
    : K_(K), gamma_(gamma), lambda_(lambda), delta0_(delta0), p0_(p0) {
  require(positive_finite(K), "ScaledParams: K must be > 0");
  require(std::isfinite(gamma) && std::isfinite(lambda),
          "ScaledParams: coupling must be finite");
  require(positive_finite(delta0), "ScaledParams: delta0 must be > 0");
  require(std::isfinite(p0) && p0 >= 0.0, "ScaledParams: p0 must be >= 0");
}

ScaledParams ScaledParams::from_gamma(double K, double gamma, double delta0,
                                      double p0) {
  return ScaledParams(K, gamma, gamma_to_lambda(gamma, K), delta0, p0);
}

ScaledParams ScaledParams::from_lambda(double K, double lambda, double delta0,
                                       double p0) {
  return ScaledParams(K, lambda_to_gamma(lambda, K), lambda, delta0, p0);
}

ScaledParams ScaledParams::with_p0(double p0) const {
  return ScaledParams(K_, gamma_, lambda_, delta0_, p0);
}

ScaledParams ScaledParams::with_delta0(double delta0) const {
  return ScaledParams(K_, gamma_, lambda_, delta0, p0_);
}

ScaledParams scale_params(const MorseParams& phys, double g, double delta0_phys,
                          double p0_phys) {
  const double K = phys.depth_parameter();
  require(std::isfinite(g), "coupling g must be finite");
  const double gamma =
      phys.inv_length * g / (std::sqrt(2.0 * std::numbers::pi) * phys.depth);
  const double delta0 = phys.inv_length * delta0_phys;
  const double p0 = p0_phys / std::sqrt(phys.mass * phys.depth);
  return ScaledParams::from_gamma(K, gamma, delta0, p0);
}

double morse_potential(double x) noexcept {
  if (x < 0.0 && -2.0 * x >= kMaxExpArg) return kSaturated;
  const double y = std::exp(-x);
  return y * y - 2.0 * y;
}

double morse_force(double x) noexcept {
  if (x < 0.0 && -2.0 * x >= kMaxExpArg) return -kSaturated;
  const double y = std::exp(-x);
  return -2.0 * y * y + 2.0 * y;
}

double gaussian_exp_moment(double x0, double delta, int k) {
  require(k == 1 || k == 2, "gaussian_exp_moment: k must be 1 or 2");
  require(positive_finite(delta), "gaussian_exp_moment: delta must be > 0");
  const double kk = static_cast<double>(k);
  return saturating_exp(-kk * x0 + kk * kk * delta * delta / 4.0);
}

double quartic_norm(double delta) {
  require(positive_finite(delta), "quartic_norm: delta must be > 0");
  return 1.0 / (std::sqrt(2.0 * std::numbers::pi) * delta);
}

double initial_energy(const ScaledParams& sp) {
  const double K = sp.K();
  const double d = sp.delta0();
  const double p = sp.p0();
  const double spread = 1.0 / (2.0 * K * K * d);
  const double trap = std::exp(d * d) - 2.0 * std::exp(d * d / 4.0);
  return spread + p * p / 2.0 + trap + sp.gamma() / d;
}

}  // namespace morsegpe
