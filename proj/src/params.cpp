#include "faraday/params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "faraday/errors.hpp"

namespace faraday {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string("params.") + name + " must be positive and finite");
  }
}

}  // namespace

OscillationProfile::OscillationProfile(double c0, std::vector<double> a, std::vector<double> b)
    : c0_(c0), a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() < b_.size()) a_.resize(b_.size(), 0.0);
  if (b_.size() < a_.size()) b_.resize(a_.size(), 0.0);
}

OscillationProfile OscillationProfile::cosine(double delta) {
  // cos(2 pi s - delta) = cos(delta) cos(2 pi s) + sin(delta) sin(2 pi s)
  return OscillationProfile(0.0, {std::cos(delta)}, {std::sin(delta)});
}

OscillationProfile OscillationProfile::fourier(double c0, std::vector<double> cos_coeffs,
                                               std::vector<double> sin_coeffs) {
  OscillationProfile f(c0, std::move(cos_coeffs), std::move(sin_coeffs));
  bool constant = true;
  for (std::size_t n = 0; n < f.a_.size(); ++n) {
    if (f.a_[n] != 0.0 || f.b_[n] != 0.0) constant = false;
  }
  if (constant) throw ConfigError("profile: oscillation profile must be non-constant");
  // Dense sampling bounds max|f| to within the spacing times max|f'|.
  constexpr int kSamples = 4096;
  double max_abs = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    max_abs = std::max(max_abs, std::abs(f.value(static_cast<double>(i) / kSamples)));
  }
  if (max_abs > 1.0 + 1e-12) throw ConfigError("profile: max |f| must not exceed 1");
  return f;
}

double OscillationProfile::derivative(double s, int order) const {
  if (order < 0 || order > 3) throw ContractError("profile derivative order must be in 0..3");
  double sum = order == 0 ? c0_ : 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    const double w = kTwoPi * static_cast<double>(i + 1);
    const double c = std::cos(w * s);
    const double sn = std::sin(w * s);
    const double scale = std::pow(w, order);
    // d^k/ds^k of (a cos + b sin) cycles through (a cos + b sin), (-a sin + b cos), ...
    switch (order) {
      case 0: sum += a_[i] * c + b_[i] * sn; break;
      case 1: sum += scale * (-a_[i] * sn + b_[i] * c); break;
      case 2: sum += scale * (-a_[i] * c - b_[i] * sn); break;
      case 3: sum += scale * (a_[i] * sn - b_[i] * c); break;
    }
  }
  return sum;
}

void Params::validate() const {
  require_positive(L1, "L1");
  require_positive(L2, "L2");
  require_positive(b, "b");
  require_positive(g, "g");
  require_positive(mu, "mu");
  require_positive(omega, "omega");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("params.sigma must be >= 0");
  if (!(amp >= 0.0) || !std::isfinite(amp)) throw ConfigError("params.amp must be >= 0");
}

}  // namespace faraday
