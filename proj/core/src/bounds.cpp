#include "tampersim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tampersim/errors.hpp"

namespace tampersim {

double tampering_bound(double mu, double moment_1p, double p) {
  if (mu <= 0.0) throw ZeroMu("tampering_bound: mu must be positive");
  return std::pow(mu, -p) * moment_1p;
}

double boolean_bound(double mu, double p) {
  if (mu <= 0.0) throw ZeroMu("boolean_bound: mu must be positive");
  return std::pow(mu, 1.0 - p);
}

double jensen_gap_bound(double mu, double nu, double p) {
  if (mu <= 0.0) throw ZeroMu("jensen_gap_bound: mu must be positive");
  return p * (p + 1.0) * nu / (2.0 * std::pow(mu, p));
}

double jensen_gap_bound_weak(double nu, double p) { return 0.5 * p * nu; }

double mpp_confidence_bound(double conf, double p, int k, int m, double eps) {
  const double q = p * static_cast<double>(k) / static_cast<double>(m);
  return (1.0 - q) * conf + eps;
}

double mpp_error_bound(double err, double nu, double p, int k, int m, double eps) {
  const double q = p * static_cast<double>(k) / static_cast<double>(m);
  return err + 0.5 * q * nu - eps;
}

double mpp_targeted_bound(double err_d, double p, int k, int m, double eps) {
  const double q = p * static_cast<double>(k) / static_cast<double>(m);
  return err_d + q * (1.0 - err_d) - eps;
}

namespace {

void check_law(const ValueLaw& law) {
  if (law.values.empty() || law.values.size() != law.probs.size()) {
    throw ValidationError("value law needs matching nonempty values and probs");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    if (law.values[i] < 0.0 || law.values[i] > 1.0) {
      throw OutOfRange("value law support must lie in [0,1]");
    }
    if (law.probs[i] < 0.0) throw OutOfRange("value law has a negative probability");
    total += law.probs[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("value law probabilities sum to " + std::to_string(total));
  }
}

}  // namespace

double law_mean(const ValueLaw& law) {
  check_law(law);
  double acc = 0.0;
  for (std::size_t i = 0; i < law.values.size(); ++i) acc += law.probs[i] * law.values[i];
  return acc;
}

double law_variance(const ValueLaw& law) {
  const double mu = law_mean(law);
  double second = 0.0;
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    second += law.probs[i] * law.values[i] * law.values[i];
  }
  return std::max(0.0, second - mu * mu);
}

double law_power_moment(const ValueLaw& law, double exponent) {
  check_law(law);
  double acc = 0.0;
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    acc += law.probs[i] * std::pow(law.values[i], exponent);
  }
  return acc;
}

JensenGapResult jensen_gap_generic(const std::function<double(double)>& phi,
                                   const std::function<double(double)>& dphi,
                                   const ValueLaw& law,
                                   const std::function<double(double)>& d2phi,
                                   int grid_points) {
  if (!phi || !dphi) throw ValidationError("jensen_gap_generic needs phi and its derivative");
  if (grid_points < 2) throw OutOfRange("jensen_gap_generic: need at least 2 grid points");
  const double mu = law_mean(law);
  const double var = law_variance(law);

  JensenGapResult out;
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    out.gap += law.probs[i] * phi(law.values[i]);
  }
  out.gap -= phi(mu);

  const double slope = dphi(mu);
  const double phi_mu = phi(mu);
  double inf_h = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid_points; ++g) {
    const double a = static_cast<double>(g) / static_cast<double>(grid_points - 1);
    const double d = a - mu;
    if (std::abs(d) < 1e-7) {
      if (d2phi) inf_h = std::min(inf_h, 0.5 * d2phi(mu));
      continue;
    }
    inf_h = std::min(inf_h, (phi(a) - phi_mu - slope * d) / (d * d));
  }
  out.inf_h = inf_h;
  out.lower_bound = var * inf_h;
  return out;
}

}  // namespace tampersim
