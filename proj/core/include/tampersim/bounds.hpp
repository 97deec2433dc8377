#pragma once

#include <functional>
#include <vector>

namespace tampersim {

/// Attainable attacked expectation for a p-covering attack on a bounded
/// objective: mu^(-p) * E[f^(1+p)]. Lower-bounds the covering-averaged value.
double tampering_bound(double mu, double moment_1p, double p);

/// Boolean specialization of tampering_bound: mu^(1-p).
double boolean_bound(double mu, double p);

/// Lower bound on the gap tampering_bound - mu in terms of the variance:
/// p*(p+1)*nu / (2*mu^p).
double jensen_gap_bound(double mu, double nu, double p);

/// Weaker mu-free form of the same gap: (p/2)*nu.
double jensen_gap_bound_weak(double nu, double p);

/// Multi-party confidence degradation target: (1 - p*k/m)*conf + eps.
double mpp_confidence_bound(double conf, double p, int k, int m, double eps);

/// Multi-party average-error target: err + (p*k/(2m))*nu - eps, with nu the
/// variance of the output hypothesis risk under the honest protocol.
double mpp_error_bound(double err, double nu, double p, int k, int m, double eps);

/// Targeted-example error target under Boolean loss:
/// err_d + (p*k/m)*(1 - err_d) - eps.
double mpp_targeted_bound(double err_d, double p, int k, int m, double eps);

/// Finite law over values in [0, 1].
struct ValueLaw {
  std::vector<double> values;
  std::vector<double> probs;
};

double law_mean(const ValueLaw& law);
double law_variance(const ValueLaw& law);
double law_power_moment(const ValueLaw& law, double exponent);

struct JensenGapResult {
  double gap = 0.0;          // E[phi(a)] - phi(mu)
  double lower_bound = 0.0;  // Var[a] * inf h_mu
  double inf_h = 0.0;
};

/// Lower bound for the Jensen gap of a twice-differentiable phi on [0,1]:
/// E[phi(a)] - phi(mu) >= Var[a] * inf_a h_mu(a), with
/// h_mu(a) = (phi(a) - phi(mu) - phi'(mu)(a - mu)) / (a - mu)^2.
/// The infimum is taken over a dense grid; at the removable singularity a=mu
/// the limit phi''(mu)/2 is inserted when a second derivative is supplied,
/// otherwise that grid point is skipped.
JensenGapResult jensen_gap_generic(const std::function<double(double)>& phi,
                                   const std::function<double(double)>& dphi,
                                   const ValueLaw& law,
                                   const std::function<double(double)>& d2phi = nullptr,
                                   int grid_points = 10000);

}  // namespace tampersim
