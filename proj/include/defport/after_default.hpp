#pragma once
// Closed-form solution of the post-default problem (complete market, CRRA,
// coefficients frozen at the default time) for both information types.

#include "defport/model.hpp"

namespace defport::after_default {

// Value multiplier K(theta): the post-default value is K(theta) * U(x).
//   K(theta) = exp( p/(2(1-p)) * (mu1/sigma1)^2 * (T - theta) )
double value_multiplier(const Model& m, double theta);

// Progressively informed counterpart: lambda * exp(-lambda*theta) * K(theta).
// The ratio to K is the barrier density at the realized level times the
// intensity, independent of preferences and of the coefficient profile.
double investor_multiplier(const Model& m, double theta);

// Optimal constant fraction on [theta, T]: mu1 / ((1-p) sigma1^2).
double merton_fraction(const Model& m, double theta);

// Post-default value started from wealth x at theta: K(theta) * x^p / p.
double insider_value(const Model& m, double theta, double x);

// Remaining-horizon multiplier at time t >= theta along the post-default
// regime (equals value_multiplier at t == theta evaluated with the theta
// coefficients held fixed).
double remaining_multiplier(const Model& m, double theta, double t);

// Expected-utility growth rate per unit time of holding a constant fraction
// nu on the post-default coefficients: p*(nu*mu1 - (1-p)/2 * nu^2 * sigma1^2).
double log_moment_rate(const Model& m, double theta, double nu);

}  // namespace defport::after_default
