#pragma once

#include <string>

namespace bsdelab {

enum class Regime { LambdaZero, LambdaSmall, LambdaHalf, LambdaLarge };

Regime regime_for_lambda(double lambda);
const char* regime_name(Regime r);
Regime regime_from_name(const std::string& name);

// delta = (lambda + 1/2) ^ 1, the y-growth log power
double growth_delta(double lambda);
// (lambda + 1/2) v (2 lambda), the psi log power
double psi_exponent(double lambda);

// k_lambda = 2^{2(lambda-1)^+ + 2 lambda - 1}
double k_lambda(double lambda);

}  // namespace bsdelab
