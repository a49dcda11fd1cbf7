#pragma once

#include <span>

namespace forgan::eval {

// Point-wise errors between ground truth `x` and forecasts `x_hat`. All throw
// ContractError on empty or unequal-length inputs.

double rmse(std::span<const double> x, std::span<const double> x_hat);
double mae(std::span<const double> x, std::span<const double> x_hat);
/// Mean absolute percentage error, in percent. Throws ContractError if any x_i == 0.
double mape(std::span<const double> x, std::span<const double> x_hat);

}  // namespace forgan::eval
