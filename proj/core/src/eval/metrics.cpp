#include "forgan/eval/metrics.hpp"

#include <cmath>
#include <string>

#include "forgan/error.hpp"

namespace forgan::eval {
namespace {

void check(std::span<const double> x, std::span<const double> x_hat, const char* name) {
    if (x.empty()) throw ContractError(std::string(name) + ": empty input");
    if (x.size() != x_hat.size()) {
        throw ContractError(std::string(name) + ": length mismatch (" + std::to_string(x.size()) + " vs " +
                            std::to_string(x_hat.size()) + ")");
    }
}

}  // namespace

double rmse(std::span<const double> x, std::span<const double> x_hat) {
    check(x, x_hat, "rmse");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = x[i] - x_hat[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(x.size()));
}

double mae(std::span<const double> x, std::span<const double> x_hat) {
    check(x, x_hat, "mae");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i] - x_hat[i]);
    return sum / static_cast<double>(x.size());
}

double mape(std::span<const double> x, std::span<const double> x_hat) {
    check(x, x_hat, "mape");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) throw ContractError("mape: ground truth value " + std::to_string(i) + " is zero");
        sum += std::abs(100.0 * (x[i] - x_hat[i]) / x[i]);
    }
    return sum / static_cast<double>(x.size());
}

}  // namespace forgan::eval
