#include "pcn/economics.hpp"

#include <cmath>
#include <stdexcept>

namespace pcn {

double fee(const EconomicParams& p, double amount) {
  if (amount < 0) throw std::invalid_argument("fee: negative amount");
  return p.base_fee + p.fee_rate * amount;
}

double opportunity_cost(double rate, double t, double val,
                        const EconomicParams& p) {
  if (rate < 0 || t < 0 || val < 0)
    throw std::invalid_argument("opportunity_cost: negative input");
  if (p.per_tx_val <= 0) throw std::invalid_argument("per_tx_val must be > 0");
  const auto trunc = static_cast<std::int64_t>(
      std::floor(val / static_cast<double>(p.per_tx_val)));
  const double lambda = rate * t;
  if (trunc <= 0 || lambda <= 0.0) return 0.0;

  // E(X) = sum_{x=0}^{J} x * e^{-lambda} lambda^x / x!
  double mean = 0.0;
  if (lambda < 700.0) {
    double term = std::exp(-lambda);  // x = 0
    for (std::int64_t x = 1; x <= trunc; ++x) {
      term *= lambda / static_cast<double>(x);
      mean += static_cast<double>(x) * term;
    }
  } else {
    // e^{-lambda} underflows; run the same recurrence on logs.
    double log_term = -lambda;
    const double log_lambda = std::log(lambda);
    for (std::int64_t x = 1; x <= trunc; ++x) {
      log_term += log_lambda - std::log(static_cast<double>(x));
      if (log_term > -745.0)
        mean += static_cast<double>(x) * std::exp(log_term);
    }
  }
  const double fee_per_tx =
      p.base_fee + p.fee_rate * static_cast<double>(p.per_tx_val);
  return mean * fee_per_tx;
}

double bribe(double alpha, double aux_cost, double timeout_d,
             const EconomicParams& p) {
  if (alpha < 0 || aux_cost < 0 || timeout_d < 0)
    throw std::invalid_argument("bribe: negative input");
  return alpha + aux_cost + 2.0 * opportunity_cost(p.rate, static_cast<double>(timeout_d), alpha, p);
}

TimeoutSchedule timeout_schedule(int hops, std::int64_t timeout_d,
                                 std::int64_t confirm_delta) {
  if (hops < 1) throw std::invalid_argument("timeout_schedule: hops < 1");
  TimeoutSchedule s;
  s.least_timeout = timeout_d;
  s.confirm_delay = confirm_delta;
  s.t.resize(static_cast<std::size_t>(hops));
  for (int i = 0; i < hops; ++i) {
    s.t[static_cast<std::size_t>(i)] =
        timeout_d + static_cast<std::int64_t>(hops - 1 - i) * confirm_delta;
    s.total += s.t[static_cast<std::size_t>(i)];
  }
  return s;
}

}  // namespace pcn
