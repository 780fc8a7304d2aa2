#include "pcn/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace pcn {

double cumulative_penalty(std::span<const double> amounts,
                          std::span<const std::int64_t> timeouts, double gamma,
                          int hop_index) {
  if (hop_index < 1 || static_cast<std::size_t>(hop_index) > amounts.size() ||
      amounts.size() != timeouts.size())
    throw std::invalid_argument("cumulative_penalty: bad hop index");
  double collateral = 0.0;
  for (int j = 0; j < hop_index; ++j)
    collateral += amounts[static_cast<std::size_t>(j)] *
                  static_cast<double>(timeouts[static_cast<std::size_t>(j)]);
  return gamma * collateral;
}

std::optional<std::int64_t> max_path_length(double k_ratio, double zeta) {
  if (k_ratio <= 0 || zeta < 0 || zeta >= 1)
    throw std::invalid_argument("max_path_length: k > 0 and 0 <= zeta < 1 required");
  if (zeta == 0.0) return std::nullopt;  // unbounded
  // Nudge before flooring so exact integer ratios survive division rounding.
  return static_cast<std::int64_t>(std::floor(k_ratio / zeta + 1e-9));
}

double penalty_rate(double k_ratio, double zeta, std::int64_t timeout_d,
                    std::int64_t confirm_delta) {
  if (zeta <= 0 || k_ratio < zeta || timeout_d <= 0)
    throw std::invalid_argument("penalty_rate: need zeta > 0, k >= zeta, D > 0");
  const double denom = 2.0 * zeta * static_cast<double>(timeout_d) +
                       static_cast<double>(confirm_delta) * (k_ratio - zeta);
  if (denom <= 0) throw std::invalid_argument("penalty_rate: degenerate denominator");
  return 2.0 * zeta * zeta / denom;
}

double penalty_rate_from_length(double k_ratio, std::int64_t path_len,
                                std::int64_t timeout_d,
                                std::int64_t confirm_delta) {
  if (path_len < 1 || timeout_d <= 0)
    throw std::invalid_argument("penalty_rate_from_length: bad inputs");
  double denom = 0.0;
  for (std::int64_t i = 1; i <= path_len; ++i)
    denom += static_cast<double>(timeout_d) +
             static_cast<double>(path_len - i) * static_cast<double>(confirm_delta);
  if (denom <= 0) throw std::invalid_argument("penalty_rate_from_length: degenerate denominator");
  return k_ratio / denom;
}

std::optional<double> max_penalty_ratio(double liveness, double alpha,
                                        const EconomicParams& econ,
                                        std::int64_t timeout_d, double t_tilde,
                                        double remain) {
  if (liveness <= 0 || liveness > 1 || alpha <= 0)
    throw std::invalid_argument("max_penalty_ratio: need 0 < h <= 1, alpha > 0");
  if (liveness == 1.0) return std::nullopt;  // loss term vanishes, k unbounded

  const double fixed_loss =
      opportunity_cost(econ.rate, static_cast<double>(timeout_d), alpha, econ) +
      opportunity_cost(econ.rate, t_tilde, remain, econ);
  auto profit = [&](double k) {
    return liveness * alpha -
           (1.0 - liveness) *
               (k * alpha +
                opportunity_cost(econ.rate, static_cast<double>(timeout_d),
                                 k * alpha, econ) +
                fixed_loss);
  };

  if (profit(0.0) < 0.0) return 0.0;

  double lo = 0.0, hi = 1.0;
  int expand = 0;
  while (profit(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 200) return std::nullopt;  // effectively unbounded
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (profit(mid) >= 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-9 * std::max(1.0, lo)) break;
  }
  return lo;
}

double attack_payment_value(double alpha, double gamma,
                            const TimeoutSchedule& schedule) {
  if (gamma < 0) throw std::invalid_argument("attack_payment_value: gamma < 0");
  return alpha / (1.0 + gamma * static_cast<double>(schedule.total));
}

}  // namespace pcn
