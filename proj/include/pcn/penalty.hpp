#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "pcn/economics.hpp"

namespace pcn {

/// Parameters of the griefing-penalty calculus.
struct PenaltyParams {
  double gamma = 0.0;       // penalty rate per block
  double zeta = 0.0;        // guaranteed minimum compensation fraction, [0,1)
  double k_ratio = 0.0;     // max cumulative penalty / payment value
  std::int64_t n_max = 0;   // maximum allowed path length for the pair (k, zeta)
  double liveness = 1.0;    // payee probability of staying live (h)
};

/// Cumulative penalty a node at hop index i (1-based) locks:
/// Z = gamma * sum_{j=0}^{i-1} amount_j * timeout_j.
double cumulative_penalty(std::span<const double> amounts,
                          std::span<const std::int64_t> timeouts, double gamma,
                          int hop_index);

/// Maximum allowed path length floor(k / zeta).
/// zeta == 0 leaves the length unbounded, signalled by nullopt.
std::optional<std::int64_t> max_path_length(double k_ratio, double zeta);

/// Penalty rate 2*zeta^2 / (2*zeta*D + Delta*(k - zeta)).
double penalty_rate(double k_ratio, double zeta, std::int64_t timeout_d,
                    std::int64_t confirm_delta);

/// Pre-substitution form: k / sum_{i=1}^{n}(D + (n - i) * Delta).
double penalty_rate_from_length(double k_ratio, std::int64_t path_len,
                                std::int64_t timeout_d,
                                std::int64_t confirm_delta);

/// Largest k such that the payee's participation constraint
/// h*alpha - (1-h)*(k*alpha + O(r,D,k*alpha) + O(r,D,alpha) + O(r,t~,remain)) >= 0
/// still holds. h == 1 makes the bound infinite, signalled by nullopt.
std::optional<double> max_penalty_ratio(double liveness, double alpha,
                                        const EconomicParams& econ,
                                        std::int64_t timeout_d, double t_tilde,
                                        double remain);

/// Self-payment value v = alpha / (1 + gamma * sum t_j) an attacker can afford
/// out of a per-payment budget alpha (fee-free form).
double attack_payment_value(double alpha, double gamma,
                            const TimeoutSchedule& schedule);

}  // namespace pcn
