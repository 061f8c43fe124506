#include "pbppo/bandit/bandit.hpp"

#include <cmath>

#include "pbppo/error.hpp"

namespace pbppo::bandit {

BanditState::BanditState(std::vector<double> b, double g, bool allow_zero,
                         ExpectationRule r)
    : bounds(std::move(b)), gamma(g), rule(r) {
  if (bounds.empty()) throw ConfigError("bandit: at least one bound is required");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("bandit: gamma must lie in [0, 1]");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const double e = bounds[i];
    const bool in_range = allow_zero ? (e >= 0.0 && e <= 1.0) : (e > 0.0 && e <= 1.0);
    if (!in_range) {
      throw ConfigError(allow_zero ? "bandit: bounds must lie in [0, 1]"
                                   : "bandit: bounds must lie in (0, 1]");
    }
    if (i > 0 && !(e > bounds[i - 1])) {
      throw ConfigError("bandit: bounds must be strictly increasing");
    }
  }
  const std::size_t n = bounds.size();
  expectations.assign(n, 0.0);
  arm_visits.assign(n, 0);
  return_max.assign(n, 0.0);
  return_min.assign(n, 0.0);
}

std::vector<double> generate_bounds(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("bounds-n must be >= 1");
  if (!(lo >= 0.0 && hi <= 1.0)) throw ConfigError("bounds must lie in [0, 1]");
  if (!(lo < hi)) throw ConfigError("bounds-min must be < bounds-max");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double span = hi - lo;
  for (int k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = lo + span * static_cast<double>(k) / (n - 1);
  }
  out.back() = hi;
  return out;
}

double uncertainty_visitation(const BanditState& state, std::size_t arm) {
  const double n = static_cast<double>(state.total_visits);
  const double ni = static_cast<double>(state.arm_visits.at(arm));
  return std::sqrt(n / (ni + kVisitationEps));
}

double uncertainty_hoeffding(const BanditState& state, std::size_t arm, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("sigma must lie in (0, 1)");
  if (!state.visited(arm)) return uncertainty_visitation(state, arm);
  return (state.return_max[arm] - state.return_min[arm]) *
         std::sqrt(0.5 * std::log(2.0 / sigma));
}

UcbReport select_arm(const BanditState& state, const SelectOptions& options) {
  const std::size_t n = state.arms();
  if (n == 0) throw ConfigError("select_arm: no arms");
  if (!(options.lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  UcbReport rep;
  rep.exploitation = state.expectations;
  if (options.normalization == Normalization::kWithAdvantage) {
    double mean = 0.0;
    for (double e : state.expectations) mean += e;
    mean /= static_cast<double>(n);
    for (double& e : rep.exploitation) e -= mean;
  }
  rep.uncertainty.resize(n);
  rep.fallback.assign(n, false);
  rep.combined.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (options.mode == UncertaintyMode::kHoeffding) {
      rep.uncertainty[i] = uncertainty_hoeffding(state, i, options.sigma);
      rep.fallback[i] = !state.visited(i);
    } else {
      rep.uncertainty[i] = uncertainty_visitation(state, i);
    }
    rep.combined[i] = rep.exploitation[i] + options.lambda * rep.uncertainty[i];
  }
  rep.selected = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (rep.combined[i] > rep.combined[rep.selected]) rep.selected = i;
  }
  return rep;
}

bool record_feedback(BanditState& state, std::size_t arm, double evaluated_return) {
  if (arm >= state.arms()) throw ConfigError("record_feedback: arm index out of range");
  if (!std::isfinite(evaluated_return)) {
    state.warnings.push_back("rejected non-finite return for arm " + std::to_string(arm));
    return false;
  }
  double& e = state.expectations[arm];
  if (state.rule == ExpectationRule::kRecency) {
    e = state.gamma * e + evaluated_return;
  } else {
    e += std::pow(state.gamma, static_cast<double>(state.arm_visits[arm])) * evaluated_return;
  }
  state.total_return += state.gamma * evaluated_return;
  if (state.arm_visits[arm] == 0) {
    state.return_max[arm] = evaluated_return;
    state.return_min[arm] = evaluated_return;
  } else {
    state.return_max[arm] = std::max(state.return_max[arm], evaluated_return);
    state.return_min[arm] = std::min(state.return_min[arm], evaluated_return);
  }
  ++state.arm_visits[arm];
  ++state.total_visits;
  return true;
}

}  // namespace pbppo::bandit
