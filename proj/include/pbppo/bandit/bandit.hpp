#ifndef PBPPO_BANDIT_BANDIT_HPP_
#define PBPPO_BANDIT_BANDIT_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace pbppo::bandit {

// Exploration bonus added (times lambda) to each arm's exploitation term.
enum class UncertaintyMode {
  kVisitation,  // sqrt(N / (N_i + eps))
  kHoeffding,   // (R_max_i - R_min_i) sqrt(0.5 ln(2 / sigma))
};

// Exploitation term: the raw expectation, or the expectation minus the mean
// expectation over arms.
enum class Normalization { kWithAdvantage, kWithoutAdvantage };

// How evaluated returns fold into an arm's expectation.
enum class ExpectationRule {
  kRecency,          // E <- gamma E + R
  kForwardDiscount,  // E <- E + gamma^{N_i} R  (N_i counted before the visit)
};

inline constexpr double kVisitationEps = 1e-8;

// Clipping-bound selector state. Unvisited arms have expectation 0 and
// undefined extrema.
struct BanditState {
  std::vector<double> bounds;
  std::vector<double> expectations;
  std::vector<std::uint64_t> arm_visits;
  std::uint64_t total_visits = 0;
  double total_return = 0.0;
  std::vector<double> return_max;
  std::vector<double> return_min;
  double gamma = 0.9;
  ExpectationRule rule = ExpectationRule::kRecency;
  std::vector<std::string> warnings;

  BanditState() = default;
  // Bounds must be strictly increasing in (0, 1], or [0, 1] with allow_zero.
  BanditState(std::vector<double> bounds, double gamma, bool allow_zero = false,
              ExpectationRule rule = ExpectationRule::kRecency);

  std::size_t arms() const { return bounds.size(); }
  bool visited(std::size_t i) const { return arm_visits.at(i) > 0; }

  friend bool operator==(const BanditState&, const BanditState&) = default;
};

struct UcbReport {
  std::vector<double> exploitation;
  std::vector<double> uncertainty;
  std::vector<double> combined;
  // Hoeffding mode only: arm used the visitation bonus because it has no
  // return range yet.
  std::vector<bool> fallback;
  std::size_t selected = 0;
};

// n evenly spaced values from lo to hi inclusive; n = 1 gives {lo}.
std::vector<double> generate_bounds(double lo, double hi, int n);

double uncertainty_visitation(const BanditState& state, std::size_t arm);
// Falls back to the visitation bonus for an unvisited arm.
double uncertainty_hoeffding(const BanditState& state, std::size_t arm, double sigma);

struct SelectOptions {
  double lambda = 5.0;
  UncertaintyMode mode = UncertaintyMode::kVisitation;
  Normalization normalization = Normalization::kWithAdvantage;
  double sigma = 0.0;  // required in (0, 1) for Hoeffding mode
};

// Argmax of exploitation + lambda * uncertainty; ties go to the lowest index.
UcbReport select_arm(const BanditState& state, const SelectOptions& options);

// Folds an evaluated return into arm i and the global counters. Non-finite
// returns leave the state unchanged apart from an appended warning.
bool record_feedback(BanditState& state, std::size_t arm, double evaluated_return);

}  // namespace pbppo::bandit

#endif  // PBPPO_BANDIT_BANDIT_HPP_
