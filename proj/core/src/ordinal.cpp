#include "ctgrade/ordinal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ctgrade::ordinal {

double corads_to_target(int grade) {
  if (grade < 1 || grade > kNumGrades)
    throw std::invalid_argument("corads_to_target: grade out of range 1..5: " +
                                std::to_string(grade));
  return static_cast<double>(grade - 1) / (kNumGrades - 1);
}

int score_to_corads(double score) {
  const double scaled = 4.0 * score;
  // round half up
  int g = static_cast<int>(std::floor(scaled + 0.5)) + 1;
  if (g < 1) g = 1;
  if (g > kNumGrades) g = kNumGrades;
  return g;
}

double continuous_loss(double score, double target) {
  return -(target * std::log(score) + (1.0 - target) * std::log1p(-score));
}

double continuous_loss_from_logit(double logit, double target) {
  // -t*ln(sigmoid(z)) - (1-t)*ln(1-sigmoid(z))
  //   = max(z, 0) - t*z + ln(1 + exp(-|z|))
  return std::fmax(logit, 0.0) - target * logit + std::log1p(std::exp(-std::fabs(logit)));
}

double categorical_loss(std::span<const double> probs, int grade) {
  if (grade < 1 || static_cast<std::size_t>(grade) > probs.size())
    throw std::invalid_argument("categorical_loss: grade out of range");
  return -std::log(probs[static_cast<std::size_t>(grade - 1)]);
}

double categorical_to_positive_score(std::span<const double> probs) {
  double s = 0.0;
  for (std::size_t c = 2; c < probs.size(); ++c) s += probs[c];
  return s;
}

int categorical_to_corads(std::span<const double> probs) {
  int best = 1;
  double best_p = probs[0];
  for (std::size_t c = 1; c < probs.size(); ++c) {
    if (probs[c] >= best_p) {  // ties resolve to the higher grade
      best_p = probs[c];
      best = static_cast<int>(c) + 1;
    }
  }
  return best;
}

}  // namespace ctgrade::ordinal
