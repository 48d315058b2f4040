#pragma once

#include <cstdint>
#include <span>

namespace ctgrade::ordinal {

inline constexpr int kNumGrades = 5;

// CO-RADS grade (1..5) to regression target: 1 -> 0, 5 -> 1, uniform spacing.
double corads_to_target(int grade);

// Sigmoid score to CO-RADS grade: round_half_up(4 * s) + 1. Decision
// boundaries sit at {0.125, 0.375, 0.625, 0.875}; exact boundary values round
// to the higher grade.
int score_to_corads(double score);

// Binary cross-entropy against a soft target in [0, 1]. Requires s in (0, 1).
double continuous_loss(double score, double target);

// Numerically stable form computed from the pre-sigmoid logit, for training.
double continuous_loss_from_logit(double logit, double target);

// Categorical cross-entropy: -ln p[grade]. probs is a normalized 5-vector,
// grade in 1..5.
double categorical_loss(std::span<const double> probs, int grade);

// Probability mass of the positive classes (CO-RADS 3-5) of a categorical
// output, used as the score for ROC analysis.
double categorical_to_positive_score(std::span<const double> probs);

// Argmax grade of a categorical output; ties go to the higher grade.
int categorical_to_corads(std::span<const double> probs);

}  // namespace ctgrade::ordinal
