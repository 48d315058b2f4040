#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ctgrade {

// One scored scan. raw holds the network output: 1 value for the continuous
// head, 5 class probabilities for the categorical head.
struct PredictionRow {
  std::string scan_id;
  double positive_score = 0.0;
  int corads = 1;
  std::vector<double> raw;
};

// Predictions file: CSV header scan_id,positive_score,corads,raw_0[,raw_1...].
// This is also the format exported for external leaderboard scoring.
void write_predictions(const std::vector<PredictionRow>& rows,
                       const std::filesystem::path& path);
std::vector<PredictionRow> read_predictions(const std::filesystem::path& path);

}  // namespace ctgrade
