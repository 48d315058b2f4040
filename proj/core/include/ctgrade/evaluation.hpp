#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctgrade/dataset.hpp"
#include "ctgrade/errors.hpp"
#include "ctgrade/predictions.hpp"

namespace ctgrade::eval {

// Thrown when a metric is undefined on the given sample (single-class labels,
// fewer than two distinct true grades). Bootstrap resampling catches this and
// redraws.
class MetricUndefined : public DataError {
public:
  using DataError::DataError;
};

// Quadratic weighted kappa over grades 1..num_classes:
//   kappa = 1 - sum(w .* O) / sum(w .* E),  w_ij = (i-j)^2 / (K-1)^2,
// with O the confusion counts and E the outer product of the marginals
// scaled to n.
double qwk(std::span<const int> y_true, std::span<const int> y_pred, int num_classes = 5);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocResult {
  double auc = 0.0;                // Mann-Whitney: (wins + 0.5 ties) / (n_pos * n_neg)
  std::vector<RocPoint> points;    // swept over distinct thresholds, (0,0) to (1,1)
};

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

// Trapezoidal area under an ROC polyline; equals the Mann-Whitney AUC.
double roc_trapezoid_area(std::span<const RocPoint> points);

struct ConfusionMatrix {
  int num_classes = 5;
  std::vector<std::int64_t> counts;  // row-major, row = true grade - 1

  std::int64_t& at(int true_grade, int pred_grade);
  std::int64_t at(int true_grade, int pred_grade) const;
  std::int64_t total() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 int num_classes = 5);

// A metric evaluated on a multiset of sample indices into some fixed dataset.
// Throws MetricUndefined for degenerate index draws.
using IndexMetric = std::function<double(std::span<const std::size_t>)>;

struct BootstrapConfig {
  int n_iter = 1000;
  std::uint64_t seed = 0;
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Non-parametric bootstrap percentile CI (2.5/97.5). Undefined resamples are
// redrawn from the iteration's own stream; if the total number of undefined
// draws exceeds n_iter the sample is too degenerate and a DataError is
// thrown. Iterations use counter-derived RNG streams, so a parallel schedule
// would produce identical results.
ConfidenceInterval bootstrap_ci(const IndexMetric& metric, std::size_t n_samples,
                                const BootstrapConfig& cfg);

// Paired two-sided bootstrap test on the metric difference between two
// prediction sets over identical scans. p = 2*min(P(d<=0), P(d>=0)) clamped
// to [1/n_iter, 1]. With one_sided, p = P(d <= 0) tests metric_a > metric_b.
double bootstrap_significance(const IndexMetric& metric_a, const IndexMetric& metric_b,
                              std::size_t n_samples, const BootstrapConfig& cfg,
                              bool one_sided = false);

struct EvalReport {
  std::string scheme;  // "corads" or "ictcf"
  std::optional<double> qwk;
  std::optional<ConfidenceInterval> qwk_ci;
  double auc = 0.0;
  ConfidenceInterval auc_ci;
  std::vector<RocPoint> roc_points;
  std::optional<ConfusionMatrix> confusion;
  std::int64_t n_scans = 0;
  std::int64_t n_pos = 0;
  std::int64_t n_neg = 0;
  std::string dichotomization;
  BootstrapConfig bootstrap;
  std::map<std::string, std::string> provenance;
};

// Score a prediction set against a manifest. CO-RADS manifests yield
// QWK + confusion + AUC (grades 1-2 negative vs 3-5 positive); iCTCF
// manifests yield AUC only (Control vs rest), with Suspected rows excluded.
EvalReport evaluate_run(std::span<const data::ScanRecord> records,
                        const std::vector<PredictionRow>& predictions,
                        const BootstrapConfig& cfg);

EvalReport evaluate_run(const std::filesystem::path& predictions_csv,
                        const std::filesystem::path& manifest,
                        const BootstrapConfig& cfg);

std::string to_json(const EvalReport& report);
EvalReport eval_report_from_json(const std::string& json_text);
void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

void write_roc_csv(std::span<const RocPoint> points, const std::filesystem::path& path);

}  // namespace ctgrade::eval
