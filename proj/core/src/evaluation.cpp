#include "ctgrade/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ctgrade/rng.hpp"

namespace ctgrade::eval {

using json = nlohmann::json;

double qwk(std::span<const int> y_true, std::span<const int> y_pred, int num_classes) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("qwk: length mismatch");
  const std::size_t n = y_true.size();
  if (n < 2) throw MetricUndefined("qwk: needs at least 2 samples");

  const int k = num_classes;
  std::vector<double> obs(static_cast<std::size_t>(k) * k, 0.0);
  std::vector<double> row(k, 0.0), col(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int t = y_true[i], p = y_pred[i];
    if (t < 1 || t > k || p < 1 || p > k)
      throw DataError("qwk: grade out of range 1.." + std::to_string(k));
    obs[static_cast<std::size_t>(t - 1) * k + (p - 1)] += 1.0;
    row[t - 1] += 1.0;
    col[p - 1] += 1.0;
  }
  int distinct_true = 0;
  for (int i = 0; i < k; ++i) distinct_true += row[i] > 0 ? 1 : 0;
  if (distinct_true < 2)
    throw MetricUndefined("qwk: fewer than two distinct true classes");

  const double wk = static_cast<double>(k - 1) * (k - 1);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double w = static_cast<double>(i - j) * (i - j) / wk;
      num += w * obs[static_cast<std::size_t>(i) * k + j];
      den += w * row[i] * col[j] / static_cast<double>(n);
    }
  }
  if (den == 0.0) throw MetricUndefined("qwk: degenerate marginals");
  return 1.0 - num / den;
}

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("roc_auc: length mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0, n_neg = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw DataError("roc_auc: labels must be 0/1");
    (l == 1 ? n_pos : n_neg) += 1;
  }
  if (n_pos == 0 || n_neg == 0)
    throw MetricUndefined("roc_auc: needs both classes present");

  // Mann-Whitney via tie-averaged ranks.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  RocResult res;
  res.auc = u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));

  // ROC sweep over distinct thresholds, descending; predicted positive means
  // score >= threshold.
  res.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = n; i > 0;) {
    std::size_t j = i;
    const double thr = scores[order[i - 1]];
    while (j > 0 && scores[order[j - 1]] == thr) {
      if (labels[order[j - 1]] == 1)
        ++tp;
      else
        ++fp;
      --j;
    }
    res.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                          static_cast<double>(tp) / static_cast<double>(n_pos), thr});
    i = j;
  }
  return res;
}

double roc_trapezoid_area(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) * 0.5 * (points[i].tpr + points[i - 1].tpr);
  return area;
}

std::int64_t& ConfusionMatrix::at(int true_grade, int pred_grade) {
  return counts[static_cast<std::size_t>(true_grade - 1) * num_classes + (pred_grade - 1)];
}
std::int64_t ConfusionMatrix::at(int true_grade, int pred_grade) const {
  return counts[static_cast<std::size_t>(true_grade - 1) * num_classes + (pred_grade - 1)];
}
std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 int num_classes) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("confusion_matrix: length mismatch");
  ConfusionMatrix m;
  m.num_classes = num_classes;
  m.counts.assign(static_cast<std::size_t>(num_classes) * num_classes, 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 1 || y_true[i] > num_classes || y_pred[i] < 1 || y_pred[i] > num_classes)
      throw DataError("confusion_matrix: grade out of range 1.." + std::to_string(num_classes));
    ++m.at(y_true[i], y_pred[i]);
  }
  return m;
}

namespace {

double percentile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - std::floor(pos);
  if (i + 1 >= n) return sorted[n - 1];
  return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

std::vector<std::size_t> draw_indices(Rng& rng, std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (auto& v : idx) v = static_cast<std::size_t>(rng.uniform_int(n));
  return idx;
}

// Runs one bootstrap iteration: draws until the functor accepts a resample.
template <typename Fn>
void bootstrap_loop(std::size_t n_samples, const BootstrapConfig& cfg, Fn&& run_one) {
  if (n_samples == 0) throw std::invalid_argument("bootstrap: empty sample");
  if (cfg.n_iter < 1) throw std::invalid_argument("bootstrap: n_iter must be >= 1");
  std::int64_t undefined_total = 0;
  for (int i = 0; i < cfg.n_iter; ++i) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    for (;;) {
      const auto idx = draw_indices(rng, n_samples);
      try {
        run_one(idx);
        break;
      } catch (const MetricUndefined&) {
        if (++undefined_total > cfg.n_iter)
          throw DataError(
              "bootstrap: sample too degenerate, more than 50% of resamples undefined");
      }
    }
  }
}

}  // namespace

ConfidenceInterval bootstrap_ci(const IndexMetric& metric, std::size_t n_samples,
                                const BootstrapConfig& cfg) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(cfg.n_iter));
  bootstrap_loop(n_samples, cfg,
                 [&](std::span<const std::size_t> idx) { values.push_back(metric(idx)); });
  std::sort(values.begin(), values.end());
  return {percentile_sorted(values, 0.025), percentile_sorted(values, 0.975)};
}

double bootstrap_significance(const IndexMetric& metric_a, const IndexMetric& metric_b,
                              std::size_t n_samples, const BootstrapConfig& cfg,
                              bool one_sided) {
  std::int64_t le = 0, ge = 0;
  bootstrap_loop(n_samples, cfg, [&](std::span<const std::size_t> idx) {
    const double d = metric_a(idx) - metric_b(idx);
    if (d <= 0.0) ++le;
    if (d >= 0.0) ++ge;
  });
  const double n = static_cast<double>(cfg.n_iter);
  const double p_min = 1.0 / n;
  double p;
  if (one_sided)
    p = static_cast<double>(le) / n;
  else
    p = 2.0 * static_cast<double>(std::min(le, ge)) / n;
  return std::clamp(p, p_min, 1.0);
}

namespace {

struct PairedSample {
  std::vector<int> grades_true;     // corads only
  std::vector<int> grades_pred;     // corads only
  std::vector<double> scores;
  std::vector<int> binary_labels;
};

IndexMetric make_auc_metric(const PairedSample& s) {
  return [&s](std::span<const std::size_t> idx) {
    std::vector<double> sc(idx.size());
    std::vector<int> lb(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      sc[i] = s.scores[idx[i]];
      lb[i] = s.binary_labels[idx[i]];
    }
    return roc_auc(sc, lb).auc;
  };
}

IndexMetric make_qwk_metric(const PairedSample& s) {
  return [&s](std::span<const std::size_t> idx) {
    std::vector<int> t(idx.size()), p(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      t[i] = s.grades_true[idx[i]];
      p[i] = s.grades_pred[idx[i]];
    }
    return qwk(t, p);
  };
}

}  // namespace

EvalReport evaluate_run(std::span<const data::ScanRecord> records,
                        const std::vector<PredictionRow>& predictions,
                        const BootstrapConfig& cfg) {
  if (records.empty()) throw DataError("evaluate_run: empty manifest");
  const data::LabelScheme scheme = records.front().label.scheme;
  for (const auto& r : records)
    if (r.label.scheme != scheme) throw DataError("evaluate_run: mixed label schemes");

  std::map<std::string, const PredictionRow*> by_id;
  for (const auto& p : predictions) by_id[p.scan_id] = &p;

  std::string missing;
  std::int64_t n_missing = 0;
  for (const auto& r : records) {
    if (!by_id.count(r.scan_id)) {
      if (++n_missing <= 20) missing += (missing.empty() ? "" : ", ") + r.scan_id;
    }
  }
  if (n_missing > 0)
    throw DataError("evaluate_run: " + std::to_string(n_missing) +
                    " manifest scans have no prediction: " + missing);

  PairedSample s;
  std::int64_t n_suspected = 0;
  for (const auto& r : records) {
    if (scheme == data::LabelScheme::Ictcf && r.label.value == data::kIctcfSuspected) {
      ++n_suspected;
      continue;
    }
    const auto* p = by_id.at(r.scan_id);
    s.scores.push_back(p->positive_score);
    s.binary_labels.push_back(data::to_binary(r.label).value);
    if (scheme == data::LabelScheme::Corads) {
      s.grades_true.push_back(r.label.value);
      s.grades_pred.push_back(p->corads);
    }
  }
  if (s.scores.empty()) throw DataError("evaluate_run: no evaluable scans");

  EvalReport rep;
  rep.scheme = data::to_string(scheme);
  rep.bootstrap = cfg;
  rep.n_scans = static_cast<std::int64_t>(s.scores.size());
  rep.n_pos = std::count(s.binary_labels.begin(), s.binary_labels.end(), 1);
  rep.n_neg = rep.n_scans - rep.n_pos;
  if (n_suspected > 0)
    rep.provenance["excluded_suspected"] = std::to_string(n_suspected);

  const auto roc = roc_auc(s.scores, s.binary_labels);
  rep.auc = roc.auc;
  rep.roc_points = roc.points;
  rep.auc_ci = bootstrap_ci(make_auc_metric(s), s.scores.size(), cfg);

  switch (scheme) {
    case data::LabelScheme::Corads:
      rep.dichotomization = "corads-1-2-negative-vs-3-5-positive";
      rep.qwk = qwk(s.grades_true, s.grades_pred);
      rep.qwk_ci = bootstrap_ci(make_qwk_metric(s), s.grades_true.size(), cfg);
      rep.confusion = confusion_matrix(s.grades_true, s.grades_pred);
      break;
    case data::LabelScheme::Ictcf:
      rep.dichotomization = "ictcf-control-negative-vs-rest-positive";
      break;
    case data::LabelScheme::Binary:
      rep.dichotomization = "binary-labels";
      break;
  }
  return rep;
}

EvalReport evaluate_run(const std::filesystem::path& predictions_csv,
                        const std::filesystem::path& manifest,
                        const BootstrapConfig& cfg) {
  const auto records = data::load_manifest(manifest);
  const auto preds = read_predictions(predictions_csv);
  auto rep = evaluate_run(records, preds, cfg);
  rep.provenance["manifest"] = manifest.generic_string();
  rep.provenance["predictions"] = predictions_csv.generic_string();
  return rep;
}

namespace {

json ci_to_json(const ConfidenceInterval& ci) { return json::array({ci.lo, ci.hi}); }

json roc_point_to_json(const RocPoint& p) {
  // +inf has no JSON literal; the leading threshold serializes as null.
  json thr;
  if (std::isfinite(p.threshold)) thr = p.threshold;
  return json::array({p.fpr, p.tpr, thr});
}

}  // namespace

std::string to_json(const EvalReport& r) {
  json j;
  j["scheme"] = r.scheme;
  j["qwk"] = r.qwk ? json(*r.qwk) : json(nullptr);
  j["qwk_ci"] = r.qwk_ci ? ci_to_json(*r.qwk_ci) : json(nullptr);
  j["auc"] = r.auc;
  j["auc_ci"] = ci_to_json(r.auc_ci);
  j["n_scans"] = r.n_scans;
  j["n_pos"] = r.n_pos;
  j["n_neg"] = r.n_neg;
  j["dichotomization"] = r.dichotomization;
  j["bootstrap"] = {{"n_iter", r.bootstrap.n_iter}, {"seed", r.bootstrap.seed}};
  if (r.confusion) {
    json rows = json::array();
    for (int i = 1; i <= r.confusion->num_classes; ++i) {
      json row = json::array();
      for (int k = 1; k <= r.confusion->num_classes; ++k) row.push_back(r.confusion->at(i, k));
      rows.push_back(row);
    }
    j["confusion"] = rows;
  } else {
    j["confusion"] = nullptr;
  }
  json pts = json::array();
  for (const auto& p : r.roc_points) pts.push_back(roc_point_to_json(p));
  j["roc_points"] = pts;
  j["provenance"] = r.provenance;
  return j.dump(2);
}

EvalReport eval_report_from_json(const std::string& text) {
  const json j = json::parse(text);
  EvalReport r;
  r.scheme = j.at("scheme").get<std::string>();
  if (!j.at("qwk").is_null()) r.qwk = j.at("qwk").get<double>();
  if (!j.at("qwk_ci").is_null())
    r.qwk_ci = ConfidenceInterval{j.at("qwk_ci")[0].get<double>(), j.at("qwk_ci")[1].get<double>()};
  r.auc = j.at("auc").get<double>();
  r.auc_ci = {j.at("auc_ci")[0].get<double>(), j.at("auc_ci")[1].get<double>()};
  r.n_scans = j.at("n_scans").get<std::int64_t>();
  r.n_pos = j.at("n_pos").get<std::int64_t>();
  r.n_neg = j.at("n_neg").get<std::int64_t>();
  r.dichotomization = j.at("dichotomization").get<std::string>();
  r.bootstrap.n_iter = j.at("bootstrap").at("n_iter").get<int>();
  r.bootstrap.seed = j.at("bootstrap").at("seed").get<std::uint64_t>();
  if (!j.at("confusion").is_null()) {
    const auto& rows = j.at("confusion");
    ConfusionMatrix m;
    m.num_classes = static_cast<int>(rows.size());
    m.counts.assign(static_cast<std::size_t>(m.num_classes) * m.num_classes, 0);
    for (int i = 1; i <= m.num_classes; ++i)
      for (int k = 1; k <= m.num_classes; ++k)
        m.at(i, k) = rows[i - 1][k - 1].get<std::int64_t>();
    r.confusion = std::move(m);
  }
  for (const auto& p : j.at("roc_points")) {
    RocPoint pt;
    pt.fpr = p[0].get<double>();
    pt.tpr = p[1].get<double>();
    pt.threshold = p[2].is_null() ? std::numeric_limits<double>::infinity() : p[2].get<double>();
    r.roc_points.push_back(pt);
  }
  for (const auto& [k, v] : j.at("provenance").items())
    r.provenance[k] = v.get<std::string>();
  return r;
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw PipelineError("cannot write report: " + path.string());
  out << to_json(report) << '\n';
}

EvalReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return eval_report_from_json(ss.str());
}

void write_roc_csv(std::span<const RocPoint> points, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw PipelineError("cannot write ROC csv: " + path.string());
  out << "fpr,tpr,threshold\n";
  char buf[128];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.fpr, p.tpr, p.threshold);
    out << buf;
  }
}

}  // namespace ctgrade::eval
