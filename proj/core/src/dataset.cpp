#include "ctgrade/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ctgrade/rng.hpp"

namespace ctgrade::data {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

int parse_int(const std::string& s, const std::string& what, std::size_t row) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("manifest row " + std::to_string(row) + ": " + what +
                    " is not an integer: '" + s + "'");
  }
}

}  // namespace

std::string to_string(LabelScheme s) {
  switch (s) {
    case LabelScheme::Corads: return "corads";
    case LabelScheme::Ictcf: return "ictcf";
    case LabelScheme::Binary: return "binary";
  }
  return "?";
}

LabelScheme scheme_from_string(const std::string& s) {
  if (s == "corads") return LabelScheme::Corads;
  if (s == "ictcf") return LabelScheme::Ictcf;
  if (s == "binary") return LabelScheme::Binary;
  throw DataError("unknown label scheme: '" + s + "'");
}

bool label_value_valid(LabelScheme scheme, int value) {
  switch (scheme) {
    case LabelScheme::Corads: return value >= 1 && value <= 5;
    case LabelScheme::Ictcf: return (value >= 0 && value <= 4) || value == kIctcfSuspected;
    case LabelScheme::Binary: return value == 0 || value == 1;
  }
  return false;
}

std::vector<int> scheme_values(LabelScheme scheme) {
  switch (scheme) {
    case LabelScheme::Corads: return {1, 2, 3, 4, 5};
    case LabelScheme::Ictcf: return {0, 1, 2, 3, 4};
    case LabelScheme::Binary: return {0, 1};
  }
  return {};
}

std::string label_value_name(LabelScheme scheme, int value) {
  if (scheme == LabelScheme::Ictcf) {
    switch (value) {
      case 0: return "Control";
      case 1: return "Mild";
      case 2: return "Regular";
      case 3: return "Severe";
      case 4: return "Critically ill";
      case kIctcfSuspected: return "Suspected";
    }
  }
  if (scheme == LabelScheme::Corads) return "CO-RADS " + std::to_string(value);
  return std::to_string(value);
}

GradeLabel to_binary(const GradeLabel& label) {
  switch (label.scheme) {
    case LabelScheme::Corads:
      return {LabelScheme::Binary, label.value >= 3 ? 1 : 0};
    case LabelScheme::Ictcf:
      if (label.value == kIctcfSuspected)
        throw DataError("to_binary: iCTCF 'Suspected' has no binary label");
      return {LabelScheme::Binary, label.value == 0 ? 0 : 1};
    case LabelScheme::Binary:
      throw DataError("to_binary: label is already binary");
  }
  throw DataError("to_binary: unknown scheme");
}

std::string to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw DataError("unknown split name: '" + s + "'");
}

Split SplitAssignment::at(const std::string& scan_id) const {
  const auto it = by_scan.find(scan_id);
  if (it == by_scan.end()) throw DataError("no split assigned for scan '" + scan_id + "'");
  return it->second;
}

std::vector<ScanRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  std::vector<ScanRecord> records;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      if (split_fields(t) !=
          std::vector<std::string>{"scan_id", "patient_id", "volume_path", "scheme", "label"})
        throw DataError("manifest row " + std::to_string(row) +
                        ": expected header scan_id,patient_id,volume_path,scheme,label");
      header_seen = true;
      continue;
    }
    const auto f = split_fields(t);
    if (f.size() != 5)
      throw DataError("manifest row " + std::to_string(row) + ": expected 5 fields, got " +
                      std::to_string(f.size()));
    ScanRecord r;
    r.scan_id = f[0];
    r.patient_id = f[1];
    if (r.scan_id.empty() || r.patient_id.empty())
      throw DataError("manifest row " + std::to_string(row) + ": empty scan_id or patient_id");
    if (!seen_ids.insert(r.scan_id).second)
      throw DataError("manifest row " + std::to_string(row) + ": duplicate scan_id '" +
                      r.scan_id + "'");
    std::filesystem::path vp(f[2]);
    r.volume_path = vp.is_absolute() ? vp : base / vp;
    LabelScheme scheme;
    try {
      scheme = scheme_from_string(f[3]);
    } catch (const DataError& e) {
      throw DataError("manifest row " + std::to_string(row) + ": " + e.what());
    }
    const int value = parse_int(f[4], "label", row);
    if (!label_value_valid(scheme, value))
      throw DataError("manifest row " + std::to_string(row) + ": label " +
                      std::to_string(value) + " is out of range for scheme " +
                      to_string(scheme));
    r.label = {scheme, value};
    records.push_back(std::move(r));
  }
  if (!header_seen) throw DataError("manifest has no header: " + path.string());
  return records;
}

void save_manifest(std::span<const ScanRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw PipelineError("cannot write manifest: " + path.string());
  out << "scan_id,patient_id,volume_path,scheme,label\n";
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  for (const auto& r : records) {
    auto vp = r.volume_path.lexically_proximate(base);
    out << r.scan_id << ',' << r.patient_id << ',' << vp.generic_string() << ','
        << to_string(r.label.scheme) << ',' << r.label.value << '\n';
  }
}

SplitAssignment stratified_patient_split(std::span<const ScanRecord> records,
                                         const SplitFractions& fractions,
                                         std::uint64_t seed) {
  if (records.empty()) throw DataError("stratified_patient_split: no records");
  if (fractions.empty()) throw UsageError("stratified_patient_split: no fractions");
  double total = 0.0;
  for (const auto& [split, f] : fractions) {
    if (f <= 0.0) throw UsageError("split fraction for " + to_string(split) + " must be > 0");
    total += f;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw UsageError("split fractions must sum to 1, got " + std::to_string(total));

  // Group scans by patient; stratum = majority label value, ties to the max.
  std::map<std::string, std::vector<const ScanRecord*>> by_patient;
  for (const auto& r : records) by_patient[r.patient_id].push_back(&r);

  std::map<int, std::vector<std::string>> strata;  // label value -> patient ids (sorted)
  for (const auto& [pid, scans] : by_patient) {
    std::map<int, int> counts;
    for (const auto* s : scans) ++counts[s->label.value];
    int stratum = counts.begin()->first;
    int best = 0;
    for (const auto& [value, n] : counts) {
      if (n >= best) {  // >= : ties resolve to the maximum value
        best = n;
        stratum = value;
      }
    }
    strata[stratum].push_back(pid);
  }

  const std::size_t n_splits = fractions.size();
  std::string deficient;
  for (const auto& [value, patients] : strata) {
    if (patients.size() < n_splits)
      deficient += (deficient.empty() ? "" : ", ") + std::to_string(value) + " (" +
                   std::to_string(patients.size()) + " patients)";
  }
  if (!deficient.empty())
    throw DataError("classes with fewer patients than splits: " + deficient);

  Rng rng(derive_seed(seed, "stratified_patient_split"));
  SplitAssignment out;
  for (auto& [value, patients] : strata) {
    rng.shuffle(patients);
    const auto n = static_cast<std::int64_t>(patients.size());

    // Largest-remainder seat allocation.
    std::vector<std::int64_t> seats(n_splits, 0);
    std::vector<double> remainder(n_splits, 0.0);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n_splits; ++i) {
      const double exact = static_cast<double>(n) * fractions[i].second;
      seats[i] = static_cast<std::int64_t>(std::floor(exact));
      remainder[i] = exact - std::floor(exact);
      assigned += seats[i];
    }
    std::vector<std::size_t> order(n_splits);
    for (std::size_t i = 0; i < n_splits; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::int64_t k = 0; assigned < n; ++k, ++assigned) ++seats[order[static_cast<std::size_t>(k) % n_splits]];

    std::size_t cursor = 0;
    for (std::size_t i = 0; i < n_splits; ++i) {
      for (std::int64_t k = 0; k < seats[i]; ++k, ++cursor) {
        for (const auto* s : by_patient[patients[cursor]])
          out.by_scan[s->scan_id] = fractions[i].first;
      }
    }
  }
  return out;
}

void save_split(const SplitAssignment& split, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw PipelineError("cannot write split file: " + path.string());
  out << "scan_id,split\n";
  for (const auto& [scan, s] : split.by_scan) out << scan << ',' << to_string(s) << '\n';
}

SplitAssignment load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open split file: " + path.string());
  SplitAssignment out;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      if (split_fields(t) != std::vector<std::string>{"scan_id", "split"})
        throw DataError("split file row " + std::to_string(row) + ": expected header scan_id,split");
      header_seen = true;
      continue;
    }
    const auto f = split_fields(t);
    if (f.size() != 2)
      throw DataError("split file row " + std::to_string(row) + ": expected 2 fields");
    if (!out.by_scan.emplace(f[0], split_from_string(f[1])).second)
      throw DataError("split file row " + std::to_string(row) + ": duplicate scan_id '" + f[0] + "'");
  }
  return out;
}

std::map<int, std::int64_t> class_distribution(std::span<const ScanRecord> records) {
  std::map<int, std::int64_t> hist;
  if (records.empty()) return hist;
  const LabelScheme scheme = records.front().label.scheme;
  for (const auto& r : records) {
    if (r.label.scheme != scheme)
      throw DataError("class_distribution: mixed label schemes (" + to_string(scheme) +
                      " vs " + to_string(r.label.scheme) + ")");
    ++hist[r.label.value];
  }
  return hist;
}

std::vector<ScanRecord> filter_split(std::span<const ScanRecord> records,
                                     const SplitAssignment& split, Split which) {
  std::vector<ScanRecord> out;
  for (const auto& r : records)
    if (split.at(r.scan_id) == which) out.push_back(r);
  return out;
}

}  // namespace ctgrade::data
