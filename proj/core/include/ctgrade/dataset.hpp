#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctgrade/errors.hpp"

namespace ctgrade::data {

enum class LabelScheme { Corads, Ictcf, Binary };

std::string to_string(LabelScheme s);
LabelScheme scheme_from_string(const std::string& s);

// iCTCF rows graded "Suspected" have no etiological confirmation; they may
// appear in manifests but are excluded from evaluation.
inline constexpr int kIctcfSuspected = -1;

// Legal values per scheme (sentinel excluded):
//   corads: 1..5, ictcf: 0=Control 1=Mild 2=Regular 3=Severe 4=Critically ill,
//   binary: 0/1.
bool label_value_valid(LabelScheme scheme, int value);
std::vector<int> scheme_values(LabelScheme scheme);
std::string label_value_name(LabelScheme scheme, int value);

struct GradeLabel {
  LabelScheme scheme = LabelScheme::Corads;
  int value = 1;
  bool operator==(const GradeLabel&) const = default;
};

// CO-RADS 1-2 and iCTCF Control map to the negative class; everything else is
// positive. Binary input is rejected rather than silently remapped.
GradeLabel to_binary(const GradeLabel& label);

struct ScanRecord {
  std::string scan_id;
  std::string patient_id;
  std::filesystem::path volume_path;
  GradeLabel label;
};

enum class Split { Train, Validation, Test };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct SplitAssignment {
  std::map<std::string, Split> by_scan;

  Split at(const std::string& scan_id) const;
};

// Manifest: UTF-8 CSV with header scan_id,patient_id,volume_path,scheme,label.
// Lines starting with '#' are ignored. Relative volume paths are resolved
// against the manifest's directory.
std::vector<ScanRecord> load_manifest(const std::filesystem::path& path);
void save_manifest(std::span<const ScanRecord> records, const std::filesystem::path& path);

// Ordered so that remainder ties during seat allocation resolve
// deterministically in declaration order.
using SplitFractions = std::vector<std::pair<Split, double>>;

// Patient-grouped stratified split. Patients are grouped, each patient is
// assigned the majority label value among their scans as stratum (ties to the
// larger value), patients are shuffled within each stratum by the seed, and
// seats are allocated per stratum by largest remainder. All scans of a
// patient land in one split; per-class patient counts are within +-1 of the
// fraction targets.
SplitAssignment stratified_patient_split(std::span<const ScanRecord> records,
                                         const SplitFractions& fractions,
                                         std::uint64_t seed);

// Split file: CSV scan_id,split with split in {train,validation,test}.
void save_split(const SplitAssignment& split, const std::filesystem::path& path);
SplitAssignment load_split(const std::filesystem::path& path);

// Histogram of label values. All records must share one scheme.
std::map<int, std::int64_t> class_distribution(std::span<const ScanRecord> records);

std::vector<ScanRecord> filter_split(std::span<const ScanRecord> records,
                                     const SplitAssignment& split, Split which);

}  // namespace ctgrade::data
