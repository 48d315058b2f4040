#include "ctgrade/predictions.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctgrade/errors.hpp"

namespace ctgrade {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_predictions(const std::vector<PredictionRow>& rows,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw PipelineError("cannot write predictions: " + path.string());
  const std::size_t n_raw = rows.empty() ? 1 : rows.front().raw.size();
  out << "scan_id,positive_score,corads";
  for (std::size_t i = 0; i < n_raw; ++i) out << ",raw_" << i;
  out << '\n';
  char buf[64];
  for (const auto& r : rows) {
    if (r.raw.size() != n_raw)
      throw PipelineError("write_predictions: inconsistent raw output arity");
    std::snprintf(buf, sizeof(buf), "%.17g", r.positive_score);
    out << r.scan_id << ',' << buf << ',' << r.corads;
    for (double v : r.raw) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

std::vector<PredictionRow> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions: " + path.string());
  std::vector<PredictionRow> rows;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_csv(line);
    if (!header_seen) {
      if (f.size() < 4 || f[0] != "scan_id" || f[1] != "positive_score" || f[2] != "corads")
        throw DataError("predictions row " + std::to_string(row) +
                        ": expected header scan_id,positive_score,corads,raw_0...");
      header_seen = true;
      continue;
    }
    if (f.size() < 4)
      throw DataError("predictions row " + std::to_string(row) + ": expected >= 4 fields");
    PredictionRow r;
    r.scan_id = f[0];
    try {
      r.positive_score = std::stod(f[1]);
      r.corads = std::stoi(f[2]);
      for (std::size_t i = 3; i < f.size(); ++i) r.raw.push_back(std::stod(f[i]));
    } catch (const std::exception&) {
      throw DataError("predictions row " + std::to_string(row) + ": malformed number");
    }
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw DataError("predictions file has no header: " + path.string());
  return rows;
}

}  // namespace ctgrade
