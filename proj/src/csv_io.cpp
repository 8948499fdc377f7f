#include "infoplane/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "infoplane/errors.hpp"

namespace infoplane {

namespace {

constexpr const char* kEstimatesHeader = "run_id,estimator,layer,epoch,itx_bits,ity_bits";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

template <typename T>
T parse_number(const std::string& token, std::size_t line) {
  try {
    std::size_t used = 0;
    T value;
    if constexpr (std::is_floating_point_v<T>) value = std::stod(token, &used);
    else value = static_cast<T>(std::stoull(token, &used));
    if (used != token.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::logic_error&) {
    throw ParseError("bad number \"" + token + "\"", line);
  }
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_estimates(const std::string& run_id, std::span<const MIEstimate> estimates) {
  std::string out = std::string(kEstimatesHeader) + "\n";
  for (const auto& e : estimates) {
    out += run_id + "," + e.estimator + "," + std::to_string(e.layer) + "," + std::to_string(e.epoch) + "," +
           format_real(e.itx_bits) + "," + format_real(e.ity_bits) + "\n";
  }
  return out;
}

std::vector<EstimateRow> parse_estimates(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<EstimateRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kEstimatesHeader) throw ParseError("expected header \"" + std::string(kEstimatesHeader) + "\"", 1);
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) throw ParseError("expected 6 fields, got " + std::to_string(f.size()), line_no);
    EstimateRow row;
    row.run_id = f[0];
    row.estimate.estimator = f[1];
    row.estimate.layer = parse_number<std::size_t>(f[2], line_no);
    row.estimate.epoch = parse_number<std::size_t>(f[3], line_no);
    row.estimate.itx_bits = parse_number<double>(f[4], line_no);
    row.estimate.ity_bits = parse_number<double>(f[5], line_no);
    rows.push_back(std::move(row));
  }
  if (line_no == 0) throw ParseError("empty estimates file", 0);
  return rows;
}

std::vector<EstimateRow> read_estimates(const std::filesystem::path& path) {
  try {
    return parse_estimates(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string format_plane(const std::string& run_id, const std::string& estimator, const InfoPlane& plane) {
  std::vector<MIEstimate> rows;
  for (std::size_t c = 0; c < plane.epoch_count(); ++c) {
    for (std::size_t r = 0; r < plane.layer_count(); ++r) {
      MIEstimate e;
      e.layer = plane.layers[r];
      e.epoch = plane.epochs[c];
      e.itx_bits = plane.itx(r, c);
      e.ity_bits = plane.ity(r, c);
      e.estimator = estimator;
      rows.push_back(e);
    }
  }
  return format_estimates(run_id, rows);
}

std::string format_scores(std::span<const ScoreRow> rows) {
  std::string out = "run_id,layer,score,accuracy\n";
  for (const auto& r : rows) out += r.run_id + "," + r.layer + "," + format_real(r.score) + "," + format_real(r.accuracy) + "\n";
  return out;
}

std::string format_max_activations(const MaxActivationReport& report) {
  std::string out = "epoch,layer,max_abs\n";
  for (std::size_t s = 0; s < report.epochs.size(); ++s) {
    const auto epoch = std::to_string(report.epochs[s]);
    for (std::size_t l = 0; l < report.layer_max.cols(); ++l)
      out += epoch + "," + std::to_string(l) + "," + format_real(report.layer_max(s, l)) + "\n";
    out += epoch + ",network," + format_real(report.network_max[s]) + "\n";
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace infoplane
