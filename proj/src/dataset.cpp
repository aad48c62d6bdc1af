#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "transrad/error.hpp"
#include "transrad/harness.hpp"

namespace transrad {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(out);
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

struct Record {
  std::size_t line = 0;
  std::vector<std::string_view> fields;
};

// Keeps the file contents alive for the string_views in the records.
struct RawFile {
  std::vector<std::string> lines;
  std::vector<Record> records;
};

RawFile read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open dataset " + path.string());
  RawFile raw;
  std::string line;
  while (std::getline(in, line)) raw.lines.push_back(line);
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on " + path.string());
  for (std::size_t i = 0; i < raw.lines.size(); ++i) {
    const std::string_view t = trim(raw.lines[i]);
    if (t.empty() || t.front() == '#' || t.front() == '@') continue;
    raw.records.push_back({i + 1, split_fields(t)});
  }
  if (raw.records.empty()) throw Error(ErrorCode::kParse, path.string() + ": no data rows");
  return raw;
}

FullSample load_voting(const std::filesystem::path& path) {
  const RawFile raw = read_records(path);
  const auto n = static_cast<Eigen::Index>(raw.records.size());
  Eigen::MatrixXd x(n, 16);
  std::vector<int> y;
  y.reserve(raw.records.size());
  auto party = [](std::string_view s) {
    if (s == "democrat") return 1;
    if (s == "republican") return -1;
    return 0;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const Record& rec = raw.records[static_cast<std::size_t>(i)];
    if (rec.fields.size() != 17) {
      throw Error(ErrorCode::kParse, where(path, rec.line) + "expected 17 fields, found " +
                                         std::to_string(rec.fields.size()));
    }
    std::size_t first_attr = 0;
    int label = party(rec.fields.front());
    if (label != 0) {
      first_attr = 1;
    } else {
      label = party(rec.fields.back());
    }
    if (label == 0) {
      throw Error(ErrorCode::kLabel, where(path, rec.line) + "label must be democrat or republican");
    }
    for (Eigen::Index j = 0; j < 16; ++j) {
      const std::string_view v = rec.fields[first_attr + static_cast<std::size_t>(j)];
      if (v == "y") {
        x(i, j) = 1.0;
      } else if (v == "n") {
        x(i, j) = -1.0;
      } else if (v == "?") {
        x(i, j) = 0.0;
      } else {
        throw Error(ErrorCode::kParse, where(path, rec.line) + "attribute " + std::to_string(j + 1) +
                                           " must be y, n or ?, found '" + std::string(v) + "'");
      }
    }
    y.push_back(label);
  }
  return FullSample(std::move(x), std::move(y));
}

void standardize_columns(Eigen::MatrixXd& x) {
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).sum() / n;
    x.col(j).array() -= mean;
    const double sd = std::sqrt(x.col(j).squaredNorm() / n);
    if (sd > 0.0) x.col(j) /= sd;
  }
}

FullSample load_pima(const std::filesystem::path& path) {
  const RawFile raw = read_records(path);
  const auto n = static_cast<Eigen::Index>(raw.records.size());
  Eigen::MatrixXd x(n, 8);
  std::vector<int> y;
  y.reserve(raw.records.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Record& rec = raw.records[static_cast<std::size_t>(i)];
    if (rec.fields.size() != 9) {
      throw Error(ErrorCode::kParse, where(path, rec.line) + "expected 9 fields, found " +
                                         std::to_string(rec.fields.size()));
    }
    for (Eigen::Index j = 0; j < 8; ++j) {
      if (!parse_double(rec.fields[static_cast<std::size_t>(j)], x(i, j))) {
        throw Error(ErrorCode::kParse, where(path, rec.line) + "attribute " + std::to_string(j + 1) +
                                           " is not a number");
      }
    }
    const std::string_view l = rec.fields[8];
    if (l == "1" || l == "tested_positive") {
      y.push_back(1);
    } else if (l == "0" || l == "tested_negative") {
      y.push_back(-1);
    } else {
      throw Error(ErrorCode::kLabel, where(path, rec.line) + "label must be 0/1 or tested_negative/tested_positive");
    }
  }
  standardize_columns(x);
  return FullSample(std::move(x), std::move(y));
}

FullSample load_generic(const std::filesystem::path& path) {
  const RawFile raw = read_records(path);
  std::size_t first = 0;
  {
    // A first row with no numeric field is a header.
    double dummy = 0.0;
    const auto& f = raw.records.front().fields;
    if (std::none_of(f.begin(), f.end(), [&](std::string_view s) { return parse_double(s, dummy); })) {
      first = 1;
    }
  }
  if (first >= raw.records.size()) throw Error(ErrorCode::kParse, path.string() + ": no data rows");
  const std::size_t width = raw.records[first].fields.size();
  if (width < 2) {
    throw Error(ErrorCode::kParse, where(path, raw.records[first].line) + "need at least one feature and a label");
  }
  const auto n = static_cast<Eigen::Index>(raw.records.size() - first);
  const auto d = static_cast<Eigen::Index>(width - 1);
  Eigen::MatrixXd x(n, d);
  std::vector<int> y;
  y.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Record& rec = raw.records[first + static_cast<std::size_t>(i)];
    if (rec.fields.size() != width) {
      throw Error(ErrorCode::kParse, where(path, rec.line) + "expected " + std::to_string(width) +
                                         " fields, found " + std::to_string(rec.fields.size()));
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!parse_double(rec.fields[static_cast<std::size_t>(j)], x(i, j))) {
        throw Error(ErrorCode::kParse, where(path, rec.line) + "field " + std::to_string(j + 1) +
                                           " is not a number");
      }
    }
    double label = 0.0;
    if (!parse_double(rec.fields.back(), label)) {
      throw Error(ErrorCode::kParse, where(path, rec.line) + "label is not a number");
    }
    if (label != 1.0 && label != -1.0) {
      throw Error(ErrorCode::kLabel, where(path, rec.line) + "label must be -1 or 1");
    }
    y.push_back(label > 0.0 ? 1 : -1);
  }
  return FullSample(std::move(x), std::move(y));
}

}  // namespace

FullSample load_dataset(const std::filesystem::path& path, DatasetSchema schema) {
  switch (schema) {
    case DatasetSchema::kVoting: return load_voting(path);
    case DatasetSchema::kPima: return load_pima(path);
    case DatasetSchema::kGenericCsv: return load_generic(path);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown dataset schema");
}

std::string preprocessing_note(DatasetSchema schema) {
  switch (schema) {
    case DatasetSchema::kVoting:
      return "attributes y=+1 n=-1 ?=0, no scaling; democrat=+1 republican=-1; a constant attribute 1 "
             "is appended for the similarity graph so records with every vote missing stay comparable";
    case DatasetSchema::kPima:
      return "attributes z-scored with the population standard deviation; positive=+1 negative=-1";
    case DatasetSchema::kGenericCsv:
      return "features used as given; last column is the +-1 label";
  }
  return "";
}

Eigen::MatrixXd graph_features(const FullSample& sample, DatasetSchema schema) {
  if (schema != DatasetSchema::kVoting) return sample.features;
  Eigen::MatrixXd x(sample.features.rows(), sample.features.cols() + 1);
  x << sample.features, Eigen::VectorXd::Ones(sample.features.rows());
  return x;
}

}  // namespace transrad
