#include "tsboost/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace tsboost::io {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string location(const std::filesystem::path& path, std::size_t line, std::size_t column) {
  return path.string() + ":" + std::to_string(line) + ", column " + std::to_string(column);
}

Dataset checked(Dataset d, const std::filesystem::path& path) {
  try {
    validate_dataset(d);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  return d;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::string_view where) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (field.empty() || res.ec != std::errc() || res.ptr != last)
    throw Error(ErrorCode::ParseError,
                std::string(where) + ": cannot parse '" + std::string(field) + "' as a number");
  return value;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw Error(ErrorCode::ParseError, location(path, number, std::min(fields.size(), table.header.size()) + 1) +
                                             ": expected " + std::to_string(table.header.size()) +
                                             " fields, found " + std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(number);
  }
  if (!have_header) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  return table;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Dataset read_wide(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 3 || table.header[0] != "id")
    throw Error(ErrorCode::ParseError,
                location(path, 1, 1) + ": wide format needs a header 'id,t1,...,tn' with n >= 2");
  Dataset data;
  const std::size_t n = table.header.size() - 1;
  data.domain.resize(n);
  bool numeric = true;
  for (std::size_t j = 0; j < n; ++j) {
    try {
      data.domain[j] = parse_double(table.header[j + 1], "");
    } catch (const Error&) {
      numeric = false;
      break;
    }
  }
  if (!numeric)
    for (std::size_t j = 0; j < n; ++j) data.domain[j] = static_cast<double>(j + 1);

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    TimeSeriesRecord rec{row[0], std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j)
      rec.values[j] = parse_double(row[j + 1], location(path, table.line_numbers[r], j + 2));
    data.series.push_back(std::move(rec));
  }
  return checked(std::move(data), path);
}

std::string format_wide(const Dataset& data) {
  std::string out = "id";
  for (double t : data.domain) out += "," + format_double(t);
  out += "\n";
  for (const auto& s : data.series) {
    out += s.id;
    for (double v : s.values) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

Dataset read_long(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header != std::vector<std::string>{"id", "t", "value"})
    throw Error(ErrorCode::ParseError, location(path, 1, 1) + ": long format needs header 'id,t,value'");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> points;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const double t = parse_double(row[1], location(path, table.line_numbers[r], 2));
    const double v = parse_double(row[2], location(path, table.line_numbers[r], 3));
    auto [it, inserted] = points.try_emplace(row[0]);
    if (inserted) order.push_back(row[0]);
    it->second.emplace_back(t, v);
  }
  Dataset data;
  for (const auto& id : order) {
    auto& p = points[id];
    std::stable_sort(p.begin(), p.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> times, values;
    for (const auto& [t, v] : p) {
      times.push_back(t);
      values.push_back(v);
    }
    if (data.series.empty()) {
      data.domain = times;
    } else if (times != data.domain) {
      throw Error(ErrorCode::RaggedLengths,
                  path.string() + ": series '" + id + "' is not observed on the shared time grid");
    }
    data.series.push_back({id, std::move(values)});
  }
  return checked(std::move(data), path);
}

Labels read_labels(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 2 || table.header[0] != "id")
    throw Error(ErrorCode::ParseError, location(path, 1, 1) + ": labels need header 'id,label'");
  Labels out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string where = location(path, table.line_numbers[r], 2);
    const double v = parse_double(table.rows[r][1], where);
    if (v < 1 || v != static_cast<double>(static_cast<int>(v)))
      throw Error(ErrorCode::ParseError, where + ": labels must be positive integers");
    out.ids.push_back(table.rows[r][0]);
    out.labels.push_back(static_cast<int>(v));
  }
  return out;
}

std::string format_labels(const std::vector<std::string>& ids, const std::vector<int>& labels,
                          std::string_view label_column) {
  std::string out = "id," + std::string(label_column) + "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out += ids[i] + "," + std::to_string(labels[i]) + "\n";
  return out;
}

MembershipFile read_membership(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2 || table.header[0] != "id")
    throw Error(ErrorCode::ParseError, location(path, 1, 1) + ": membership needs header 'id,k1,...'");
  const std::size_t k = table.header.size() - 1;
  Matrix p(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(k));
  MembershipFile out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out.ids.push_back(table.rows[r][0]);
    for (std::size_t c = 0; c < k; ++c)
      p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_double(table.rows[r][c + 1], location(path, table.line_numbers[r], c + 2));
  }
  try {
    out.P = MembershipMatrix(std::move(p));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return out;
}

std::string format_membership(const std::vector<std::string>& ids, const Matrix& p) {
  std::string out = "id";
  for (Eigen::Index k = 0; k < p.cols(); ++k) out += ",k" + std::to_string(k + 1);
  out += "\n";
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    out += ids[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < p.cols(); ++k) out += "," + format_double(p(i, k));
    out += "\n";
  }
  return out;
}

}  // namespace tsboost::io
