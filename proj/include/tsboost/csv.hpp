#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tsboost/core.hpp"

// File formats used by the command-line tool. All writers emit LF line endings
// and shortest round-trip decimal numbers.
namespace tsboost::io {

// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

// Strict full-field parse; throws ParseError naming `where` on failure.
double parse_double(std::string_view field, std::string_view where);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

CsvTable read_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

// Wide format: header "id,<t1>,...,<tn>", one series per row. Header time
// entries that are not numbers (for example "t1") give the domain 1..n.
Dataset read_wide(const std::filesystem::path& path);
std::string format_wide(const Dataset& data);

// Long format: header "id,t,value". Ids keep their first-appearance order and
// every id must cover the same time points.
Dataset read_long(const std::filesystem::path& path);

// "id,label" with 1-based integer labels.
struct Labels {
  std::vector<std::string> ids;
  std::vector<int> labels;
};
Labels read_labels(const std::filesystem::path& path);
std::string format_labels(const std::vector<std::string>& ids, const std::vector<int>& labels,
                          std::string_view label_column = "label");

// "id,k1,...,kK".
struct MembershipFile {
  std::vector<std::string> ids;
  MembershipMatrix P;
};
MembershipFile read_membership(const std::filesystem::path& path);
std::string format_membership(const std::vector<std::string>& ids, const Matrix& p);

}  // namespace tsboost::io
