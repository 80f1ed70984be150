#pragma once

// Small CSV helpers shared by the library writers and the command-line tool.
// Lines starting with '#' are comments and are skipped by every reader.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace sphgraph {

/// Shortest text that round-trips: 17 significant digits.
std::string format_double(double v);

/// Whole-string parse; throws InvalidArgument on trailing garbage.
double parse_double(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep = ',');

/// Non-comment, non-empty lines split on commas (header row included).
std::vector<std::vector<std::string>> read_csv_rows(std::istream& in);

/// `index,value` rows.
void write_signal_csv(std::ostream& out, const Eigen::Ref<const Eigen::VectorXd>& f);
/// Reads the last column of `index,value` rows; indices must run 0..n-1 in order.
Eigen::VectorXd read_signal_csv(std::istream& in);

}  // namespace sphgraph
