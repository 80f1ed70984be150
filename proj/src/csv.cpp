#include "sphgraph/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "sphgraph/errors.hpp"

namespace sphgraph {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(split(line));
  }
  return rows;
}

void write_signal_csv(std::ostream& out, const Eigen::Ref<const Eigen::VectorXd>& f) {
  out << "index,value\n";
  char buf[64];
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g\n", static_cast<long>(i), f[i]);
    out << buf;
  }
}

Eigen::VectorXd read_signal_csv(std::istream& in) {
  auto rows = read_csv_rows(in);
  if (!rows.empty() && !rows[0].empty() && rows[0][0] == "index") rows.erase(rows.begin());
  Eigen::VectorXd f(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2 || parse_double(rows[i][0]) != static_cast<double>(i)) {
      throw InvalidArgument("signal file: expected `index,value` rows numbered from 0");
    }
    f[static_cast<Eigen::Index>(i)] = parse_double(rows[i][1]);
  }
  return f;
}

}  // namespace sphgraph
