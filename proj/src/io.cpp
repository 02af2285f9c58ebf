#include "vpr/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vpr {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error writing '" + path + "'");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view cell = trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

std::string matrix_to_pgm(const Eigen::MatrixXd& m) {
  const double max_entry = m.size() ? m.maxCoeff() : 0.0;
  std::ostringstream os;
  os << "P2\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const long pixel = max_entry > 0.0 ? std::lround(255.0 * m(i, j) / max_entry) : 0;
      os << (j ? " " : "") << pixel;
    }
    os << '\n';
  }
  return os.str();
}

std::vector<NodeId> parse_measurements(std::string_view text, int num_nodes) {
  std::vector<NodeId> out;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    NodeId id = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), id);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw FormatError("line " + std::to_string(line_no) + ": '" + std::string(line) +
                        "' is not a node id");
    }
    if (id < 1 || id > num_nodes) {
      throw FormatError("line " + std::to_string(line_no) + ": measurement " + std::to_string(id) +
                        " out of range 1.." + std::to_string(num_nodes));
    }
    out.push_back(id);
  }
  return out;
}

void write_results_csv(std::ostream& out, std::span<const TrialOutcome> outcomes, bool with_filter,
                       bool with_smoother) {
  out << kResultsHeader << '\n';
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const TrialOutcome& o = outcomes[t];
    for (std::size_t k = 0; k < o.sample.true_states.size(); ++k) {
      out << t << ',' << k + 1 << ',' << o.sample.true_states[k] << ',' << o.sample.measurements[k] << ',';
      if (with_filter) out << o.filter_estimates[k];
      out << ',';
      if (with_smoother) out << o.smoother_estimates[k];
      out << '\n';
    }
  }
}

}  // namespace vpr
