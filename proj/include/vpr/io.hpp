#pragma once

#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vpr/experiment.hpp"
#include "vpr/map_model.hpp"

namespace vpr {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed measurement or matrix file content. Messages carry the 1-based line.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

/// Shortest round-trip decimal form.
std::string format_double(double value);

/// One matrix row per line, comma separated, values in round-trip form.
std::string matrix_to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd parse_matrix_csv(std::string_view text);

/// Plain (P2) grayscale image, one pixel per entry, pixel = round(255 * p / max).
std::string matrix_to_pgm(const Eigen::MatrixXd& m);

/// One node id per line; blank lines are skipped. Ids must lie in 1..num_nodes.
std::vector<NodeId> parse_measurements(std::string_view text, int num_nodes);

inline constexpr std::string_view kResultsHeader =
    "trial,k,true_state,measured,filter_estimate,smoother_estimate";

/// Header plus one row per step per trial. Columns for a method that was not
/// requested are left empty.
void write_results_csv(std::ostream& out, std::span<const TrialOutcome> outcomes,
                       bool with_filter, bool with_smoother);

}  // namespace vpr
