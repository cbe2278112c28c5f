#ifndef VSLIP_TRACE_IO_HPP
#define VSLIP_TRACE_IO_HPP

#include <string>
#include <vector>

#include "vslip/integrator.hpp"
#include "vslip/metrics.hpp"

namespace vslip {

/// Column names of the trace CSV. Configuration and momentum columns are
/// padded to four entries; unused entries and absent inputs are written as 0.
std::vector<std::string> trace_columns();

/// Trace as CSV with 17 significant digits.
std::string trace_csv(const SimTrace& trace);

/// One line per transition event.
std::string events_csv(const SimTrace& trace);

/// Flat key-value metrics block.
std::string metrics_block(const std::string& name, Model model, const GaitMetrics& metrics);

/// Rows of a comparison table; failed scenarios carry their diagnostic.
struct CompareRow {
  std::string name;
  Model model = Model::VSlip;
  std::string status;  // "ok" or the failure reason
  std::optional<GaitMetrics> metrics;
};
std::string compare_table(const std::vector<CompareRow>& rows);

}  // namespace vslip

#endif  // VSLIP_TRACE_IO_HPP
