#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "veh/fitting.hpp"

namespace veh::io {

// CSV with a single header row naming columns and units; numbers are printed
// with 17 significant digits so repeated runs are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns,
            const std::vector<std::string>& comment_lines = {});
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

  static std::string format(double v);

 private:
  std::ofstream out_;
  size_t n_columns_;
};

// Reads a measured curve for fitting. The header names the columns with their
// units; recognized pairs are r_load_ohm with p_load_{w,mw,uw} and f_hz with
// v_rms_{v,mv}. Excitation and sweep direction come from the run config.
fit::MeasuredCurve read_measured_curve(const std::string& path,
                                       const Excitation& excitation,
                                       std::optional<dyn::SweepDirection> direction);

}  // namespace veh::io
