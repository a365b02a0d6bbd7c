#include "veh/csv.hpp"

#include <cstdio>
#include <sstream>

namespace veh::io {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::string>& comment_lines)
    : out_(path), n_columns_(columns.size()) {
  if (!out_) throw model_error("CsvWriter: cannot open '" + path + "' for writing");
  for (const auto& line : comment_lines) out_ << "# " << line << "\n";
  for (size_t i = 0; i < columns.size(); ++i) {
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }
}

std::string CsvWriter::format(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
  veh::detail::require(values.size() == n_columns_, "CsvWriter: column count mismatch");
  for (size_t i = 0; i < values.size(); ++i) {
    out_ << format(values[i]) << (i + 1 < values.size() ? "," : "\n");
  }
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  veh::detail::require(cells.size() == n_columns_, "CsvWriter: column count mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

fit::MeasuredCurve read_measured_curve(const std::string& path,
                                       const Excitation& excitation,
                                       std::optional<dyn::SweepDirection> direction) {
  std::ifstream in(path);
  if (!in) throw model_error("read_measured_curve: cannot open '" + path + "'");

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.size() != 2) {
    throw model_error("read_measured_curve: expected a two-column header naming units");
  }

  fit::CurveKind kind;
  double y_scale = 1.0;
  if (header[0] == "r_load_ohm") {
    kind = fit::CurveKind::power_vs_load;
    if (header[1] == "p_load_w") y_scale = 1.0;
    else if (header[1] == "p_load_mw") y_scale = 1e-3;
    else if (header[1] == "p_load_uw") y_scale = 1e-6;
    else throw model_error("read_measured_curve: unknown power unit column '" + header[1] + "'");
  } else if (header[0] == "f_hz") {
    kind = fit::CurveKind::voltage_vs_frequency;
    if (header[1] == "v_rms_v") y_scale = 1.0;
    else if (header[1] == "v_rms_mv") y_scale = 1e-3;
    else throw model_error("read_measured_curve: unknown voltage unit column '" + header[1] + "'");
  } else {
    throw model_error("read_measured_curve: unknown x column '" + header[0] + "'");
  }

  std::vector<double> xs, ys;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2) {
      throw model_error("read_measured_curve: line " + std::to_string(line_no) +
                        ": expected two cells");
    }
    try {
      xs.push_back(std::stod(cells[0]));
      ys.push_back(std::stod(cells[1]));
    } catch (const std::exception&) {
      throw model_error("read_measured_curve: line " + std::to_string(line_no) +
                        ": not numeric");
    }
  }
  return fit::MeasuredCurve(kind, std::move(xs), std::move(ys), y_scale, excitation,
                            direction);
}

}  // namespace veh::io
