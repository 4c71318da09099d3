#pragma once

// On-disk formats.
//
// Model spec (JSON):
//   {"n": 2, "m": 2, "p": 1, "tau": 10,
//    "F": [[1, 0], [0, 1]],            constant matrix, or
//    "C": [[[..]], [[..]], ...],       one matrix per step
//    "H": ..., "S": ..., "R": ...,
//    "inputs": {"f": [...], "g": [...], "w": [...]},   optional
//    "generator": "oscillator"}                         optional
//
// Per-step lists hold tau+1 matrices (tau for C). Inputs use the same
// constant-or-per-step convention with vectors; missing ones are zero.
//
// CSV: header row, comma delimiter, LF line endings, numbers printed with
// 17 significant digits, infinities as "inf" / "-inf".

#include "descfilt/model.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace descfilt {

struct ModelSpec {
  DescriptorModel model;
  std::optional<InputSequences> inputs;
  std::string generator;  // empty when none requested
};

/// Throws ParseError; syntax errors carry "line L, column C".
ModelSpec parse_model_spec(std::string_view text);
ModelSpec load_model_spec(const std::string& path);

std::string dump_model_spec(const DescriptorModel& model,
                            const InputSequences* inputs = nullptr);

/// Inputs produced by a named generator for the given model.
InputSequences generate_inputs(std::string_view generator, const DescriptorModel& model);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column, or -1.
  int column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable load_csv(const std::string& path);

std::string format_number(double v);

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Columns k, x0.., f0.., g0.., y0...
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Reads y_0..y_{steps-1}. Uses columns named y0..y{p-1} when present,
/// otherwise expects exactly k followed by p value columns.
VecSeq measurements_from_csv(const CsvTable& table, Index p, Index steps);

/// Writes measurements as columns k, y0...
void write_measurements_csv(std::ostream& os, const VecSeq& ys);

std::string read_text_file(const std::string& path);

}  // namespace descfilt
