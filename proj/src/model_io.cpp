#include "descfilt/model_io.hpp"

#include "descfilt/errors.hpp"
#include "descfilt/reference_example.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace descfilt {

using nlohmann::json;

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Index read_dim(const json& doc, const char* key, bool allow_zero) {
  if (!doc.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < (allow_zero ? 0 : 1)) {
    throw ParseError(std::string("field \"") + key + "\" must be a " +
                     (allow_zero ? "nonnegative" : "positive") + " integer");
  }
  return static_cast<Index>(v.get<long long>());
}

Mat read_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty 2-D array");
  const Index rows = static_cast<Index>(j.size());
  if (!j[0].is_array()) throw ParseError(where + ": expected rows as arrays");
  const Index cols = static_cast<Index>(j[0].size());
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ParseError(where + ": row " + std::to_string(i) + " has wrong length");
    }
    for (Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ParseError(where + ": non-numeric entry");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

// A matrix field is either one 2-D array (constant) or a list of them.
MatSeq read_matrix_sequence(const json& doc, const char* key, Index count) {
  if (!doc.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  const json& j = doc.at(key);
  const bool per_step = j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() &&
                        j[0][0].is_array();
  if (!per_step) return constant_sequence(read_matrix(j, key), count);
  if (static_cast<Index>(j.size()) != count) {
    throw ParseError(std::string("field \"") + key + "\" lists " + std::to_string(j.size()) +
                     " matrices, expected " + std::to_string(count));
  }
  MatSeq out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(read_matrix(j[k], std::string(key) + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Vec read_vector(const json& j, const std::string& where, Index dim) {
  if (!j.is_array() || static_cast<Index>(j.size()) != dim) {
    throw ParseError(where + ": expected an array of " + std::to_string(dim) + " numbers");
  }
  Vec v(dim);
  for (Index i = 0; i < dim; ++i) {
    const json& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw ParseError(where + ": non-numeric entry");
    v(i) = e.get<double>();
  }
  return v;
}

VecSeq read_vector_sequence(const json& inputs, const char* key, Index dim, Index count) {
  if (!inputs.contains(key)) return zero_sequence(dim, count);
  const json& j = inputs.at(key);
  const bool per_step = j.is_array() && !j.empty() && j[0].is_array();
  if (!per_step) return VecSeq(static_cast<std::size_t>(count), read_vector(j, key, dim));
  if (static_cast<Index>(j.size()) != count) {
    throw ParseError(std::string("inputs.") + key + " lists " + std::to_string(j.size()) +
                     " vectors, expected " + std::to_string(count));
  }
  VecSeq out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(read_vector(j[k], std::string("inputs.") + key + "[" + std::to_string(k) + "]",
                              dim));
  }
  return out;
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json sequence_json(const MatSeq& seq) {
  bool constant = !seq.empty();
  for (const Mat& m : seq) constant = constant && m == seq.front();
  if (constant) return matrix_json(seq.front());
  json out = json::array();
  for (const Mat& m : seq) out.push_back(matrix_json(m));
  return out;
}

json vectors_json(const VecSeq& seq) {
  json out = json::array();
  for (const Vec& v : seq) out.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  return out;
}

double parse_cell(std::string_view cell, std::size_t line) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
    cell.remove_suffix(1);
  }
  if (cell == "inf" || cell == "+inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line) + ": invalid number \"" + std::string(cell) +
                     "\"");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelSpec parse_model_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at " + line_column(text, e.byte ? e.byte - 1 : 0) + ": " +
                     e.what());
  }
  if (!doc.is_object()) throw ParseError("model spec must be a JSON object");

  ModelSpec spec;
  DescriptorModel& mdl = spec.model;
  mdl.n = read_dim(doc, "n", false);
  mdl.m = read_dim(doc, "m", false);
  mdl.p = read_dim(doc, "p", false);
  mdl.tau = read_dim(doc, "tau", true);
  const Index steps = mdl.tau + 1;
  mdl.F = read_matrix_sequence(doc, "F", steps);
  mdl.C = mdl.tau > 0 || doc.contains("C") ? read_matrix_sequence(doc, "C", mdl.tau) : MatSeq{};
  mdl.H = read_matrix_sequence(doc, "H", steps);
  mdl.S = read_matrix_sequence(doc, "S", steps);
  mdl.R = read_matrix_sequence(doc, "R", steps);
  const auto report = validate(mdl);
  if (!report.ok()) throw ParseError("invalid model: " + report.summary());

  if (doc.contains("inputs")) {
    const json& in = doc.at("inputs");
    if (!in.is_object()) throw ParseError("field \"inputs\" must be an object");
    spec.inputs = InputSequences{read_vector_sequence(in, "f", mdl.m, steps),
                                 read_vector_sequence(in, "g", mdl.p, steps),
                                 read_vector_sequence(in, "w", mdl.n, steps)};
  }
  if (doc.contains("generator")) {
    if (!doc.at("generator").is_string()) throw ParseError("field \"generator\" must be a string");
    spec.generator = doc.at("generator").get<std::string>();
    generate_inputs(spec.generator, mdl);  // reject unknown or ill-fitting generators early
  }
  return spec;
}

ModelSpec load_model_spec(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_model_spec(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string dump_model_spec(const DescriptorModel& model, const InputSequences* inputs) {
  json doc;
  doc["n"] = model.n;
  doc["m"] = model.m;
  doc["p"] = model.p;
  doc["tau"] = model.tau;
  doc["F"] = sequence_json(model.F);
  if (!model.C.empty()) doc["C"] = sequence_json(model.C);
  doc["H"] = sequence_json(model.H);
  doc["S"] = sequence_json(model.S);
  doc["R"] = sequence_json(model.R);
  if (inputs) {
    doc["inputs"] = {{"f", vectors_json(inputs->f)},
                     {"g", vectors_json(inputs->g)},
                     {"w", vectors_json(inputs->w)}};
  }
  return doc.dump(2) + "\n";
}

InputSequences generate_inputs(std::string_view generator, const DescriptorModel& model) {
  if (generator == "zero") return zero_inputs(model);
  if (generator == "oscillator") {
    if (model.n != 4 || model.m != 2 || model.p != 1) {
      throw ParseError("generator \"oscillator\" needs n=4, m=2, p=1");
    }
    return reference::oscillator_inputs(model.tau);
  }
  throw ParseError("unknown generator \"" + std::string(generator) + "\"");
}

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (table.header.empty()) {
      for (auto c : cells) table.header.emplace_back(c);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " columns, got " +
                       std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_cell(c, line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ParseError("CSV has no header row");
  return table;
}

CsvTable load_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_csv(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  std::vector<std::string> header{"k"};
  const auto add = [&header](const char* prefix, const VecSeq& seq) {
    const Index dim = seq.empty() ? 0 : seq.front().size();
    for (Index i = 0; i < dim; ++i) header.push_back(prefix + std::to_string(i));
  };
  add("x", traj.states);
  add("f", traj.inputs);
  add("g", traj.noises);
  add("y", traj.outputs);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    std::vector<double> row{static_cast<double>(k)};
    for (const VecSeq* seq : {&traj.states, &traj.inputs, &traj.noises, &traj.outputs}) {
      const Vec& v = (*seq)[k];
      row.insert(row.end(), v.data(), v.data() + v.size());
    }
    rows.push_back(std::move(row));
  }
  write_csv(os, header, rows);
}

VecSeq measurements_from_csv(const CsvTable& table, Index p, Index steps) {
  std::vector<int> cols;
  for (Index i = 0; i < p; ++i) cols.push_back(table.column("y" + std::to_string(i)));
  const bool named = std::all_of(cols.begin(), cols.end(), [](int c) { return c >= 0; });
  if (!named) {
    if (static_cast<Index>(table.header.size()) != p + 1) {
      throw ParseError("measurement CSV needs columns y0..y" + std::to_string(p - 1) +
                       " or exactly k plus " + std::to_string(p) + " value columns");
    }
    for (Index i = 0; i < p; ++i) cols[static_cast<std::size_t>(i)] = static_cast<int>(i + 1);
  }
  if (static_cast<Index>(table.rows.size()) < steps) {
    throw ParseError("measurement CSV has " + std::to_string(table.rows.size()) +
                     " rows, need " + std::to_string(steps));
  }
  const int kcol = table.column("k");
  VecSeq ys;
  for (Index k = 0; k < steps; ++k) {
    const auto& row = table.rows[static_cast<std::size_t>(k)];
    if (kcol >= 0 && row[static_cast<std::size_t>(kcol)] != static_cast<double>(k)) {
      throw ParseError("measurement row " + std::to_string(k + 2) + " has k = " +
                       format_number(row[static_cast<std::size_t>(kcol)]) + ", expected " +
                       std::to_string(k));
    }
    Vec y(p);
    for (Index i = 0; i < p; ++i) y(i) = row[static_cast<std::size_t>(cols[static_cast<std::size_t>(i)])];
    if (!y.allFinite()) throw ParseError("measurement row for k = " + std::to_string(k) + " is not finite");
    ys.push_back(std::move(y));
  }
  return ys;
}

void write_measurements_csv(std::ostream& os, const VecSeq& ys) {
  std::vector<std::string> header{"k"};
  const Index p = ys.empty() ? 0 : ys.front().size();
  for (Index i = 0; i < p; ++i) header.push_back("y" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    std::vector<double> row{static_cast<double>(k)};
    row.insert(row.end(), ys[k].data(), ys[k].data() + ys[k].size());
    rows.push_back(std::move(row));
  }
  write_csv(os, header, rows);
}

}  // namespace descfilt
