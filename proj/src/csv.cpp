#include "oobball/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

#include "oobball/errors.hpp"

namespace oobball {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

double parse_number(std::string_view cell, const std::string& where) {
  if (cell == "inf" || cell == "Inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const char* begin = cell.data();
  if (!cell.empty() && cell.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (cell.empty() || ec != std::errc() || ptr != end)
    throw ParseError(where + ": '" + std::string(cell) + "' is not a number");
  return v;
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto cells = split(s);
    if (!have_header) {
      for (auto c : cells) t.header.emplace_back(c);
      have_header = true;
      continue;
    }
    const std::string where = source + " line " + std::to_string(line_no);
    if (cells.size() != t.header.size())
      throw ParseError(where + ": expected " + std::to_string(t.header.size()) + " fields, found " +
                       std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_number(c, where));
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError(source + ": missing header row");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

std::vector<std::string> predictor_columns(const ProductSpace& space) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < space.arity(); ++j)
    for (std::size_t k = 0; k < space[j].coordinate_count(); ++k)
      out.push_back("x" + std::to_string(j + 1) + ":" + space[j].to_string() + "[" + std::to_string(k) + "]");
  return out;
}

std::vector<std::string> response_columns(const SpaceDescriptor& space) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < space.coordinate_count(); ++k)
    out.push_back("y:" + space.to_string() + "[" + std::to_string(k) + "]");
  return out;
}

std::pair<ProductSpace, std::optional<SpaceDescriptor>> infer_spaces(const std::vector<std::string>& header) {
  std::vector<SpaceDescriptor> features;
  std::optional<SpaceDescriptor> response;
  std::size_t col = 0;
  while (col < header.size()) {
    const std::string& name = header[col];
    const auto colon = name.find(':');
    const auto bracket = name.rfind('[');
    if (colon == std::string::npos || bracket == std::string::npos || bracket < colon)
      throw ParseError("column '" + name + "' does not follow the <var>:<space>[<k>] convention");
    const std::string var = name.substr(0, colon);
    const SpaceDescriptor space = SpaceDescriptor::parse(name.substr(colon + 1, bracket - colon - 1));
    const std::size_t width = space.coordinate_count();
    for (std::size_t k = 0; k < width; ++k) {
      const std::string expected = var + ":" + space.to_string() + "[" + std::to_string(k) + "]";
      if (col + k >= header.size() || header[col + k] != expected)
        throw ParseError("expected column '" + expected + "'");
    }
    if (var == "y") {
      if (response) throw ParseError("more than one response space in the header");
      response = space;
    } else if (var == "x" + std::to_string(features.size() + 1)) {
      if (response) throw ParseError("predictor columns must precede the response columns");
      features.push_back(space);
    } else {
      throw ParseError("unexpected column variable '" + var + "'");
    }
    col += width;
  }
  if (features.empty()) throw ParseError("no predictor columns in the header");
  return {ProductSpace(features), response};
}

Dataset dataset_from_csv(const CsvTable& table, const ProductSpace& predictors, const SpaceDescriptor& response) {
  const std::size_t px = predictors.coordinate_count(), py = response.coordinate_count();
  if (table.header.size() != px + py)
    throw DescriptorMismatch("CSV has " + std::to_string(table.header.size()) + " columns, spaces " +
                             predictors.to_string() + " and " + response.to_string() + " need " +
                             std::to_string(px + py));
  Dataset data(predictors, response);
  data.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::span<const double> all(row);
    try {
      for (std::size_t j = 0; j < predictors.arity(); ++j)
        validate_point(predictors[j], all.subspan(predictors.offset(j), predictors[j].coordinate_count()));
      validate_point(response, all.subspan(px, py));
    } catch (const InvalidPoint& e) {
      throw InvalidPoint("row " + std::to_string(r + 1) + " (line " + std::to_string(table.line_numbers[r]) +
                         "): " + e.what());
    }
    data.add(all.subspan(0, px), all.subspan(px, py));
  }
  return data;
}

std::vector<std::vector<double>> queries_from_csv(const CsvTable& table, const ProductSpace& predictors) {
  const std::size_t px = predictors.coordinate_count();
  if (table.header.size() < px)
    throw DescriptorMismatch("query CSV has " + std::to_string(table.header.size()) + " columns, " +
                             predictors.to_string() + " needs " + std::to_string(px));
  if (table.header.size() > px && !table.header.empty()) {
    // Extra columns are allowed only when they are response columns.
    const auto [space, response] = infer_spaces(table.header);
    if (!(space == predictors)) throw DescriptorMismatch("query predictors " + space.to_string() +
                                                         " do not match the model predictors " + predictors.to_string());
  }
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::span<const double> all(table.rows[r]);
    try {
      for (std::size_t j = 0; j < predictors.arity(); ++j)
        validate_point(predictors[j], all.subspan(predictors.offset(j), predictors[j].coordinate_count()));
    } catch (const InvalidPoint& e) {
      throw InvalidPoint("row " + std::to_string(r + 1) + " (line " + std::to_string(table.line_numbers[r]) +
                         "): " + e.what());
    }
    out.emplace_back(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(px));
  }
  return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  auto cols = predictor_columns(data.predictor_space());
  for (auto& c : response_columns(data.response_space())) cols.push_back(c);
  out << csv_row(cols) << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<std::string> cells;
    for (double v : data.predictor(i)) cells.push_back(format_real(v));
    for (double v : data.responses()[i]) cells.push_back(format_real(v));
    out << csv_row(cells) << '\n';
  }
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string metadata_line(std::uint64_t seed, std::uint64_t config_hash) {
  return std::string("# oobball ") + OOBBALL_VERSION + " seed=" + std::to_string(seed) +
         " config_hash=" + hex64(config_hash);
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s;
}

}  // namespace oobball
