#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oobball/dataset.hpp"
#include "oobball/space.hpp"

namespace oobball {

// Numeric CSV with one header row. Lines starting with '#' and blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

CsvTable parse_csv(std::istream& in, const std::string& source = "<input>");
CsvTable read_csv(const std::string& path);

// Column names: x<j>:<descriptor>[<k>] for predictors (j from 1, k from 0) and y:<descriptor>[<k>].
std::vector<std::string> predictor_columns(const ProductSpace& space);
std::vector<std::string> response_columns(const SpaceDescriptor& space);

// Recovers the spaces from x/y column names. Throws ParseError when the names do not follow
// the convention.
std::pair<ProductSpace, std::optional<SpaceDescriptor>> infer_spaces(const std::vector<std::string>& header);

// Builds and validates a dataset; InvalidPoint messages name the row and line.
Dataset dataset_from_csv(const CsvTable& table, const ProductSpace& predictors, const SpaceDescriptor& response);
// Predictor rows (the first columns of each row). Validates points.
std::vector<std::vector<double>> queries_from_csv(const CsvTable& table, const ProductSpace& predictors);

void write_dataset_csv(std::ostream& out, const Dataset& data);

// Metadata line shared by every CSV the tool writes.
std::string metadata_line(std::uint64_t seed, std::uint64_t config_hash);
std::string hex64(std::uint64_t value);

// Joins already formatted cells with commas.
std::string csv_row(const std::vector<std::string>& cells);

}  // namespace oobball
