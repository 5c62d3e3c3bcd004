#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pmwls/model.hpp"

namespace pmwls {

/// Reads `y,x1,...,xd` with a header row. With `take_log` the responses must be
/// strictly positive and are stored as logs. Errors name the offending line and field.
Dataset read_dataset_csv(const std::filesystem::path& path, bool take_log = false);
Dataset parse_dataset_csv(std::istream& in, bool take_log = false, const std::string& source = "<input>");

/// Writes `y,x1,...,xd` (the raw responses for log-scale data).
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Numeric values separated by commas and/or newlines; a non-numeric first line is
/// treated as a header.
Vector read_vector_csv(const std::filesystem::path& path);

/// Comma-separated rows, 17 significant digits.
void write_matrix_csv(std::ostream& out, const Matrix& m);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace pmwls
