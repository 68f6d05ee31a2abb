#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gwire/linalg.hpp"

namespace gwire::io {

struct CsvMatrix {
    std::vector<std::string> header;
    Matrix values;
};

/// Whole file as a string. Throws io naming the path.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// Parses JSON; errors name the path and line.
nlohmann::json read_json(const std::string& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);

/// Numeric CSV with one header line. Errors name the path and line.
CsvMatrix read_csv_matrix(const std::string& path);
CsvMatrix parse_csv_matrix(const std::string& text, const std::string& source);
std::string csv_matrix(const Matrix& m, const std::vector<std::string>& header);
void write_csv_matrix(const std::string& path, const Matrix& m, const std::vector<std::string>& header);

/// "row,col,value" header, then one line per non-zero entry, 0-based.
std::string triplets(const Matrix& m);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Shortest round-trip decimal form.
std::string format_double(double v);

} // namespace gwire::io
