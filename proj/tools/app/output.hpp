#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qtoa::app {

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// A column-major table written as comma-separated text with one header row
// and LF line endings. Missing cells are left empty.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::string str() const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_cell(double v);
std::string csv_cell(const std::optional<double>& v);
std::string csv_text(const std::string& s);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

} // namespace qtoa::app
