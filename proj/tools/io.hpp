#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace tbgcli {

using Cell = std::variant<double, long long, std::string>;

// %.17g for doubles; fields with separators, quotes or line breaks are quoted
std::string format_cell(const Cell& c);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<Cell> row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

std::uint64_t fnv1a64(const std::string& bytes);

// Files written by one run. Everything is removed again by discard() when the run fails.
class OutputSet {
 public:
  OutputSet(std::filesystem::path dir, std::string stem);

  const std::filesystem::path& dir() const { return dir_; }
  std::string manifest_name() const { return stem_ + ".manifest.json"; }

  // <stem>_<name>.csv
  void write_csv(const std::string& name, const CsvTable& t);
  // <stem>_<name>.json, carrying the manifest name
  void write_json(const std::string& name, nlohmann::json j);
  void write_manifest(nlohmann::json manifest);
  void discard();

 private:
  void write_file(const std::string& file, const std::string& bytes);

  std::filesystem::path dir_;
  std::string stem_;
  std::vector<std::filesystem::path> written_;
  nlohmann::json listing_ = nlohmann::json::array();
};

}  // namespace tbgcli
