#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tbgcli {

namespace fs = std::filesystem;

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(std::vector<Cell> row) {
  if (row.size() != header_.size()) throw std::logic_error("csv row width mismatch");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const auto& cells, auto fmt) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += fmt(cells[i]);
    }
    out += "\r\n";
  };
  line(header_, [](const std::string& h) { return format_cell(Cell{h}); });
  for (const auto& r : rows_) line(r, [](const Cell& c) { return format_cell(c); });
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

OutputSet::OutputSet(fs::path dir, std::string stem) : dir_(std::move(dir)), stem_(std::move(stem)) {
  fs::create_directories(dir_);
}

void OutputSet::write_file(const std::string& file, const std::string& bytes) {
  fs::path p = dir_ / file;
  written_.push_back(p);
  std::ofstream f(p, std::ios::binary);
  f << bytes;
  if (!f) throw std::runtime_error("cannot write " + p.string());
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  listing_.push_back({{"file", file}, {"bytes", bytes.size()}, {"fnv1a64", hash}});
}

void OutputSet::write_csv(const std::string& name, const CsvTable& t) { write_file(stem_ + "_" + name + ".csv", t.str()); }

void OutputSet::write_json(const std::string& name, nlohmann::json j) {
  j["manifest"] = manifest_name();
  write_file(stem_ + "_" + name + ".json", j.dump(2) + "\n");
}

void OutputSet::write_manifest(nlohmann::json manifest) {
  manifest["outputs"] = listing_;
  fs::path p = dir_ / manifest_name();
  written_.push_back(p);
  std::ofstream f(p, std::ios::binary);
  f << manifest.dump(2) << "\n";
  if (!f) throw std::runtime_error("cannot write " + p.string());
}

void OutputSet::discard() {
  std::error_code ec;
  for (const auto& p : written_) fs::remove(p, ec);
  written_.clear();
  listing_ = nlohmann::json::array();
}

}  // namespace tbgcli
