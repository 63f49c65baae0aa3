#pragma once

// Artifact writers and the checksummed manifest.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sublin/field.hpp"

namespace sublin::cli {

/// Shortest decimal form that reads back to the same double (17 significant digits).
std::string format_double(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

/// Active points of a field, coordinates first, value last, row-major order.
Table field_table(const Field& f, const std::string& value_name = "value");
/// Values of a field CSV placed back on `mask` by coordinate lookup.
Field field_from_table(const Table& table, const MaskPtr& mask);

/// Little-endian binary: "SUBLINF1", dim, shape[dim] (uint64), then one double
/// per grid point in row-major order (NaN off the mask).
void write_field_binary(const std::filesystem::path& path, const Field& f);
std::vector<double> read_field_binary(const std::filesystem::path& path, std::vector<std::size_t>* shape = nullptr);

/// Header lines "dim", "shape", "bounds", then one character per grid point
/// ('.', 'B', 'I'); rows along the last axis, blank lines between 2D slices.
std::string mask_text(const DomainMask& mask);

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_string(const std::string& data);

/// Collects written artifacts and writes manifest.json next to them.
class Manifest {
 public:
  Manifest(std::filesystem::path dir, std::string command, std::string config_text, unsigned long long seed);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  void add(const std::string& name, const std::string& kind);
  void write_json(const std::string& name, const nlohmann::json& j, const std::string& kind);
  void write_text(const std::string& name, const std::string& text, const std::string& kind);
  void write_table(const std::string& name, const Table& table, const std::string& kind);
  void set_status(int exit_code, const std::string& message);
  /// Writes manifest.json; artifacts are listed in insertion order.
  void finish() const;

 private:
  std::filesystem::path dir_;
  nlohmann::json doc_;
};

}  // namespace sublin::cli
