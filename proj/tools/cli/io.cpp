#include "cli/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "sublin/error.hpp"

namespace sublin::cli {

namespace {

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << data;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

const char* axis_name(std::size_t k) {
  static const char* names[] = {"x1", "x2", "x3"};
  return names[k];
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw ConfigError("truncated binary field");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  pos += 8;
  return v;
}

std::string hex_digest(const unsigned char* data, unsigned int n) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < n; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xf]);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += "\n";
  }
  write_all(path, out);
}

Table read_csv(const std::filesystem::path& path) {
  std::istringstream in(read_all(path));
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV '" + path.string() + "'");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(rs, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad number");
      row.push_back(v);
    }
    if (row.size() != t.columns.size())
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": wrong number of columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table field_table(const Field& f, const std::string& value_name) {
  Table t;
  const Grid& g = f.grid();
  for (std::size_t k = 0; k < g.dim(); ++k) t.columns.emplace_back(axis_name(k));
  t.columns.push_back(value_name);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!f.mask().is_active(i)) continue;
    const Point x = g.point(i);
    std::vector<double> row(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(g.dim()));
    row.push_back(f[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Field field_from_table(const Table& table, const MaskPtr& mask) {
  const Grid& g = mask->grid();
  if (table.columns.size() != g.dim() + 1) throw ConfigError("field CSV must have dim coordinate columns and a value");
  Field f(mask, Field::kExterior);
  for (const auto& row : table.rows) {
    Point x{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < g.dim(); ++k) x[k] = row[k];
    const auto idx = g.locate(x);
    if (idx && mask->is_active(*idx)) f[*idx] = row.back();
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mask->is_active(i) && std::isnan(f[i])) throw ConfigError("field CSV does not cover every active point");
  return f;
}

void write_field_binary(const std::filesystem::path& path, const Field& f) {
  std::string out = "SUBLINF1";
  const Grid& g = f.grid();
  put_u64(out, g.dim());
  for (std::size_t n : g.shape()) put_u64(out, n);
  for (double v : f.values()) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof v);
    put_u64(out, bits);
  }
  write_all(path, out);
}

std::vector<double> read_field_binary(const std::filesystem::path& path, std::vector<std::size_t>* shape) {
  const std::string in = read_all(path);
  if (in.compare(0, 8, "SUBLINF1") != 0) throw ConfigError("not a binary field file");
  std::size_t pos = 8;
  const std::uint64_t dim = get_u64(in, pos);
  if (dim < 1 || dim > kMaxDim) throw ConfigError("bad dimension in binary field");
  std::vector<std::size_t> dims;
  std::size_t total = 1;
  for (std::uint64_t k = 0; k < dim; ++k) {
    dims.push_back(get_u64(in, pos));
    total *= dims.back();
  }
  std::vector<double> values(total);
  for (double& v : values) {
    const std::uint64_t bits = get_u64(in, pos);
    std::memcpy(&v, &bits, sizeof v);
  }
  if (shape) *shape = dims;
  return values;
}

std::string mask_text(const DomainMask& mask) {
  const Grid& g = mask.grid();
  const std::size_t row = g.shape()[g.dim() - 1];
  const std::size_t slice = g.dim() == 3 ? g.shape()[1] * row : g.size();
  std::string out = "dim " + std::to_string(g.dim()) + "\nshape";
  for (std::size_t n : g.shape()) out += " " + std::to_string(n);
  out += "\nbounds";
  for (const Interval& b : g.bounds()) out += " " + format_double(b.lower) + " " + format_double(b.upper);
  out += "\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i && i % slice == 0) out += "\n";
    out.push_back(static_cast<char>(mask.at(i)));
    if ((i + 1) % row == 0) out += "\n";
  }
  return out;
}

std::string sha256_string(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  if (EVP_Digest(data.data(), data.size(), md, &n, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  return hex_digest(md, n);
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_string(read_all(path)); }

Manifest::Manifest(std::filesystem::path dir, std::string command, std::string config_text, unsigned long long seed)
    : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  doc_["command"] = std::move(command);
  doc_["config_sha256"] = sha256_string(config_text);
  doc_["seed"] = seed;
  doc_["artifacts"] = nlohmann::json::array();
}

void Manifest::add(const std::string& name, const std::string& kind) {
  const auto p = path(name);
  doc_["artifacts"].push_back(
      {{"path", name}, {"kind", kind}, {"bytes", std::filesystem::file_size(p)}, {"sha256", sha256_file(p)}});
}

void Manifest::write_json(const std::string& name, const nlohmann::json& j, const std::string& kind) {
  write_all(path(name), j.dump(2) + "\n");
  add(name, kind);
}

void Manifest::write_text(const std::string& name, const std::string& text, const std::string& kind) {
  write_all(path(name), text);
  add(name, kind);
}

void Manifest::write_table(const std::string& name, const Table& table, const std::string& kind) {
  write_csv(path(name), table);
  add(name, kind);
}

void Manifest::set_status(int exit_code, const std::string& message) {
  doc_["exit_code"] = exit_code;
  doc_["message"] = message;
}

void Manifest::finish() const {
  nlohmann::json doc = doc_;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  doc["created"] = stamp;
  write_all(path("manifest.json"), doc.dump(2) + "\n");
}

}  // namespace sublin::cli
