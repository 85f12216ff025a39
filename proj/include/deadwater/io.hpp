#pragma once

// File emission. CSV files carry a one-line header with units; 2D fields are
// raw little-endian float64 with a JSON sidecar. Numbers are printed with 17
// significant digits so identical runs give identical bytes.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "deadwater/error.hpp"
#include "deadwater/solver.hpp"
#include "deadwater/spectral.hpp"

namespace deadwater {

struct CsvColumn {
  std::string name;  // e.g. "x_m"
  std::span<const double> values;
};

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

inline void write_csv(const std::filesystem::path& path, std::span<const CsvColumn> columns) {
  if (columns.empty()) throw ContractError("write_csv: no columns");
  const std::size_t rows = columns.front().values.size();
  for (const auto& c : columns) {
    if (c.values.size() != rows) throw ContractError("write_csv: columns of unequal length");
  }
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c].name;
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_number(columns[c].values[r]);
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

inline void write_le_doubles(std::ostream& out, std::span<const double> values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<double> read_le_doubles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0) throw ContractError("read_le_doubles: truncated file " + path.string());
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

struct FieldMeta {
  double time = 0.0;
  double epsilon = 0.0;
  std::string config_hash;
};

inline nlohmann::json field_sidecar(const Grid& g, const char* kind, const FieldMeta& meta) {
  return {{"dim", g.dim},   {"Lx", g.Lx},           {"Nx", g.Nx},          {"Ly", g.Ly},
          {"Ny", g.Ny},     {"kind", kind},         {"time", meta.time},   {"epsilon", meta.epsilon},
          {"layout", "row-major, x fastest"},       {"config_hash", meta.config_hash}};
}

/// <stem>.bin holds real samples, <stem>.json the sidecar.
inline void write_real_field(const std::filesystem::path& stem, const RealField& f, const FieldMeta& meta) {
  auto bin = stem;
  bin += ".bin";
  ensure_parent(bin);
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw Error("cannot write " + bin.string());
  write_le_doubles(out, f.values);
  auto side = stem;
  side += ".json";
  write_json(side, field_sidecar(f.grid, "real", meta));
}

/// Interleaved (re, im) pairs in storage order.
inline void write_spectral_field(const std::filesystem::path& stem, const SpectralField& f, const FieldMeta& meta) {
  std::vector<double> flat(f.values.size() * 2);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    flat[2 * i] = f.values[i].real();
    flat[2 * i + 1] = f.values[i].imag();
  }
  auto bin = stem;
  bin += ".bin";
  ensure_parent(bin);
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw Error("cannot write " + bin.string());
  write_le_doubles(out, flat);
  auto side = stem;
  side += ".json";
  write_json(side, field_sidecar(f.grid, "complex", meta));
}

/// 1D fields go to CSV (x_m, eta_m); 2D fields to binary + sidecar.
inline void write_eta(const std::filesystem::path& stem, const RealField& eta, const FieldMeta& meta) {
  if (eta.grid.dim == 1) {
    std::vector<double> x(eta.grid.Nx);
    for (int i = 0; i < eta.grid.Nx; ++i) x[i] = eta.grid.x(i);
    auto csv = stem;
    csv += ".csv";
    const CsvColumn cols[] = {{"x_m", x}, {"eta_m", eta.values}};
    write_csv(csv, cols);
    auto side = stem;
    side += ".json";
    write_json(side, field_sidecar(eta.grid, "real", meta));
  } else {
    write_real_field(stem, eta, meta);
  }
}

inline nlohmann::json metadata_json(const RunMetadata& m, const std::string& config_hash) {
  return {{"dt", m.dt},
          {"rule", to_string(m.rule)},
          {"epsilon", m.epsilon},
          {"steps", m.steps},
          {"t_final", m.t_final},
          {"partial_last_step", m.partial_last_step},
          {"last_dt", m.last_dt},
          {"config_hash", config_hash}};
}

}  // namespace deadwater
