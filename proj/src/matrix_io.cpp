#include "mconc/matrix_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

namespace mconc {

json complex_matrix_to_json(const CMatrix& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(json::array({a(i, j).real(), a(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return json{{"dim", a.rows()}, {"entries", std::move(rows)}};
}

json matrix_to_json(const HermitianMatrix& a) { return complex_matrix_to_json(a.matrix()); }

CMatrix complex_matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw ConfigError("matrix object requires 'dim' and 'entries'");
  }
  const auto d = j.at("dim").get<long long>();
  if (d < 1) throw ConfigError("matrix dim must be >= 1");
  const json& rows = j.at("entries");
  if (!rows.is_array() || static_cast<long long>(rows.size()) != d) {
    throw ConfigError("matrix 'entries' must have dim rows");
  }
  CMatrix m(d, d);
  for (long long i = 0; i < d; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<long long>(row.size()) != d) {
      throw ConfigError("matrix row " + std::to_string(i) + " must have dim entries");
    }
    for (long long k = 0; k < d; ++k) {
      const json& e = row[static_cast<std::size_t>(k)];
      if (e.is_number()) {
        m(i, k) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError("matrix entry must be [re, im]");
      }
    }
  }
  return m;
}

HermitianMatrix matrix_from_json(const json& j) { return HermitianMatrix(complex_matrix_from_json(j)); }

HermitianMatrix read_matrix_file(const std::filesystem::path& path) { return matrix_from_json(read_json_file(path)); }

void write_matrix_file(const std::filesystem::path& path, const HermitianMatrix& a) {
  write_json_file(path, matrix_to_json(a));
}

Digest& Digest::add(std::uint64_t v) {
  for (int b = 0; b < 8; ++b) byte(static_cast<unsigned char>((v >> (8 * b)) & 0xffU));
  return *this;
}

Digest& Digest::add(double v) { return add(std::bit_cast<std::uint64_t>(v)); }

Digest& Digest::add(const CMatrix& m) {
  add(static_cast<std::uint64_t>(m.rows()));
  add(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      add(m(i, j).real());
      add(m(i, j).imag());
    }
  }
  return *this;
}

Digest& Digest::add(std::string_view s) {
  add(static_cast<std::uint64_t>(s.size()));
  for (char c : s) byte(static_cast<unsigned char>(c));
  return *this;
}

std::string Digest::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

std::string digest_matrices(std::span<const HermitianMatrix> ms) {
  Digest d;
  for (const auto& m : ms) d.add(m);
  return d.hex();
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

}  // namespace mconc
