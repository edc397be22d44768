#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "mconc/hermitian.hpp"

namespace mconc {

using json = nlohmann::json;

// { "dim": d, "entries": [[ [re, im], ... ], ... ] }, row-major.
json matrix_to_json(const HermitianMatrix& a);
json complex_matrix_to_json(const CMatrix& a);

// Validates shape and the Hermitian invariant.
HermitianMatrix matrix_from_json(const json& j);
CMatrix complex_matrix_from_json(const json& j);

HermitianMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const HermitianMatrix& a);

// FNV-1a over dims and the IEEE bit patterns of every entry; 16 hex digits.
class Digest {
 public:
  Digest& add(std::uint64_t v);
  Digest& add(double v);
  Digest& add(const CMatrix& m);
  Digest& add(const HermitianMatrix& m) { return add(m.matrix()); }
  Digest& add(std::string_view s);
  std::string hex() const;
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
  void byte(unsigned char b) {
    h_ ^= b;
    h_ *= 0x100000001b3ULL;
  }
};

std::string digest_matrices(std::span<const HermitianMatrix> ms);

// JSON text with a trailing newline; deterministic for identical values.
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

}  // namespace mconc
