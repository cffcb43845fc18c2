#pragma once

// On-disk cache of fractional integration matrices as JSON with
// round-trip decimal strings.

#include <filesystem>
#include <optional>
#include <string>

#include "jfp/frac_ops.hpp"

namespace jfp {

/// File-name stem identifying (alpha, beta, b, p, mu, N, q).
std::string cache_key(const JFPParams& params, const Param& mu, std::size_t n, long q);

std::string serialize_matrix(const FracIntMatrix& m);
/// Inverse of serialize_matrix; entries are restored bit-identically.
FracIntMatrix deserialize_matrix(const std::string& text);

void save_matrix(const std::filesystem::path& path, const FracIntMatrix& m);
FracIntMatrix load_matrix(const std::filesystem::path& path);

/// Loads `dir/<key>.json` when present, otherwise builds with `build` and stores it.
template <class Build>
FracIntMatrix cached_build(const std::filesystem::path& dir, const JFPParams& params, const Param& mu, std::size_t n,
                           long q, Build&& build) {
  std::filesystem::path file = dir / (cache_key(params, mu, n, q) + ".json");
  if (std::filesystem::exists(file)) return load_matrix(file);
  FracIntMatrix m = build();
  std::filesystem::create_directories(dir);
  save_matrix(file, m);
  return m;
}

}  // namespace jfp
