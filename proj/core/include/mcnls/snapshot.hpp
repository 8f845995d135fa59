#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "mcnls/grid.hpp"

namespace mcnls {

/// Raised when a snapshot stream is truncated or carries a bad header.
class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout: "MCNLS1", version 0x01, u8 d, u32 n, f64 L, then n^d pairs
// (re, im) of f64. All multi-byte values little-endian.
void write_snapshot(std::ostream& out, const Field& f);
Field read_snapshot(std::istream& in);

void save_snapshot(const std::string& path, const Field& f);
Field load_snapshot(const std::string& path);

}  // namespace mcnls
