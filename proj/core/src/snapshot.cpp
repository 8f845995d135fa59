#include "mcnls/snapshot.hpp"

#include <array>
#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace mcnls {
namespace {

constexpr std::array<char, 6> kMagic{'M', 'C', 'N', 'L', 'S', '1'};
constexpr std::uint8_t kVersion = 0x01;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw SnapshotError("snapshot truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(std::ostream& out, const Field& f) {
  const GridSpec& grid = f.grid();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint8_t>(out, kVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(grid.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.n()));
  put_le<double>(out, grid.half_width());
  for (const auto& v : f.values()) {
    put_le<double>(out, v.real());
    put_le<double>(out, v.imag());
  }
  if (!out) throw SnapshotError("failed writing snapshot");
}

Field read_snapshot(std::istream& in) {
  std::array<char, 6> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw SnapshotError("not an MCNLS1 snapshot");
  }
  if (get_le<std::uint8_t>(in) != kVersion) {
    throw SnapshotError("unsupported snapshot version");
  }
  const int dim = get_le<std::uint8_t>(in);
  const auto n = get_le<std::uint32_t>(in);
  const double half_width = get_le<double>(in);
  GridSpec grid = [&] {
    try {
      return GridSpec(dim, static_cast<int>(n), half_width);
    } catch (const std::invalid_argument& e) {
      throw SnapshotError(std::string("bad snapshot grid: ") + e.what());
    }
  }();
  std::vector<Complex> values(grid.size());
  for (auto& v : values) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    v = {re, im};
  }
  return Field(grid, std::move(values));
}

void save_snapshot(const std::string& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("cannot open " + path + " for writing");
  write_snapshot(out, f);
}

Field load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open " + path);
  return read_snapshot(in);
}

}  // namespace mcnls
