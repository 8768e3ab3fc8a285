#pragma once

// Little-endian primitives for the snapshot and checkpoint formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "nait/error.hpp"

namespace nait::io {

inline constexpr std::array<char, 4> kMagic{'N', 'A', 'I', 'T'};

template <typename T>
T to_little(T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big) {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b.data(), sizeof(T));
  }
  return v;
}

template <typename T>
void write(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read(std::istream& in, std::string_view what) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError("truncated input while reading " + std::string(what));
  }
  return to_little(v);
}

inline void write_magic(std::ostream& out) { out.write(kMagic.data(), kMagic.size()); }

inline void expect_magic(std::istream& in) {
  std::array<char, 4> m{};
  if (!in.read(m.data(), m.size())) throw FormatError("truncated input while reading magic");
  if (m != kMagic) throw FormatError("bad magic: not a NAIT file");
}

template <typename T>
void write_array(std::ostream& out, const T* data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
  } else {
    for (std::size_t i = 0; i < n; ++i) write(out, data[i]);
  }
}

template <typename T>
void read_array(std::istream& in, T* data, std::size_t n, std::string_view what) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(T)))) {
      throw FormatError("truncated input while reading " + std::string(what));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) data[i] = read<T>(in, what);
  }
}

}  // namespace nait::io
