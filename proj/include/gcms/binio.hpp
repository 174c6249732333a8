#pragma once

#include <cstdint>
#include <cstring>
#include <string>

#include "gcms/errors.hpp"

namespace gcms::binio {

// Little-endian scalar serialization, host-order independent.

inline void put_u32(std::string& out, uint32_t v) {
  char b[4];
  b[0] = char(v & 0xff);
  b[1] = char((v >> 8) & 0xff);
  b[2] = char((v >> 16) & 0xff);
  b[3] = char((v >> 24) & 0xff);
  out.append(b, 4);
}

inline void put_u64(std::string& out, uint64_t v) {
  put_u32(out, uint32_t(v & 0xffffffffu));
  put_u32(out, uint32_t(v >> 32));
}

inline void put_f32(std::string& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

inline void put_f64(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

inline uint32_t get_u32(const std::string& data, size_t& pos) {
  if (pos + 4 > data.size()) throw InputError("binary file truncated");
  const auto* b = reinterpret_cast<const unsigned char*>(data.data() + pos);
  pos += 4;
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 |
         uint32_t(b[3]) << 24;
}

inline uint64_t get_u64(const std::string& data, size_t& pos) {
  const uint64_t lo = get_u32(data, pos);
  const uint64_t hi = get_u32(data, pos);
  return lo | (hi << 32);
}

inline float get_f32(const std::string& data, size_t& pos) {
  const uint32_t bits = get_u32(data, pos);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

inline double get_f64(const std::string& data, size_t& pos) {
  const uint64_t bits = get_u64(data, pos);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace gcms::binio
