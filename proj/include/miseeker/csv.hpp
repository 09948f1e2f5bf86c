#pragma once

#include <charconv>
#include <string>

// Locale-free numeric formatting for the CSV outputs. std::to_chars emits
// the shortest representation that round-trips, so files are byte-identical
// across runs, worker counts, and machines with the same doubles.

namespace miseeker::csv {

inline void append_number(std::string& out, double v) {
  char buf[32];
  const std::to_chars_result r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

inline void append_number(std::string& out, std::int64_t v) {
  char buf[24];
  const std::to_chars_result r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

inline std::string number(double v) {
  std::string s;
  append_number(s, v);
  return s;
}

}  // namespace miseeker::csv
