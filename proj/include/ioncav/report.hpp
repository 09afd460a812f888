#pragma once

// Text output: fixed-notation numbers, scan CSV and ordered JSON documents.

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ioncav/errors.hpp"
#include "ioncav/lineshape.hpp"
#include "ioncav/units.hpp"

namespace ioncav {

using ordered_json = nlohmann::ordered_json;

/// Decimal rendering with `digits` significant digits and no exponent.
inline std::string format_fixed(double x, int digits = 9) {
  if (!std::isfinite(x)) throw SolverError("cannot format non-finite value");
  if (x == 0.0) return "0";
  const int magnitude = static_cast<int>(std::floor(std::log10(std::abs(x))));
  const int precision = std::max(0, digits - 1 - magnitude);
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, precision);
  if (res.ec != std::errc()) throw SolverError("number formatting failed");
  std::string s(buf, res.ptr);
  if (s == "-0") s = "0";
  return s;
}

inline constexpr const char* scan_csv_header = "delta_c_hz,n_h,n_v,count_rate_per_s";

/// Full CSV document for a scan; detunings written as linear Hz.
inline std::string scan_csv(const LineshapeTable& t) {
  std::string out = scan_csv_header;
  out += '\n';
  for (const auto& r : t) {
    out += format_fixed(units::linear(r.delta_c));
    out += ',';
    out += format_fixed(r.n_h);
    out += ',';
    out += format_fixed(r.n_v);
    out += ',';
    out += format_fixed(r.count_rate);
    out += '\n';
  }
  return out;
}

namespace detail {

inline void dump_json(std::ostream& os, const ordered_json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << inner << ordered_json(it.key()).dump() << ": ";
        dump_json(os, it.value(), indent + 1);
      }
      os << '\n' << pad << '}';
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        dump_json(os, j[i], indent + 1);
      }
      os << '\n' << pad << ']';
      return;
    }
    case ordered_json::value_t::number_float:
      os << format_fixed(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Pretty-printed JSON with insertion-ordered keys and fixed-notation floats.
inline std::string json_text(const ordered_json& j) {
  std::ostringstream os;
  detail::dump_json(os, j, 0);
  os << '\n';
  return os.str();
}

}  // namespace ioncav
