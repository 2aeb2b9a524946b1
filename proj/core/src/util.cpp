#include "newscred/util.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace newscred {

std::string fmt_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string fmt_sig6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

double parse_double(const std::string& text) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(text, &pos);
    if (pos != text.size()) {
      throw std::runtime_error("trailing characters");
    }
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error("not a number: '" + text + "'");
  }
}

double clamp_rating(double value) { return std::clamp(value, 1.0, 5.0); }

}  // namespace newscred
