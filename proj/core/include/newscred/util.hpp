// util.hpp — shared aliases and small formatting helpers.

#ifndef NEWSCRED_UTIL_HPP
#define NEWSCRED_UTIL_HPP

#include <map>
#include <string>

namespace newscred {

/// Sparse feature vector over named dimensions. std::map keeps iteration
/// order deterministic, which keeps every downstream artifact deterministic.
using FeatureMap = std::map<std::string, double>;

/// Shortest decimal form that round-trips a double exactly.
std::string fmt_full(double value);

/// Six significant digits, the precision used in human-facing reports.
std::string fmt_sig6(double value);

/// Parse a double, throwing std::runtime_error on garbage.
double parse_double(const std::string& text);

double clamp_rating(double value);

}  // namespace newscred

#endif  // NEWSCRED_UTIL_HPP
