#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace treefdr {

// Exact rational used for bound factors and selective FDP.
using Fraction = boost::multiprecision::cpp_rational;

inline double to_double(const Fraction& f) { return f.convert_to<double>(); }

}  // namespace treefdr
