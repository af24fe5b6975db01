#include "kemeny/quadrature.hpp"

#include <sstream>

#include "kemeny/error.hpp"

namespace kemeny::detail {

void quadrature_failure(double a, double b, const char* why) {
  std::ostringstream os;
  os.precision(17);
  os << why << " on [" << a << ", " << b << "]";
  throw Error(ErrorCode::QuadratureFailure, os.str());
}

}  // namespace kemeny::detail
