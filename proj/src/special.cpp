#include "morsegpe/special.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "morsegpe/error.hpp"

namespace morsegpe::special {

double log_gamma(double x) {
  require(x > 0.0, "log_gamma: argument must be > 0");
  return boost::math::lgamma(x);
}

double digamma(double x) {
  require(x > 0.0, "digamma: argument must be > 0");
  return boost::math::digamma(x);
}

double trigamma(double x) {
  require(x > 0.0, "trigamma: argument must be > 0");
  return boost::math::trigamma(x);
}

}  // namespace morsegpe::special
