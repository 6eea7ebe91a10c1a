#pragma once

namespace morsegpe::special {

// Real-argument special functions for x > 0. Thread-safe (no global sign
// state, unlike ::lgamma).
double log_gamma(double x);
double digamma(double x);
double trigamma(double x);

}  // namespace morsegpe::special
