#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace survival {

/// Raised when an adaptive integration exhausts its panel budget. Carries the
/// best available estimate so callers can decide whether it is usable.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, std::complex<double> best_estimate,
                    double error_bound)
      : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  std::complex<double> best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  std::complex<double> best_estimate_;
  double error_bound_;
};

class fit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace survival
