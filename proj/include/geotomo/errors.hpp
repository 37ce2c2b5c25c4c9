#pragma once

#include <stdexcept>
#include <string>

namespace geotomo {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A quadrature node or intermediate produced a non-finite value.
class NumericDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Radial function non-positive (or otherwise not a valid star body).
class InvalidBody : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IllConditionedInversion : public std::runtime_error {
 public:
  IllConditionedInversion(int degree, double multiplier, double band_norm)
      : std::runtime_error("ill-conditioned inversion at degree " + std::to_string(degree) +
                           " (multiplier " + std::to_string(multiplier) + ", band sup-norm " +
                           std::to_string(band_norm) + ")"),
        degree_(degree) {}
  int degree() const { return degree_; }

 private:
  int degree_;
};

class BandlimitInsufficient : public std::runtime_error {
 public:
  BandlimitInsufficient(int bandlimit, double residual, double tolerance)
      : std::runtime_error("bandlimit " + std::to_string(bandlimit) +
                           " insufficient: expansion residual " + std::to_string(residual) +
                           " exceeds " + std::to_string(tolerance)),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Malformed body descriptor; what() names the offending JSON path element.
class DescriptorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace geotomo
