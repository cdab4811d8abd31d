#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rootdoa {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Precondition violated by an argument (bad angle, bad size, zero polynomial).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed configuration or unknown method name.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An estimator could not produce the requested number of estimates.
class DegradedEstimateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A cluster phase average fell outside (-pi, pi].
class UnmappedPhaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rootdoa
