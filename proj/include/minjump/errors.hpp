/*
 Copyright 2026 The minjump Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef MINJUMP_ERRORS_HPP
#define MINJUMP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace minjump {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or a factorization that broke down.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// A stability certificate is malformed (non-PD P_i, bad weights, ...).
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// Invalid grids, ranges or options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Gain recovery hit a singular matrix.
class RecoveryError : public Error {
 public:
  using Error::Error;
};

/// The closed loop left the representable range during simulation.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_finite_time)
      : Error(what), last_finite_time_(last_finite_time) {}

  double last_finite_time() const { return last_finite_time_; }

 private:
  double last_finite_time_;
};

}  // namespace minjump

#endif  // MINJUMP_ERRORS_HPP
