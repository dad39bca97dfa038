#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlk {

/// Invalid or inconsistent configuration. Carries every violation found, not
/// just the first one.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  explicit ConfigError(const std::string& violation)
      : ConfigError(std::vector<std::string>{violation}) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// A numeric argument is outside the range where the formula is defined.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs that should have been built together do not match (grid sizes,
/// kernel variants).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Evaluation of the singular kernel at zero distance.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative method failed to converge or produced non-finite numbers.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step produced NaN/Inf. The last finite state is kept so callers can
/// persist a partial trajectory.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double t, std::vector<double> last_good)
      : NumericalError(what), t_(t), last_good_(std::move(last_good)) {}

  double time() const noexcept { return t_; }
  const std::vector<double>& last_good() const noexcept { return last_good_; }

 private:
  double t_;
  std::vector<double> last_good_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlk
