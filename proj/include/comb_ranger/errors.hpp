#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace comb_ranger {

/// Input rejected before any computation (bad field, out-of-window value).
/// `field()` names the offending input so front ends can report it.
class ValidationError : public std::invalid_argument {
public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Numerical or model-domain failure: pole proximity, linearity guard,
/// near-dependent modes, singular systems.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Gram-Schmidt hit a (nearly) dependent input.
class DependenceError : public DomainError {
public:
  DependenceError(std::size_t index, const std::string& what)
      : DomainError(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

}  // namespace comb_ranger
