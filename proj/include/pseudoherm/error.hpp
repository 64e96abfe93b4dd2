#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pseudoherm {

/// Base class of every error raised by the library. The CLI maps the
/// category onto its exit code.
class Error : public std::runtime_error {
public:
  enum class Category { Config, Solver, Numerical };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

private:
  Category category_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(Category::Config,
              what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// Evaluation hit a pole or a logarithm of zero.
class DomainError : public Error {
public:
  DomainError(const std::string& what, std::string subterm)
      : Error(Category::Config, what + " in '" + subterm + "'"),
        subterm_(std::move(subterm)) {}

  const std::string& subterm() const noexcept { return subterm_; }

private:
  std::string subterm_;
};

class InvalidParameter : public Error {
public:
  explicit InvalidParameter(const std::string& what)
      : Error(Category::Config, what) {}
};

class ConstraintViolation : public Error {
public:
  explicit ConstraintViolation(const std::string& what)
      : Error(Category::Config, what) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& what)
      : Error(Category::Config, what) {}
};

class OddFunctionViolation : public Error {
public:
  explicit OddFunctionViolation(const std::string& what)
      : Error(Category::Config, what) {}
};

class PoleError : public Error {
public:
  explicit PoleError(const std::string& what)
      : Error(Category::Config, what) {}
};

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, std::vector<std::size_t> indices)
      : Error(Category::Solver, what), unconverged_(std::move(indices)) {}

  const std::vector<std::size_t>& unconverged() const noexcept {
    return unconverged_;
  }

private:
  std::vector<std::size_t> unconverged_;
};

class SingularSystem : public Error {
public:
  explicit SingularSystem(const std::string& what)
      : Error(Category::Solver, what) {}
};

/// A state whose pseudo-norm vanishes (self-orthogonal, e.g. at level
/// coalescence).
class ZeroPseudoNorm : public Error {
public:
  explicit ZeroPseudoNorm(const std::string& what)
      : Error(Category::Solver, what) {}
};

class NonFiniteState : public Error {
public:
  NonFiniteState(const std::string& what, std::size_t last_valid_step)
      : Error(Category::Numerical, what), last_valid_step_(last_valid_step) {}

  std::size_t last_valid_step() const noexcept { return last_valid_step_; }

private:
  std::size_t last_valid_step_;
};

}  // namespace pseudoherm
