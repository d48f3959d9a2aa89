#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace jetweil {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two Weil values (or a value and a shape) disagree on their caps.
class IncompatibleShapes : public Error {
 public:
  using Error::Error;
};

/// Caps are empty, contain a zero, or the algebra would exceed the size limit.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class ShapeTooLarge : public ShapeError {
 public:
  ShapeTooLarge(std::size_t dim, std::size_t limit);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t dim_;
  std::size_t limit_;
};

/// Vector lengths or arities that do not line up.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A primitive was applied outside its domain. Carries the offending primal
/// value and, once the evaluator has annotated it, the node index.
class DomainError : public Error {
 public:
  DomainError(std::string primitive, double primal);

  const std::string& primitive() const noexcept { return primitive_; }
  double primal() const noexcept { return primal_; }
  std::optional<std::size_t> node() const noexcept { return node_; }

  DomainError at_node(std::size_t node) const;

 private:
  DomainError(std::string primitive, double primal, std::size_t node);

  std::string primitive_;
  double primal_;
  std::optional<std::size_t> node_;
};

/// Reciprocal of an element with zero primal part; W is local, so such
/// elements are not invertible.
class DivisionByNilpotent : public DomainError {
 public:
  DivisionByNilpotent() : DomainError("recip", 0.0) {}
};

/// A primal intermediate became inf or nan.
class NumericOverflow : public Error {
 public:
  NumericOverflow(std::size_t node, double value);

  std::size_t node() const noexcept { return node_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t node_;
  double value_;
};

/// The operation is outside what an oracle can handle (non-polynomial
/// primitive for the symbolic path, too high an order for differencing).
class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace jetweil
