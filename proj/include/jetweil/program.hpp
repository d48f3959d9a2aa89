#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jetweil/error.hpp"
#include "jetweil/primitive.hpp"

namespace jetweil {

/// Index into the evaluation buffer: inputs occupy 0..n_inputs-1, node k
/// occupies n_inputs + k.
using Slot = std::uint32_t;

struct Node {
  PrimitiveKind op = PrimitiveKind::const_val;
  std::array<Slot, 2> operands{};
  /// Constant value for const_val, exponent for pow_const; unused otherwise.
  double payload = 0.0;
  std::string name;

  int arity() const noexcept { return jetweil::arity(op); }
  std::span<const Slot> args() const noexcept {
    return {operands.data(), static_cast<std::size_t>(arity())};
  }

  bool operator==(const Node&) const = default;
};

/// A validated straight-line program. Nodes are in topological order and
/// every operand refers to an input or an earlier node; `div` never appears
/// (it is rewritten to mul + recip on construction). Immutable.
class Program {
 public:
  std::size_t n_inputs() const noexcept { return input_names_.size(); }
  std::size_t n_outputs() const noexcept { return outputs_.size(); }
  /// Q, the primitive count.
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t slot_count() const noexcept { return n_inputs() + nodes_.size(); }

  const std::vector<std::string>& input_names() const noexcept { return input_names_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Slot>& outputs() const noexcept { return outputs_; }

  Slot node_slot(std::size_t node_index) const noexcept {
    return static_cast<Slot>(n_inputs() + node_index);
  }
  bool is_input(Slot s) const noexcept { return s < n_inputs(); }
  const std::string& slot_name(Slot s) const;

  bool operator==(const Program&) const = default;

 private:
  friend class ProgramBuilder;

  std::vector<std::string> input_names_;
  std::vector<Node> nodes_;
  std::vector<Slot> outputs_;
};

/// Incremental construction with validation. Unnamed nodes get fresh names
/// when the program is built.
class ProgramBuilder {
 public:
  explicit ProgramBuilder(std::size_t n_inputs);
  explicit ProgramBuilder(std::vector<std::string> input_names);

  Slot input(std::size_t i) const;

  /// Appends a node and returns its slot. `div` expands to recip + mul and
  /// returns the slot of the mul. Throws DimensionMismatch for a wrong
  /// operand count and std::out_of_range-like Error for forward references.
  Slot add(PrimitiveKind op, std::span<const Slot> operands, double payload = 0.0,
           std::string name = {});
  Slot add(PrimitiveKind op, std::initializer_list<Slot> operands, double payload = 0.0,
           std::string name = {}) {
    return add(op, std::span<const Slot>(operands.begin(), operands.size()), payload,
               std::move(name));
  }
  Slot constant(double value, std::string name = {}) {
    return add(PrimitiveKind::const_val, std::span<const Slot>{}, value, std::move(name));
  }

  void output(Slot s);
  std::size_t slot_count() const noexcept { return program_.slot_count(); }

  Program build() &&;

 private:
  Program program_;
};

// ---------------------------------------------------------------------------
// Text format

class ParseError : public Error {
 public:
  enum class Kind {
    syntax,
    undefined_name,
    use_before_definition,
    arity_mismatch,
    duplicate_name,
  };

  ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// Parses the line-oriented format:
///
///     # comment
///     input x1 x2
///     t1 = mul x1 x2
///     c  = const 3.5
///     t2 = pow t1 2
///     output t2
Program parse_program(std::string_view text);
Program load_program(const std::string& path);

/// Inverse of parse_program on validated programs; literals are written in
/// shortest round-trip form.
std::string print_program(const Program& prog);

}  // namespace jetweil
