#include "jetweil/error.hpp"

#include <sstream>

namespace jetweil {

namespace {

std::string shape_message(std::size_t dim, std::size_t limit) {
  std::ostringstream os;
  os << "Weil algebra dimension " << dim << " exceeds limit " << limit;
  return os.str();
}

std::string domain_message(const std::string& primitive, double primal,
                           std::optional<std::size_t> node) {
  std::ostringstream os;
  os.precision(17);
  os << "domain error: " << primitive << " at primal value " << primal;
  if (node) os << " (node " << *node << ")";
  return os.str();
}

std::string overflow_message(std::size_t node, double value) {
  std::ostringstream os;
  os << "numeric overflow: node " << node << " produced " << value;
  return os.str();
}

}  // namespace

ShapeTooLarge::ShapeTooLarge(std::size_t dim, std::size_t limit)
    : ShapeError(shape_message(dim, limit)), dim_(dim), limit_(limit) {}

DomainError::DomainError(std::string primitive, double primal)
    : Error(domain_message(primitive, primal, std::nullopt)),
      primitive_(std::move(primitive)),
      primal_(primal) {}

DomainError::DomainError(std::string primitive, double primal, std::size_t node)
    : Error(domain_message(primitive, primal, node)),
      primitive_(std::move(primitive)),
      primal_(primal),
      node_(node) {}

DomainError DomainError::at_node(std::size_t node) const {
  return DomainError(primitive_, primal_, node);
}

NumericOverflow::NumericOverflow(std::size_t node, double value)
    : Error(overflow_message(node, value)), node_(node), value_(value) {}

}  // namespace jetweil
