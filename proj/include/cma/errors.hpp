#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cma {

enum class ErrorKind {
  BoundaryDataMissing,
  InvalidDensity,
  KernelUnderresolved,
  PositivityBreakdown,
  DomainError,
  ChartDomain,
  ParseError,
  IncompleteReport,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message,
        std::optional<std::size_t> node = std::nullopt)
      : std::runtime_error(std::move(message)), kind_(kind), node_(node) {}

  ErrorKind kind() const { return kind_; }
  std::optional<std::size_t> node() const { return node_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> node_;
};

}  // namespace cma
