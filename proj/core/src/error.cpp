#include "emodec/error.hpp"

namespace emodec {

namespace {
std::string with_row(const std::string& what, int row) {
  if (row <= 0) return what;
  return "row " + std::to_string(row) + ": " + what;
}
}  // namespace

SchemaError::SchemaError(const std::string& what, int row) : Error(with_row(what, row)), row_(row) {}

}  // namespace emodec
