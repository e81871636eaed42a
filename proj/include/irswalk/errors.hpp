#pragma once

#include <stdexcept>
#include <string>

namespace irswalk {

// Thrown when an enumeration or table would exceed a configured cap.
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a stated precondition was not established by the caller.
struct contract_error : std::logic_error {
  explicit contract_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace irswalk
