#pragma once

#include <stdexcept>
#include <string>

namespace cylvar {

/// Rejected input: bad dimensions, out-of-range parameters, invalid geometry.
class InputError : public std::invalid_argument {
public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure could not produce a usable result.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

}  // namespace detail
}  // namespace cylvar
