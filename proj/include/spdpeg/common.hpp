#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdpeg {

using Vector = std::vector<double>;

// ---------------------------------------------------------------------------
// Errors

/// Bad argument, dimension mismatch or inconsistent configuration.
class InputError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input. `line` is 1-based.
class ParseError : public InputError
{
public:
  ParseError(std::size_t line, const std::string& what)
    : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A numerical routine failed (singular system, non-finite value).
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Iterates blew up. Carries the iteration at which the guard fired.
class DivergenceError : public NumericError
{
public:
  DivergenceError(std::uint64_t iteration, const std::string& what)
    : NumericError(what), iteration_(iteration) {}
  std::uint64_t iteration() const noexcept { return iteration_; }

private:
  std::uint64_t iteration_;
};

/// Iterative method hit its iteration cap; carries the last estimate.
class ConvergenceError : public NumericError
{
public:
  ConvergenceError(double last_estimate, const std::string& what)
    : NumericError(what), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

private:
  double last_estimate_;
};

// ---------------------------------------------------------------------------
// Dense helpers

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

} // namespace spdpeg
