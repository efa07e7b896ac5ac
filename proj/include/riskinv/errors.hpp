#ifndef RISKINV_ERRORS_HPP
#define RISKINV_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include "riskinv/format.hpp"

namespace riskinv {

// Every error carries a short machine-readable kind so the CLI can emit a
// single parsable line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Argument outside the domain of a utility function (e.g. CRRA at x <= 0).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Choice variable outside its feasible interval.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error("range", what) {}
};

// Invalid parameters or inconsistent inputs.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error("infeasible", what) {}
};

// A threshold search could not find a choice flip inside its bracket.
class NoThresholdError : public Error {
 public:
  NoThresholdError(const std::string& what, double monotone_choice)
      : Error("no_threshold", what), choice_(monotone_choice) {}
  // The choice observed on the whole bracket.
  double monotone_choice() const noexcept { return choice_; }

 private:
  double choice_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0)
      : Error("parse", what), row_(row) {}
  // 1-based data row (header is row 0); 0 when not row-specific.
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

namespace detail {

inline std::string num(double v) { return format_double(v); }

inline void require(bool cond, std::string_view msg) {
  if (!cond) throw ArgumentError(std::string(msg));
}

}  // namespace detail
}  // namespace riskinv

#endif  // RISKINV_ERRORS_HPP
