#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace farey {

/// Raised when an integer result leaves the 64-bit signed range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Raised for invalid inputs. `field` names the offending parameter when known.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(message), field_(std::move(field)) {}
  explicit ValidationError(const std::string& message)
      : std::invalid_argument(message) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

namespace checked {

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int64 addition overflow");
  return r;
}

inline std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("int64 subtraction overflow");
  return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int64 multiplication overflow");
  return r;
}

inline std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw OverflowError("value does not fit in int64");
  return static_cast<std::int64_t>(v);
}

inline __int128 mul128(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int128 multiplication overflow");
  return r;
}

}  // namespace checked
}  // namespace farey
