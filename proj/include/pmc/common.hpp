#ifndef PMC_COMMON_HPP
#define PMC_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pmc {

using Tokens = std::uint64_t;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnknownIdError : Error {
  std::string id;
  explicit UnknownIdError(const std::string& what_id)
      : Error("unknown identifier: " + what_id), id(what_id) {}
};

struct NotEnabledError : Error {
  std::string transition;
  std::string place;  // the violating place
  NotEnabledError(const std::string& t, const std::string& p)
      : Error("transition " + t + " not enabled: place " + p + " underfull"),
        transition(t), place(p) {}
};

struct SequenceError : Error {
  std::size_t index;
  std::string transition;
  SequenceError(std::size_t i, const std::string& t)
      : Error("firing sequence disabled at step " + std::to_string(i) + " (" + t + ")"),
        index(i), transition(t) {}
};

struct MergeConflictError : Error {
  std::string place;
  explicit MergeConflictError(const std::string& p)
      : Error("incompatible markings on shared place " + p), place(p) {}
};

struct OverflowError : Error {
  OverflowError() : Error("token count overflow") {}
};

struct ParseError : Error {
  std::size_t line;
  std::size_t column;
  ParseError(std::size_t ln, std::size_t col, const std::string& msg)
      : Error("parse error at " + std::to_string(ln) + ":" + std::to_string(col) + ": " + msg),
        line(ln), column(col) {}
};

inline Tokens checked_add(Tokens a, Tokens b) {
  Tokens r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError();
  return r;
}

inline Tokens checked_sub(Tokens a, Tokens b) {
  if (b > a) throw OverflowError();
  return a - b;
}

}  // namespace pmc

#endif
