#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tk {

/// Source location of a token or statement, 1-based line/column plus byte
/// offsets. Spans nest properly within a statement.
struct SourceSpan {
  int line = 1;
  int column = 1;
  std::size_t begin = 0;
  std::size_t end = 0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, SourceSpan span)
      : Error(msg + " at " + std::to_string(span.line) + ":" +
              std::to_string(span.column)),
        span_(span) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

class FreeIndexMismatch : public Error {
 public:
  using Error::Error;
};
class NoContractibleSlots : public Error {
 public:
  using Error::Error;
};
class UnknownProperty : public Error {
 public:
  using Error::Error;
};
class ArityMismatch : public Error {
 public:
  using Error::Error;
};
class ConflictingProperty : public Error {
 public:
  using Error::Error;
};
class PatternArityMismatch : public Error {
 public:
  using Error::Error;
};
class MissingGammaMetric : public Error {
 public:
  using Error::Error;
};
class NoSymmetry : public Error {
 public:
  using Error::Error;
};
class OrbitTooLarge : public Error {
 public:
  using Error::Error;
};
class UnknownChart : public Error {
 public:
  using Error::Error;
};
class SingularMetric : public Error {
 public:
  using Error::Error;
};
class KindMismatch : public Error {
 public:
  using Error::Error;
};
class DimensionNot3 : public Error {
 public:
  using Error::Error;
};
class NonOrthogonalChart : public Error {
 public:
  using Error::Error;
};
class UnboundSymbol : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tk
