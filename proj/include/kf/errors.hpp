#ifndef KF_ERRORS_HPP
#define KF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kf {

// Byte range [start, end) into a source text.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed potential text; span() locates the offending input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, SourceSpan span) : Error(what), span_(span) {}
  SourceSpan span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

// Evaluation left the domain of a node (log near zero, non-real potential).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Metric too close to singular to invert.
class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

// Ill-formed caller input: spec files, group data, theta parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace kf

#endif  // KF_ERRORS_HPP
