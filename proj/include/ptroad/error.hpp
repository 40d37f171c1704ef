#pragma once

#include <stdexcept>
#include <string>

namespace ptroad {

enum class ErrorKind {
  Parameter,        // argument outside its legal range
  EmptyInput,       // nothing to operate on
  Decode,           // bytes are not a decodable PNG
  Format,           // decodable, but the wrong layout / corrupt container
  Shape,            // dimension mismatch or collapsed extent
  DegenerateFit,    // too few / collinear-in-v support for a line fit
  NonRoadGeometry,  // fitted slope alpha1 <= 0
  UndefinedRecall,  // evaluation with no positive ground truth
  Geometry,         // impossible synthetic scene
  Io,               // file system failure
};

const char* to_string(ErrorKind kind) noexcept;

/// All library failures are reported through this exception; `kind()` is what
/// the CLI maps onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ptroad
