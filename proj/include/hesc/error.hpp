#pragma once

#include <stdexcept>
#include <string>

namespace hesc {

// Broad failure classes; each maps to one CLI exit code.
enum class ErrorClass {
  config = 2,
  convergence = 3,
  numeric_precondition = 4,
  io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), cls_(cls), name_(std::move(name)) {}

  ErrorClass error_class() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }
  const std::string& name() const noexcept { return name_; }

 private:
  ErrorClass cls_;
  std::string name_;
};

#define HESC_DEFINE_ERROR(Type, Class)                                     \
  class Type : public Error {                                              \
   public:                                                                 \
    explicit Type(const std::string& what) : Error(Class, #Type, what) {}  \
  }

HESC_DEFINE_ERROR(ConfigError, ErrorClass::config);
HESC_DEFINE_ERROR(IoError, ErrorClass::io);

HESC_DEFINE_ERROR(GridMismatch, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(NyquistViolation, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(ZeroVelocity, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(ContainmentViolation, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(StepTooLarge, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(DivergentLineIntegral, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(PhaseWrapRisk, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(MaskEmpty, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(InsufficientCoverage, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(DegenerateFit, ErrorClass::numeric_precondition);
HESC_DEFINE_ERROR(InvalidArgument, ErrorClass::numeric_precondition);

#undef HESC_DEFINE_ERROR

}  // namespace hesc
