#pragma once

#include <stdexcept>
#include <string>

namespace pirgrid {

struct PirError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// field
struct DivisionByZero : PirError {
  DivisionByZero() : PirError("division by zero in GF(2^8)") {}
};
struct ShapeError : PirError {
  using PirError::PirError;
};

// sss
struct InvalidEvaluationPoint : PirError {
  using PirError::PirError;
};
struct ThresholdError : PirError {
  using PirError::PirError;
};
struct InsufficientResponses : PirError {
  using PirError::PirError;
};
struct UnrecoverableResponse : PirError {
  using PirError::PirError;
};

// specdb
struct KeyOutOfRange : PirError {
  using PirError::PirError;
};
struct CorruptDatabase : PirError {
  using PirError::PirError;
};

// protocols
struct NeedMultipleServers : PirError {
  using PirError::PirError;
};
struct TooManyServers : PirError {
  using PirError::PirError;
};
struct IncompleteResponses : PirError {
  using PirError::PirError;
};

// net
struct FrameError : PirError {
  using PirError::PirError;
};
struct ReplicaDivergence : PirError {
  using PirError::PirError;
};
struct NetError : PirError {
  using PirError::PirError;
};

// harness
struct PlanAborted : PirError {
  using PirError::PirError;
};
struct PlanError : PirError {
  using PirError::PirError;
};

}  // namespace pirgrid
