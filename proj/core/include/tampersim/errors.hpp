#pragma once

#include <stdexcept>
#include <string>

namespace tampersim {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A prefix is not extendable to a full support sequence (or is too long).
class InvalidPrefix : public Error {
 public:
  using Error::Error;
};

/// Operation needs exact conditional distributions the process does not carry.
class UnsupportedFlavor : public Error {
 public:
  using Error::Error;
};

/// Scalar parameter outside its declared domain.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Party covering built over an empty round schedule.
class EmptySchedule : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration would exceed the caller-supplied cap.
class SupportTooLarge : public Error {
 public:
  using Error::Error;
};

class TooManySubsets : public Error {
 public:
  using Error::Error;
};

/// The ideal tilted conditional is undefined at a prefix with zero partial expectation.
class ZeroPartialExpectation : public Error {
 public:
  using Error::Error;
};

/// Honest expectation of the objective is zero; there is nothing to amplify.
class ZeroMu : public Error {
 public:
  using Error::Error;
};

/// A tampered sample left the honest support. Raised by runtime assertions;
/// never expected on a correct run.
class PlausibilityViolation : public Error {
 public:
  using Error::Error;
};

/// A corrupted party's per-message distribution exceeded its statistical
/// distance budget. Raised by runtime assertions; never expected on a correct run.
class DistanceBudgetViolation : public Error {
 public:
  using Error::Error;
};

/// A generative sampler emitted a symbol outside its declared alphabet.
class SamplerContractViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed definition file or experiment configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tampersim
