#pragma once
// Error taxonomy. Kinds map onto the CLI exit-code contract:
// domain/io -> 2, budget -> 3, usage -> 4.

#include <stdexcept>
#include <string>
#include <utility>

namespace grablab {

enum class ErrorKind { domain, budget, usage, io };

class GrabError : public std::runtime_error {
 public:
  GrabError(ErrorKind k, std::string msg) : std::runtime_error(std::move(msg)), kind(k) {}
  ErrorKind kind;
};

#define GRABLAB_ERROR(NAME, KIND)                                              \
  struct NAME : GrabError {                                                    \
    explicit NAME(std::string m) : GrabError(ErrorKind::KIND, std::move(m)) {} \
  }

GRABLAB_ERROR(DomainError, domain);        // invalid parameter values
GRABLAB_ERROR(ParityError, domain);        // n*delta odd: no regular graph exists
GRABLAB_ERROR(ExhaustedAttempts, domain);  // rejection sampling gave up
GRABLAB_ERROR(InvalidGraph, domain);       // port consistency / format violation
GRABLAB_ERROR(NotAcyclic, domain);         // tree extension fed a cyclic ball
GRABLAB_ERROR(CannotReach, domain);        // tree extension cannot hit n_target
GRABLAB_ERROR(RuleViolation, domain);      // grabbing rule emitted != b marks
GRABLAB_ERROR(SizeTooLarge, domain);       // exhaustive check beyond its limit
GRABLAB_ERROR(BudgetTooLarge, budget);     // exact enumeration beyond the cap
GRABLAB_ERROR(UsageError, usage);          // bad CLI/API usage
GRABLAB_ERROR(IoError, io);                // file read/write failure

#undef GRABLAB_ERROR

}  // namespace grablab
