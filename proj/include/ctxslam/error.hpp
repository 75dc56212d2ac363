#pragma once

#include <stdexcept>
#include <string>

namespace ctxslam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file or unexpected key.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Ontology axiom failed at load time. The message lists the offending concepts.
class AxiomViolation : public Error {
 public:
  using Error::Error;
};

class UnknownConcept : public Error {
 public:
  using Error::Error;
};

// Semantically valid input that violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotSeparable : public Error {
 public:
  using Error::Error;
};

}  // namespace ctxslam
