#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bpl {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range agent/config parameter, rejected before any inference runs.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Inputs for which a distribution cannot be formed (e.g. both likelihoods zero).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class EmptyRecallCorpus : public Error {
 public:
  EmptyRecallCorpus() : Error("recall corpus is empty") {}
};

class SampleSizeError : public Error {
 public:
  SampleSizeError(std::size_t requested, std::size_t population)
      : Error("requested sample of " + std::to_string(requested) +
              " claims exceeds population of " + std::to_string(population)),
        requested_(requested),
        population_(population) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t population() const noexcept { return population_; }

 private:
  std::size_t requested_;
  std::size_t population_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bpl
