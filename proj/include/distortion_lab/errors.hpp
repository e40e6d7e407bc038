#pragma once

#include <stdexcept>
#include <string>

namespace distortion_lab {

/// Root of every error raised by the library. Domain errors are surfaced to
/// callers verbatim (the CLI prints `what()` unchanged).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class UnknownPoint : public Error {
 public:
  using Error::Error;
};

class UnknownCandidate : public Error {
 public:
  using Error::Error;
};

class UnknownRule : public Error {
 public:
  using Error::Error;
};

class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

/// No candidate's domination graph admits a perfect matching. Cannot happen
/// for a valid profile; raised only to expose a matching bug.
class NoMatchingCandidate : public Error {
 public:
  using Error::Error;
};

/// A Pareto-improvement chain revisited a candidate.
class CycleDetected : public Error {
 public:
  using Error::Error;
};

class UnsupportedComposition : public Error {
 public:
  using Error::Error;
};

/// A rule returned a third candidate on a two-voter promoted election.
class IndecisiveRule : public Error {
 public:
  IndecisiveRule(std::size_t u, std::size_t w, std::size_t got)
      : Error("rule returned c" + std::to_string(got + 1) + " on the biased election between c" +
              std::to_string(u + 1) + " and c" + std::to_string(w + 1)),
        u_(u),
        w_(w) {}
  std::size_t first() const { return u_; }
  std::size_t second() const { return w_; }

 private:
  std::size_t u_;
  std::size_t w_;
};

class MismatchedRuleClass : public Error {
 public:
  using Error::Error;
};

}  // namespace distortion_lab
