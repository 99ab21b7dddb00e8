#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtoa {

// Base for every failure raised by the engine. The CLI maps these to exit
// status 1; configuration problems (ConfigError, in the CLI layer) map to 2.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
  using Error::Error;
};

class InvalidDetector : public Error {
public:
  using Error::Error;
};

class ZeroMomentum : public Error {
public:
  using Error::Error;
};

// The classical time integral has no real solution: V(q') >= H somewhere on the path.
class ClassicallyForbidden : public Error {
public:
  ClassicallyForbidden(const std::string& what, double where)
      : Error(what), position(where) {}
  double position;
};

class IntegrandError : public Error {
public:
  IntegrandError(const std::string& what, double node)
      : Error(what), node(node) {}
  double node;
};

class ResolutionError : public Error {
public:
  ResolutionError(const std::string& what, std::size_t required_nodes)
      : Error(what), required_nodes(required_nodes) {}
  std::size_t required_nodes;
};

class TimeWindowError : public Error {
public:
  using Error::Error;
};

class EmptyChannel : public Error {
public:
  EmptyChannel(const std::string& what, double normalization_sq)
      : Error(what), normalization_sq(normalization_sq) {}
  double normalization_sq;
};

class SingularPhase : public Error {
public:
  using Error::Error;
};

class NotApplicable : public Error {
public:
  using Error::Error;
};

class NoStationaryPoint : public Error {
public:
  using Error::Error;
};

class EvanescentWindow : public Error {
public:
  using Error::Error;
};

} // namespace qtoa
