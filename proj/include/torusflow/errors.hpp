#pragma once

#include <stdexcept>
#include <string>

namespace torusflow {

/// Base for all recoverable numerical failures raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TopologyError : public Error { public: using Error::Error; };
class ResolutionError : public Error { public: using Error::Error; };
class GraphError : public Error { public: using Error::Error; };
class OrientationError : public Error { public: using Error::Error; };
class SingularityError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

}  // namespace torusflow
