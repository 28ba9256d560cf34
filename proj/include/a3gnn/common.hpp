#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace a3gnn {

using NodeId = std::uint32_t;
using EdgeId = std::uint64_t;

// Invalid argument to an operation (bad probability, empty grid, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Id not present in a mapping, e.g. a sampler escaping its partition.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Experiment/config file validation failure.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or malformed columns in a trace/dataset file.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace a3gnn
