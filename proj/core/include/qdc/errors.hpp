#pragma once

#include <stdexcept>
#include <string>

namespace qdc {

// Error hierarchy used across the library. Everything derives from
// qdc::error so callers can catch library failures with one handler.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed arguments: dimension mismatches, non-finite entries, bad ranges.
class invalid_input : public error {
 public:
  using error::error;
};

// A matrix required to be positive semi-definite has an eigenvalue below
// the accepted tolerance.
class not_psd : public error {
 public:
  using error::error;
};

// Broken file container (bad magic, truncation, count mismatch, bad cell).
class format_error : public error {
 public:
  using error::error;
};

// A requested computation would exceed a configured memory/dimension cap.
class resource_limit : public error {
 public:
  using error::error;
};

// A train/test partition left some class without training samples.
class degenerate_split : public error {
 public:
  using error::error;
};

// A labelled class is empty where at least one sample is required.
class degenerate_class : public error {
 public:
  using error::error;
};

// Normalization of the zero vector.
class zero_vector : public error {
 public:
  using error::error;
};

// A state has (numerically) no overlap with the projection subspace.
class null_projection : public error {
 public:
  using error::error;
};

// An optimizer could not produce a feasible solution.
class solver_failure : public error {
 public:
  using error::error;
};

// Invalid experiment description (unknown keys, bad schema version, ...).
class config_error : public error {
 public:
  using error::error;
};

}  // namespace qdc
