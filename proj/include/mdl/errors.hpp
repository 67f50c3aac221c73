#pragma once

#include <stdexcept>
#include <string>

namespace mdl {

// Base class for every library error so callers can catch one type.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed arguments: bad arity, empty grids, negative counts, shape mismatches.
class InvalidInput : public Error {
public:
  explicit InvalidInput(const std::string& what) : Error(what) {}
};

// Regression design with singular normal equations and no regularizing luckiness.
class DegenerateDesign : public Error {
public:
  explicit DegenerateDesign(const std::string& what) : Error(what) {}
};

// Prior family not supported for the requested model family.
class UnsupportedPrior : public Error {
public:
  explicit UnsupportedPrior(const std::string& what) : Error(what) {}
};

// Luckiness function unusable for the requested operation (negative mass, no maximizer).
class InvalidLuckiness : public Error {
public:
  explicit InvalidLuckiness(const std::string& what) : Error(what) {}
};

// NML normalizer is infinite for the requested family (e.g. unrestricted Gaussian location).
class ComplexityDiverges : public Error {
public:
  explicit ComplexityDiverges(const std::string& what) : Error(what) {}
};

// Collapsed-variable cardinality above the supported cap.
class UnsupportedCardinality : public Error {
public:
  explicit UnsupportedCardinality(const std::string& what) : Error(what) {}
};

// Composite nulls are out of scope for the evidence machinery.
class UnsupportedComposite : public Error {
public:
  explicit UnsupportedComposite(const std::string& what) : Error(what) {}
};

}  // namespace mdl
