#pragma once

#include <stdexcept>
#include <string>

namespace flexslice {

// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file (STL, G-code, config text).
class ParseError : public Error
{
public:
    using Error::Error;
};

// A parameter or configuration value outside its allowed range.
class ConfigError : public Error
{
public:
    using Error::Error;
};

// Geometry that violates a precondition (empty mesh, mismatched provenance, ...).
class GeometryError : public Error
{
public:
    using Error::Error;
};

} // namespace flexslice
