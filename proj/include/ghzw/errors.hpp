#pragma once

#include <stdexcept>
#include <string>

namespace ghzw {

/// Base of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArity : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct SignatureMismatch : Error { using Error::Error; };

/// Conditioning event with probability zero.
struct DegenerateCondition : Error { using Error::Error; };

/// The value never crosses the bound on the requested interval.
struct NoCrossing : Error { using Error::Error; };

struct ParseError : Error { using Error::Error; };
struct MissingRow : Error { using Error::Error; };

struct LpError : Error { using Error::Error; };
/// Basis became numerically singular and could not be recovered.
struct DegenerateBasis : LpError { using LpError::LpError; };

struct StructuralError : Error { using Error::Error; };
struct SizeCapExceeded : Error { using Error::Error; };

}  // namespace ghzw
