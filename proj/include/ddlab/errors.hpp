#pragma once

#include <stdexcept>
#include <string>

namespace ddlab {

struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct SizeError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct PhysicalityError : ValidationError { using ValidationError::ValidationError; };
struct InsufficientWindowError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace ddlab
