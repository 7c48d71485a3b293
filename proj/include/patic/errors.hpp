#pragma once

#include <stdexcept>
#include <string>

namespace patic {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
  SyntaxError(const std::string& what, int line, int column)
      : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct PathError : Error { using Error::Error; };
struct ArityError : Error { using Error::Error; };
struct OracleUnavailable : Error { using Error::Error; };
struct ProtocolError : Error { using Error::Error; };
struct SpecError : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };
struct FrontierBudgetExceeded : Error { using Error::Error; };
struct DistanceOverflow : Error { using Error::Error; };
struct NotApplicable : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct Exhausted : Error { using Error::Error; };
struct MissingStage : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };

}  // namespace patic
