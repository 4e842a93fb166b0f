#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace circrect {

enum class ErrorKind {
  InvalidArgument,
  BehindCamera,
  SingularProjection,
  DegenerateInput,
  CollinearCameras,
  AtCenter,
  NotOnCircle,
  PointBehindCamera,
  RectificationFailure,
  AllInvalid,
  NoOverlap,
  IllConditioned,
  PredictorMismatch,
  TruncatedFile,
  ParseError,
  StageFailure,
};

auto to_string(ErrorKind kind) -> std::string_view;

// Every failure raised by the library carries a kind so callers (the CLI, the
// Python bindings, tests) can dispatch without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error{std::string{to_string(kind)} + ": " + message}, m_kind{kind} {}

  [[nodiscard]] auto kind() const noexcept -> ErrorKind { return m_kind; }

private:
  ErrorKind m_kind;
};

} // namespace circrect
