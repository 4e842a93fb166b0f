#include <circrect/error.hpp>

namespace circrect {

auto to_string(ErrorKind kind) -> std::string_view {
  switch (kind) {
  case ErrorKind::InvalidArgument:
    return "InvalidArgument";
  case ErrorKind::BehindCamera:
    return "BehindCamera";
  case ErrorKind::SingularProjection:
    return "SingularProjection";
  case ErrorKind::DegenerateInput:
    return "DegenerateInput";
  case ErrorKind::CollinearCameras:
    return "CollinearCameras";
  case ErrorKind::AtCenter:
    return "AtCenter";
  case ErrorKind::NotOnCircle:
    return "NotOnCircle";
  case ErrorKind::PointBehindCamera:
    return "PointBehindCamera";
  case ErrorKind::RectificationFailure:
    return "RectificationFailure";
  case ErrorKind::AllInvalid:
    return "AllInvalid";
  case ErrorKind::NoOverlap:
    return "NoOverlap";
  case ErrorKind::IllConditioned:
    return "IllConditioned";
  case ErrorKind::PredictorMismatch:
    return "PredictorMismatch";
  case ErrorKind::TruncatedFile:
    return "TruncatedFile";
  case ErrorKind::ParseError:
    return "ParseError";
  case ErrorKind::StageFailure:
    return "StageFailure";
  }
  return "Unknown";
}

} // namespace circrect
