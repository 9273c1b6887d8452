#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace brightside {

enum class Errc {
  InvalidScore,
  FormatError,
  IoError,
  InvalidRatio,
  ShapeError,
  DegenerateData,
  StateError,
  StageFailure,
  ConfigError,
  SkipItem,
  UnsupportedVersion,
  CorruptArtifact,
  AlreadyPublished,
  NotFound,
  InvalidArgument,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure the library reports carries one of the codes above; callers
// that need to branch (the CLI exit-code map, the HTTP layer) switch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace brightside
