#include "brightside/error.hpp"
#include "brightside/hash.hpp"

#include <cstdio>

namespace brightside {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidScore: return "InvalidScore";
    case Errc::FormatError: return "FormatError";
    case Errc::IoError: return "IoError";
    case Errc::InvalidRatio: return "InvalidRatio";
    case Errc::ShapeError: return "ShapeError";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::StateError: return "StateError";
    case Errc::StageFailure: return "StageFailure";
    case Errc::ConfigError: return "ConfigError";
    case Errc::SkipItem: return "SkipItem";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::CorruptArtifact: return "CorruptArtifact";
    case Errc::AlreadyPublished: return "AlreadyPublished";
    case Errc::NotFound: return "NotFound";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace brightside
