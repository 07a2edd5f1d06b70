#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geoglyph {

enum class ErrorCode {
  MalformedInput,
  UnsupportedGeometry,
  DuplicateRegion,
  DegenerateRegion,
  MixedKinds,
  EmptyTable,
  NoMatches,
  MalformedSpec,
  UnknownChannel,
  TooManyChannels,
  NoAlternatives,
  UnsupportedBaseMap,
  WrongDataKind,
  TooManyIcons,
  MissingSeries,
  UnknownIcon,
  UnresolvedEndpoint,
  IncompatiblePair,
  DoesNotFit,
  PanelOverflow,
  SideOverflow,
  UnresolvedTarget,
  UnknownRegion,
  NoRoom,
  DuplicateId,
  UnresolvedReference,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedInput: return "malformed_input";
    case ErrorCode::UnsupportedGeometry: return "unsupported_geometry";
    case ErrorCode::DuplicateRegion: return "duplicate_region";
    case ErrorCode::DegenerateRegion: return "degenerate_region";
    case ErrorCode::MixedKinds: return "mixed_kinds";
    case ErrorCode::EmptyTable: return "empty_table";
    case ErrorCode::NoMatches: return "no_matches";
    case ErrorCode::MalformedSpec: return "malformed_spec";
    case ErrorCode::UnknownChannel: return "unknown_channel";
    case ErrorCode::TooManyChannels: return "too_many_channels";
    case ErrorCode::NoAlternatives: return "no_alternatives";
    case ErrorCode::UnsupportedBaseMap: return "unsupported_basemap";
    case ErrorCode::WrongDataKind: return "wrong_data_kind";
    case ErrorCode::TooManyIcons: return "too_many_icons";
    case ErrorCode::MissingSeries: return "missing_series";
    case ErrorCode::UnknownIcon: return "unknown_icon";
    case ErrorCode::UnresolvedEndpoint: return "unresolved_endpoint";
    case ErrorCode::IncompatiblePair: return "incompatible_pair";
    case ErrorCode::DoesNotFit: return "does_not_fit";
    case ErrorCode::PanelOverflow: return "panel_overflow";
    case ErrorCode::SideOverflow: return "side_overflow";
    case ErrorCode::UnresolvedTarget: return "unresolved_target";
    case ErrorCode::UnknownRegion: return "unknown_region";
    case ErrorCode::NoRoom: return "no_room";
    case ErrorCode::DuplicateId: return "duplicate_id";
    case ErrorCode::UnresolvedReference: return "unresolved_reference";
    case ErrorCode::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

/// Every typed failure in the library is reported through this exception.
/// The code is stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace geoglyph
