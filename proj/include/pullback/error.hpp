#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pullback {

enum class ErrorKind {
  OutOfOverlap,
  DomainEscape,
  ChartGap,
  TagMismatch,
  TooFarFromGroup,
  OutOfCover,
  EmptyCover,
  EndpointMismatch,
  NotSteady,
  PartitionMismatch,
  NonConstantTransitions,
  NoCoveringSet,
  NotALoop,
  NotContractibleSetup,
  Aliasing,
  NonInteger,
  UnknownExperiment,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfOverlap: return "OutOfOverlap";
    case ErrorKind::DomainEscape: return "DomainEscape";
    case ErrorKind::ChartGap: return "ChartGap";
    case ErrorKind::TagMismatch: return "TagMismatch";
    case ErrorKind::TooFarFromGroup: return "TooFarFromGroup";
    case ErrorKind::OutOfCover: return "OutOfCover";
    case ErrorKind::EmptyCover: return "EmptyCover";
    case ErrorKind::EndpointMismatch: return "EndpointMismatch";
    case ErrorKind::NotSteady: return "NotSteady";
    case ErrorKind::PartitionMismatch: return "PartitionMismatch";
    case ErrorKind::NonConstantTransitions: return "NonConstantTransitions";
    case ErrorKind::NoCoveringSet: return "NoCoveringSet";
    case ErrorKind::NotALoop: return "NotALoop";
    case ErrorKind::NotContractibleSetup: return "NotContractibleSetup";
    case ErrorKind::Aliasing: return "Aliasing";
    case ErrorKind::NonInteger: return "NonInteger";
    case ErrorKind::UnknownExperiment: return "UnknownExperiment";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the ErrorKind tags.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pullback
