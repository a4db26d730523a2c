// Copyright 2026 The earthsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace earth
{

  /// Error categories raised by the simulator. Every thrown earth::Error
  /// carries one of these so callers and tests can dispatch on the kind.
  enum class Errc
    {
      // Configuration.
      NonPowerOfTwo,
      InconsistentWidths,
      NonIntegralRows,
      NonBijectiveMapping,
      BadConfigKey,
      BadConfigValue,
      // Instruction descriptors.
      RegGroupOverflow,
      BadEEW,
      BadEmul,
      BadFields,
      MissingIndices,
      VlExceedsGroup,
      MisalignedElement,
      AddressOutOfRange,
      // Shift networks and reorganization.
      LaneOutOfRange,
      WraparoundRequired,
      SeparationViolated,
      DuplicateTarget,
      ControlMismatch,
      OutOfBeat,
      OverlappingElements,
      StageFull,
      // Register file and load/store unit.
      FieldOverflow,
      QueueFull,
      // Harness.
      StateMismatch,
      BadTrace
    };


  inline std::string_view
  errcName(Errc e)
  {
    switch (e)
      {
      case Errc::NonPowerOfTwo:        return "NonPowerOfTwo";
      case Errc::InconsistentWidths:   return "InconsistentWidths";
      case Errc::NonIntegralRows:      return "NonIntegralRows";
      case Errc::NonBijectiveMapping:  return "NonBijectiveMapping";
      case Errc::BadConfigKey:         return "BadConfigKey";
      case Errc::BadConfigValue:       return "BadConfigValue";
      case Errc::RegGroupOverflow:     return "RegGroupOverflow";
      case Errc::BadEEW:               return "BadEEW";
      case Errc::BadEmul:              return "BadEmul";
      case Errc::BadFields:            return "BadFields";
      case Errc::MissingIndices:       return "MissingIndices";
      case Errc::VlExceedsGroup:       return "VlExceedsGroup";
      case Errc::MisalignedElement:    return "MisalignedElement";
      case Errc::AddressOutOfRange:    return "AddressOutOfRange";
      case Errc::LaneOutOfRange:       return "LaneOutOfRange";
      case Errc::WraparoundRequired:   return "WraparoundRequired";
      case Errc::SeparationViolated:   return "SeparationViolated";
      case Errc::DuplicateTarget:      return "DuplicateTarget";
      case Errc::ControlMismatch:      return "ControlMismatch";
      case Errc::OutOfBeat:            return "OutOfBeat";
      case Errc::OverlappingElements:  return "OverlappingElements";
      case Errc::StageFull:            return "StageFull";
      case Errc::FieldOverflow:        return "FieldOverflow";
      case Errc::QueueFull:            return "QueueFull";
      case Errc::StateMismatch:        return "StateMismatch";
      case Errc::BadTrace:             return "BadTrace";
      }
    return "Unknown";
  }


  class Error : public std::runtime_error
  {
  public:
    Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errcName(code)) + ": " + what), code_(code)
    { }

    Errc code() const
    { return code_; }

  private:
    Errc code_;
  };

}
