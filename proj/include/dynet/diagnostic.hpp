// Copyright 2026 The dynet-causes authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dynet {

// Pipeline stage that raised an error. The CLI prints the stage name as the
// message prefix, e.g. `parse: 3:14: unknown field 'prot'`.
enum class Stage {
  kIo,
  kParse,
  kValidation,
  kBudget,
  kCapacity,
  kHazard,
  kProduct,
  kInternal,
};

inline std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kIo:
      return "io";
    case Stage::kParse:
      return "parse";
    case Stage::kValidation:
      return "validation";
    case Stage::kBudget:
      return "budget";
    case Stage::kCapacity:
      return "capacity";
    case Stage::kHazard:
      return "hazard";
    case Stage::kProduct:
      return "product";
    case Stage::kInternal:
      return "internal";
  }
  return "internal";
}

// 1-based position in a source text.
struct SourceLocation {
  int line = 1;
  int column = 1;

  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

class Error : public std::runtime_error {
 public:
  Error(Stage stage, std::string message,
        std::optional<SourceLocation> location = std::nullopt)
      : std::runtime_error(Format(stage, message, location)),
        stage_(stage),
        message_(std::move(message)),
        location_(location) {}

  Stage stage() const { return stage_; }
  // Message without the stage prefix and location.
  const std::string& message() const { return message_; }
  const std::optional<SourceLocation>& location() const { return location_; }

 private:
  static std::string Format(Stage stage, const std::string& message,
                            const std::optional<SourceLocation>& location) {
    std::string out(StageName(stage));
    out += ": ";
    if (location.has_value()) {
      out += std::to_string(location->line) + ":" +
             std::to_string(location->column) + ": ";
    }
    out += message;
    return out;
  }

  Stage stage_;
  std::string message_;
  std::optional<SourceLocation> location_;
};

}  // namespace dynet
