// Copyright 2026 <Project Authors>
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

namespace persuasion {

enum class ErrorKind {
  NoRoot,
  BoundaryOptimum,
  GridTooLarge,
  Infeasible,
  IterationLimit,
  EmptyQ,
  DegeneratePair,
  ScanTooLarge,
  MomentNonzero,
  NotApplicable,
  BracketFailure,
  SingularSystem,
  BudgetExhausted,
  PreconditionFailed,
  UnknownFixture,
  ConfigError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::BoundaryOptimum: return "BoundaryOptimum";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::EmptyQ: return "EmptyQ";
    case ErrorKind::DegeneratePair: return "DegeneratePair";
    case ErrorKind::ScanTooLarge: return "ScanTooLarge";
    case ErrorKind::MomentNonzero: return "MomentNonzero";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::UnknownFixture: return "UnknownFixture";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Typed error carried through every module; the CLI maps kinds to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace persuasion
