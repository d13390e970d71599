// Copyright 2026 The UCO Authors.
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

#include "uco/losses.hpp"

namespace uco {

LossKind parse_loss_kind(std::string_view name) {
  if (name == "mnrl") return LossKind::kMnrl;
  if (name == "ocl") return LossKind::kOcl;
  if (name == "dual") return LossKind::kDual;
  throw ValidationError("loss must be one of mnrl, ocl, dual; got '" + std::string(name) + "'");
}

std::string_view loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kMnrl:
      return "mnrl";
    case LossKind::kOcl:
      return "ocl";
    case LossKind::kDual:
      return "dual";
  }
  return "unknown";
}

}  // namespace uco
