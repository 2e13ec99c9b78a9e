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

#include "persuasion/config.hpp"
#include "persuasion/core_model.hpp"
#include "persuasion/discretize_lp.hpp"
#include "persuasion/dual_contact.hpp"
#include "persuasion/error.hpp"
#include "persuasion/fixtures.hpp"
#include "persuasion/io.hpp"
#include "persuasion/nad_ode.hpp"
#include "persuasion/numeric.hpp"
#include "persuasion/simplex.hpp"
#include "persuasion/structure.hpp"
