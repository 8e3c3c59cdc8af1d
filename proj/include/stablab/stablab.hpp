// Copyright 2026 The stab-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "stablab/charfn.hpp"
#include "stablab/clifford.hpp"
#include "stablab/error.hpp"
#include "stablab/families.hpp"
#include "stablab/gf2.hpp"
#include "stablab/io.hpp"
#include "stablab/measures.hpp"
#include "stablab/parallel.hpp"
#include "stablab/rng.hpp"
#include "stablab/states.hpp"
#include "stablab/tester.hpp"
#include "stablab/witness.hpp"
