// SPDX-License-Identifier: Apache-2.0
//
// sparsedas: delay-and-sum beamforming as a sparse matrix product
// Copyright (C) 2026 The sparsedas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Command-line front end: `dastool <subcommand> ...`.

#include <ostream>
#include <string>
#include <vector>

namespace das::cli {

/// Runs one invocation. `args` excludes the program name. Failures print a
/// single line "error: <code>: <message>" to `err` and return nonzero.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

} // namespace das::cli
