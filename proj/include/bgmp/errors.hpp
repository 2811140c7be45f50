// bgmpsim — grant-free C-RAN activity and signal detection
// Copyright 2026 the bgmpsim authors
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

namespace bgmp {

// A linear solve or message recursion lost numerical validity (indefinite
// normal matrix, non-finite message, ...). Distinct from precondition
// violations, which raise std::invalid_argument.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

// File read/write failure; the message carries the offending path.
struct IoError : std::runtime_error {
    explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace bgmp
