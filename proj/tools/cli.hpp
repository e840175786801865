// Copyright 2026 The CAFFEINE Authors
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

#include <atomic>
#include <filesystem>
#include <string>

namespace caffeine::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kInterrupted = 130,
};

/// Environment variable that overrides the output directory when --out-dir is absent.
inline constexpr const char* kOutDirEnv = "CAFFEINE_OUT_DIR";

/// Entry point shared by the executable and the tests. `abort_flag` is polled
/// during long runs (the executable wires it to SIGINT).
int run(int argc, const char* const* argv, std::atomic<bool>* abort_flag = nullptr);

/// Writes `content` to `path` through a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& data);

}  // namespace caffeine::cli
