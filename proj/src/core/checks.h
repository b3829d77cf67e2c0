// Copyright 2026 The tram Authors.
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

#ifndef TRAM_CORE_CHECKS_H_
#define TRAM_CORE_CHECKS_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace tram {

// All invariant violations and bad inputs surface as TramError. The C API
// layer translates these into error codes.
class TramError : public std::runtime_error {
 public:
  explicit TramError(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void FatalError(const std::string& msg) {
  throw TramError(msg);
}

}  // namespace tram

#define TRAM_CHECK(cond)                                                   \
  do {                                                                     \
    if (!(cond)) {                                                         \
      std::ostringstream oss_;                                             \
      oss_ << "Check failed at " << __FILE__ << ":" << __LINE__ << ": "    \
           << #cond;                                                       \
      ::tram::FatalError(oss_.str());                                      \
    }                                                                      \
  } while (false)

#define TRAM_CHECK_MSG(cond, msg)                                          \
  do {                                                                     \
    if (!(cond)) {                                                         \
      std::ostringstream oss_;                                             \
      oss_ << msg;                                                         \
      ::tram::FatalError(oss_.str());                                      \
    }                                                                      \
  } while (false)

#define TRAM_CHECK_EQ(a, b)                                                \
  do {                                                                     \
    if (!((a) == (b))) {                                                   \
      std::ostringstream oss_;                                             \
      oss_ << "Check failed at " << __FILE__ << ":" << __LINE__ << ": "    \
           << #a << " == " << #b << " (" << (a) << " vs " << (b) << ")";   \
      ::tram::FatalError(oss_.str());                                      \
    }                                                                      \
  } while (false)

#endif  // TRAM_CORE_CHECKS_H_
