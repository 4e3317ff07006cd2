/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace greenretrain {

enum class ErrorKind {
    kSchema,
    kParse,
    kValidation,
    kInsufficientData,
    kEmptyClass,
    kUndefinedMetric,
    kStratification,
    kConfiguration,
    kSequencing,
    kInstrumentation,
    kIo,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind; the CLI maps kinds to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// 2 = validation/configuration, 3 = data, 4 = internal.
int exit_code_for(ErrorKind kind) noexcept;

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace greenretrain
