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
#include "greenretrain/errors.hpp"

namespace greenretrain {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kSchema: return "schema error";
        case ErrorKind::kParse: return "parse error";
        case ErrorKind::kValidation: return "validation error";
        case ErrorKind::kInsufficientData: return "insufficient-data error";
        case ErrorKind::kEmptyClass: return "empty-class error";
        case ErrorKind::kUndefinedMetric: return "undefined-metric error";
        case ErrorKind::kStratification: return "stratification error";
        case ErrorKind::kConfiguration: return "configuration error";
        case ErrorKind::kSequencing: return "sequencing error";
        case ErrorKind::kInstrumentation: return "instrumentation error";
        case ErrorKind::kIo: return "I/O error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::kValidation:
        case ErrorKind::kConfiguration:
            return 2;
        case ErrorKind::kSchema:
        case ErrorKind::kParse:
        case ErrorKind::kInsufficientData:
        case ErrorKind::kEmptyClass:
        case ErrorKind::kUndefinedMetric:
        case ErrorKind::kStratification:
        case ErrorKind::kIo:
            return 3;
        case ErrorKind::kSequencing:
        case ErrorKind::kInstrumentation:
            return 4;
    }
    return 4;
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace greenretrain
