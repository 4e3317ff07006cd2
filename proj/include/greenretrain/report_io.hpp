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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "greenretrain/detector.hpp"
#include "greenretrain/lifecycle.hpp"

namespace greenretrain {

nlohmann::json to_json(const LifecycleReport& report);
LifecycleReport report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DriftVerdict& verdict);

/// `<config>_seed<k>.json`
std::string run_file_name(const LifecycleReport& report);

/// Writes the report with a trailing newline; returns the path written.
std::filesystem::path write_run_file(const LifecycleReport& report, const std::filesystem::path& out_dir);
LifecycleReport read_run_file(const std::filesystem::path& path);

}  // namespace greenretrain
