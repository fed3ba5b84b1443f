// SPDX-License-Identifier: Apache-2.0
//
// flatlens: flattened Luneburg lens design and verification toolkit
// Copyright (C) 2026 The flatlens authors
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
// ------------------------------------------------------------------------

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace flatlens::io {

// printf("%.9g")
std::string g9(double v);

// Writes the whole file or throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);
void ensure_directory(const std::filesystem::path& dir);

std::string sha256_hex(std::string_view data);

// Minimal CSV reader: header names plus rows of raw fields. Blank lines and
// lines starting with '#' are skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws IoError if absent
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

double to_double(const std::string& field);

} // namespace flatlens::io
