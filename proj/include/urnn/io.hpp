// Copyright 2026 The urnn-equiv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// On-disk formats.
//
// model.json   dimensions, activation tag and row-major weight arrays, every
//              weight printed with 17 significant digits.
// <dataset>/   meta.json plus train.bin / test.bin:
//                "URNNDS1\0" | u64 n_seq | u64 T | u64 m | u64 p |
//                per sequence: x (T*m f64, row-major), y (T*p f64, row-major)
//              all little-endian.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "urnn/equivalence.hpp"
#include "urnn/rnn.hpp"
#include "urnn/synth.hpp"
#include "urnn/train.hpp"

namespace urnn {

inline constexpr int kFormatVersion = 1;

// "%.17g"; non-finite values are rejected.
std::string format_double(double v);

std::string model_to_json(const RnnParams& params, const nlohmann::json& metadata = nullptr);
RnnParams model_from_json(std::string_view text);

// Writes to a sibling temporary file and renames it into place.
void atomic_write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

void save_model(const std::filesystem::path& path, const RnnParams& params,
                const nlohmann::json& metadata = nullptr);
RnnParams load_model(const std::filesystem::path& path);

nlohmann::json spec_to_json(const SystemSpec& spec);
SystemSpec spec_from_json(const nlohmann::json& j);

std::string encode_sequences(std::span<const Sequence> seqs);
std::vector<Sequence> decode_sequences(std::string_view bytes);

// Builds the dataset in a temporary sibling directory and renames it over
// `dir`. The parent of `dir` must exist.
void save_dataset(const std::filesystem::path& dir, const Dataset& ds,
                  const nlohmann::json& extra_meta = nullptr);
Dataset load_dataset(const std::filesystem::path& dir);

nlohmann::json to_json(const EquivalenceReport& rep);
nlohmann::json to_json(const MismatchReport& rep);
nlohmann::json to_json(const TrainReport& rep, bool include_wall_time);

// JSON text with a trailing newline; used for every report file so reruns
// produce byte-identical output.
std::string dump_report(const nlohmann::json& j);

}  // namespace urnn
