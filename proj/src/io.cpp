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

#include "urnn/io.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "urnn/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace urnn {

namespace {

constexpr char kMagic[8] = {'U', 'R', 'N', 'N', 'D', 'S', '1', '\0'};

void append_array(std::string& out, std::string_view key, std::span<const double> values) {
  out += "  \"";
  out += key;
  out += "\": [";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += ", ";
    out += format_double(values[i]);
  }
  out += "]";
}

Vector read_array(const json& j, const char* key, std::size_t expected) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw InvalidInput(std::string("model: missing array '") + key + "'");
  }
  Vector v = j.at(key).get<Vector>();
  if (v.size() != expected) {
    throw DimensionMismatch(std::string("model: array '") + key + "' has " +
                            std::to_string(v.size()) + " entries, expected " +
                            std::to_string(expected));
  }
  return v;
}

Matrix read_matrix(const json& j, const char* key, std::size_t rows, std::size_t cols) {
  const Vector v = read_array(j, key, rows * cols);
  Matrix m(rows, cols);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T> && sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.append(buf, 8);
}

template <typename T>
T get_le(std::string_view bytes, std::size_t& pos) {
  if (pos + 8 > bytes.size()) throw InvalidInput("dataset: truncated binary file");
  std::uint64_t bits;
  std::memcpy(&bits, bytes.data() + pos, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  pos += 8;
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_nullable(const json& j, double if_null) {
  return j.is_null() ? if_null : j.get<double>();
}

fs::path temp_sibling(const fs::path& target) {
  static std::atomic<unsigned> counter{0};
  return target.parent_path() /
         ("." + target.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
          std::to_string(counter++));
}

void require_parent(const fs::path& path) {
  const fs::path parent = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  std::error_code ec;
  if (!fs::is_directory(parent, ec)) {
    throw IoError("output directory does not exist: " + parent.string());
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw InvalidInput("cannot serialize non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string model_to_json(const RnnParams& params, const json& metadata) {
  params.validate();
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";
  out += "  \"n\": " + std::to_string(params.state_dim()) + ",\n";
  out += "  \"m\": " + std::to_string(params.input_dim()) + ",\n";
  out += "  \"p\": " + std::to_string(params.output_dim()) + ",\n";
  out += "  \"activation\": \"" + std::string(to_string(params.activation)) + "\",\n";
  append_array(out, "w", params.w.data());
  out += ",\n";
  append_array(out, "f", params.f.data());
  out += ",\n";
  append_array(out, "b", params.b);
  out += ",\n";
  append_array(out, "c", params.c.data());
  out += ",\n";
  append_array(out, "h_init", params.h_init);
  if (!metadata.is_null()) {
    out += ",\n  \"metadata\": " + metadata.dump();
  }
  out += "\n}\n";
  return out;
}

RnnParams model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("model: malformed JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw InvalidInput("model: unsupported format_version " + std::to_string(version));
    }
    const auto n = j.at("n").get<std::size_t>();
    const auto m = j.at("m").get<std::size_t>();
    const auto p = j.at("p").get<std::size_t>();
    RnnParams params;
    params.activation = parse_activation(j.at("activation").get<std::string>());
    params.w = read_matrix(j, "w", n, n);
    params.f = read_matrix(j, "f", n, m);
    params.b = read_array(j, "b", n);
    params.c = read_matrix(j, "c", p, n);
    params.h_init = j.contains("h_init") ? read_array(j, "h_init", n) : Vector(n, 0.0);
    params.validate();
    return params;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("model: ") + e.what());
  }
}

void atomic_write_file(const fs::path& path, std::string_view contents) {
  require_parent(path);
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_model(const fs::path& path, const RnnParams& params, const json& metadata) {
  atomic_write_file(path, model_to_json(params, metadata));
}

RnnParams load_model(const fs::path& path) { return model_from_json(read_file(path)); }

json spec_to_json(const SystemSpec& spec) {
  return json{{"n", spec.n},
              {"m", spec.m},
              {"p", spec.p},
              {"epsilon", spec.epsilon},
              {"seed", spec.seed},
              {"activation_target", spec.activation_target},
              {"input_std", spec.input_std},
              {"input_sparsity", spec.input_sparsity},
              {"calibration_tol", spec.calibration_tol},
              {"calibration_max_iter", spec.calibration_max_iter},
              {"probe_sequences", spec.probe_sequences},
              {"probe_length", spec.probe_length}};
}

SystemSpec spec_from_json(const json& j) {
  SystemSpec s;
  s.n = j.at("n").get<std::size_t>();
  s.m = j.at("m").get<std::size_t>();
  s.p = j.at("p").get<std::size_t>();
  s.epsilon = j.at("epsilon").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.activation_target = j.value("activation_target", s.activation_target);
  s.input_std = j.value("input_std", s.input_std);
  s.input_sparsity = j.value("input_sparsity", s.input_sparsity);
  s.calibration_tol = j.value("calibration_tol", s.calibration_tol);
  s.calibration_max_iter = j.value("calibration_max_iter", s.calibration_max_iter);
  s.probe_sequences = j.value("probe_sequences", s.probe_sequences);
  s.probe_length = j.value("probe_length", s.probe_length);
  return s;
}

std::string encode_sequences(std::span<const Sequence> seqs) {
  std::string out(kMagic, sizeof(kMagic));
  const std::uint64_t t = seqs.empty() ? 0 : seqs.front().x.rows();
  const std::uint64_t m = seqs.empty() ? 0 : seqs.front().x.cols();
  const std::uint64_t p = seqs.empty() ? 0 : seqs.front().y.cols();
  put_le<std::uint64_t>(out, seqs.size());
  put_le(out, t);
  put_le(out, m);
  put_le(out, p);
  for (const Sequence& s : seqs) {
    if (s.x.rows() != t || s.x.cols() != m || s.y.rows() != t || s.y.cols() != p) {
      throw DimensionMismatch("dataset: sequences do not share T, m, p");
    }
    for (double v : s.x.data()) put_le(out, v);
    for (double v : s.y.data()) put_le(out, v);
  }
  return out;
}

std::vector<Sequence> decode_sequences(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw InvalidInput("dataset: bad magic (expected URNNDS1)");
  }
  std::size_t pos = sizeof(kMagic);
  const auto count = get_le<std::uint64_t>(bytes, pos);
  const auto t = get_le<std::uint64_t>(bytes, pos);
  const auto m = get_le<std::uint64_t>(bytes, pos);
  const auto p = get_le<std::uint64_t>(bytes, pos);
  const std::uint64_t per_seq = t * (m + p) * 8;
  if (per_seq != 0 && (bytes.size() - pos) / per_seq != count) {
    throw InvalidInput("dataset: file size does not match header");
  }
  std::vector<Sequence> seqs(count);
  for (Sequence& s : seqs) {
    s.x = Matrix(t, m);
    s.y = Matrix(t, p);
    for (double& v : s.x.data()) v = get_le<double>(bytes, pos);
    for (double& v : s.y.data()) v = get_le<double>(bytes, pos);
  }
  if (pos != bytes.size()) throw InvalidInput("dataset: trailing bytes");
  return seqs;
}

void save_dataset(const fs::path& dir, const Dataset& ds, const json& extra_meta) {
  require_parent(dir);
  const fs::path tmp = temp_sibling(dir);
  std::error_code ec;
  fs::create_directory(tmp, ec);
  if (ec) throw IoError("cannot create " + tmp.string());
  try {
    json meta{{"format_version", kFormatVersion},
              {"spec", spec_to_json(ds.spec)},
              {"data_seed", ds.seed},
              {"T", ds.t_len},
              {"n_train", ds.train.size()},
              {"n_test", ds.test.size()},
              {"snr_db", nullable(ds.snr_db)},
              {"clean_signal_power", ds.clean_signal_power},
              {"noise_power", ds.noise_power},
              {"empirical_snr_db", nullable(ds.empirical_snr_db)},
              {"calibration_probe", "inputs drawn from the dataset input distribution"}};
    if (!extra_meta.is_null()) meta["extra"] = extra_meta;
    atomic_write_file(tmp / "train.bin", encode_sequences(ds.train));
    atomic_write_file(tmp / "test.bin", encode_sequences(ds.test));
    atomic_write_file(tmp / "meta.json", dump_report(meta));
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
  if (fs::exists(dir, ec)) {
    const fs::path old = temp_sibling(dir);
    fs::rename(dir, old, ec);
    if (ec) {
      fs::remove_all(tmp, ec);
      throw IoError("cannot replace existing " + dir.string());
    }
    fs::rename(tmp, dir, ec);
    if (ec) {
      fs::rename(old, dir, ec);
      throw IoError("cannot move dataset into " + dir.string());
    }
    fs::remove_all(old, ec);
  } else {
    fs::rename(tmp, dir, ec);
    if (ec) {
      fs::remove_all(tmp, ec);
      throw IoError("cannot move dataset into " + dir.string());
    }
  }
}

Dataset load_dataset(const fs::path& dir) {
  const json meta = [&] {
    try {
      return json::parse(read_file(dir / "meta.json"));
    } catch (const json::exception& e) {
      throw InvalidInput("dataset meta.json: " + std::string(e.what()));
    }
  }();
  Dataset ds;
  try {
    if (meta.at("format_version").get<int>() != kFormatVersion) {
      throw InvalidInput("dataset: unsupported format_version");
    }
    ds.spec = spec_from_json(meta.at("spec"));
    ds.seed = meta.at("data_seed").get<std::uint64_t>();
    ds.t_len = meta.at("T").get<std::size_t>();
    ds.snr_db = from_nullable(meta.at("snr_db"), std::numeric_limits<double>::infinity());
    ds.clean_signal_power = meta.at("clean_signal_power").get<double>();
    ds.noise_power = meta.at("noise_power").get<double>();
    ds.empirical_snr_db =
        from_nullable(meta.at("empirical_snr_db"), std::numeric_limits<double>::infinity());
  } catch (const json::exception& e) {
    throw InvalidInput("dataset meta.json: " + std::string(e.what()));
  }
  ds.train = decode_sequences(read_file(dir / "train.bin"));
  ds.test = decode_sequences(read_file(dir / "test.bin"));
  return ds;
}

json to_json(const EquivalenceReport& rep) {
  return json{{"format_version", kFormatVersion},
              {"trials", rep.trials},
              {"T", rep.t_len},
              {"input_bound_m", rep.input_bound_m},
              {"seed", rep.seed},
              {"tolerance", rep.tolerance},
              {"max_abs_deviation", rep.max_abs_deviation},
              {"per_trial_deviations", rep.per_trial_deviations},
              {"edge_probe_deviations", rep.edge_probe_deviations},
              {"passed", rep.passed}};
}

json to_json(const MismatchReport& rep) {
  json g_c = json::array(), g_u = json::array();
  for (const auto& v : rep.g_c_values) g_c.push_back({v[0], v[1]});
  for (const auto& v : rep.g_u_values) g_u.push_back({v[0], v[1]});
  json admissible = json::array();
  for (bool b : rep.controllable_observable_at) admissible.push_back(b);
  return json{{"x_grid", rep.x_grid},
              {"g_c", g_c},
              {"g_u", g_u},
              {"controllable_observable", admissible},
              {"max_gap", rep.max_gap ? json(*rep.max_gap) : json(nullptr)}};
}

json to_json(const TrainReport& rep, bool include_wall_time) {
  json j{{"format_version", kFormatVersion},
         {"seed", rep.seed},
         {"epochs_run", rep.epochs_run},
         {"best_epoch", rep.best_epoch},
         {"best_validation_loss", rep.best_validation_loss},
         {"stopping_reason", rep.stopping_reason},
         {"train_loss", rep.train_loss},
         {"validation_loss", rep.validation_loss},
         {"test_r2", json::array()},
         {"constraint_residual", rep.constraint_residual},
         {"max_step_residual", rep.max_step_residual},
         {"final_constraint_residual", rep.final_constraint_residual}};
  for (double r : rep.test_r2) j["test_r2"].push_back(nullable(r));
  if (include_wall_time) j["wall_time_s"] = rep.wall_time_s;
  return j;
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

}  // namespace urnn
