/*
 * Copyright 2026 The epibias Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "epibias/archive.h"

#include <bit>
#include <cstring>

#include "epibias/dataset_io.h"
#include "epibias/errors.h"
#include "epibias/hashing.h"
#include "json.hpp"

namespace epibias {
namespace {

static_assert(std::endian::native == std::endian::little,
              "archive payload is written in host order");

constexpr std::string_view kMagic = "EPBARCH1";
using Json = nlohmann::ordered_json;

void Append(std::string& out, std::span<const double> values) {
  const std::size_t at = out.size();
  out.resize(at + values.size() * sizeof(double));
  std::memcpy(out.data() + at, values.data(), values.size() * sizeof(double));
}

std::vector<double> Slice(std::string_view payload, std::size_t offset,
                          std::size_t count) {
  if (offset + count > payload.size() / sizeof(double)) {
    throw SchemaError("archive payload reference out of bounds");
  }
  std::vector<double> out(count);
  std::memcpy(out.data(), payload.data() + offset * sizeof(double),
              count * sizeof(double));
  return out;
}

}  // namespace

std::string ArchiveBytes(const TrainedEnsemble& ensemble) {
  std::string payload;
  std::size_t offset = 0;
  Json header;
  header["format"] = "epibias-archive";
  header["version"] = 1;
  header["model"] = {{"layer_sizes", ensemble.spec.layer_sizes},
                     {"activation", ActivationName(ensemble.spec.activation)}};

  header["draws"] = Json::array();
  for (const PosteriorDraw& d : ensemble.draws) {
    header["draws"].push_back({{"draw_id", d.draw_id},
                               {"cycle_index", d.cycle_index},
                               {"epoch_of_capture", d.epoch_of_capture},
                               {"offset", offset},
                               {"count", d.params.size()}});
    Append(payload, d.params.values);
    offset += d.params.size();
  }

  if (ensemble.table) {
    const UncertaintyTable& t = *ensemble.table;
    Json jt = {{"cycle_index", t.cycle_index},
               {"num_classes", t.num_classes},
               {"num_draws", t.num_draws},
               {"true_class", t.true_class},
               {"mean_offset", offset}};
    Append(payload, t.mean);
    offset += t.mean.size();
    jt["sigma_offset"] = offset;
    Append(payload, t.sigma);
    offset += t.sigma.size();
    header["table"] = std::move(jt);
  } else {
    header["table"] = nullptr;
  }
  header["train_attributes"] = ensemble.train_attributes;

  header["history"] = Json::array();
  for (const EpochRecord& r : ensemble.history) {
    header["history"].push_back({{"epoch", r.epoch},
                                 {"cycle", r.cycle},
                                 {"phase", PhaseName(r.phase)},
                                 {"mean_loss", r.mean_loss},
                                 {"mean_weight", r.mean_weight},
                                 {"lr", r.lr}});
  }
  header["weight_stats"] = Json::array();
  for (const CycleWeightStats& s : ensemble.weight_stats) {
    header["weight_stats"].push_back({{"cycle", s.cycle},
                                      {"mean_sigma_true", s.mean_sigma_true},
                                      {"max_sigma_true", s.max_sigma_true},
                                      {"mean_weight", s.mean_weight},
                                      {"max_weight", s.max_weight}});
  }
  header["payload_doubles"] = offset;
  header["payload_sha256"] = Sha256Hex(payload);

  const std::string text = header.dump();
  std::string out(kMagic);
  const std::uint64_t len = text.size();
  out.append(reinterpret_cast<const char*>(&len), sizeof(len));
  out += text;
  out += payload;
  return out;
}

TrainedEnsemble ParseArchive(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw SchemaError("not an epibias model archive");
  }
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data() + kMagic.size(), sizeof(len));
  const std::size_t body = kMagic.size() + sizeof(len);
  if (len > bytes.size() - body) throw SchemaError("truncated archive header");
  const std::string_view payload = bytes.substr(body + len);

  TrainedEnsemble e;
  try {
    const Json h = Json::parse(bytes.substr(body, len));
    if (h.at("version").get<int>() != 1) {
      throw SchemaError("unsupported archive version");
    }
    if (payload.size() != h.at("payload_doubles").get<std::size_t>() * sizeof(double)) {
      throw SchemaError("archive payload size mismatch");
    }
    if (h.at("payload_sha256").get<std::string>() != Sha256Hex(payload)) {
      throw SchemaError("archive payload checksum mismatch");
    }
    e.spec.layer_sizes = h.at("model").at("layer_sizes").get<std::vector<int>>();
    e.spec.activation =
        ParseActivation(h.at("model").at("activation").get<std::string>());
    e.spec.Validate();

    for (const Json& d : h.at("draws")) {
      PosteriorDraw draw;
      draw.draw_id = d.at("draw_id");
      draw.cycle_index = d.at("cycle_index");
      draw.epoch_of_capture = d.at("epoch_of_capture");
      draw.params.values =
          Slice(payload, d.at("offset"), d.at("count").get<std::size_t>());
      if (draw.params.size() != e.spec.ParamCount()) {
        throw SchemaError("draw size does not match the model spec");
      }
      e.draws.push_back(std::move(draw));
    }

    if (!h.at("table").is_null()) {
      const Json& jt = h.at("table");
      UncertaintyTable t;
      t.cycle_index = jt.at("cycle_index");
      t.num_classes = jt.at("num_classes");
      t.num_draws = jt.at("num_draws");
      t.true_class = jt.at("true_class").get<std::vector<int>>();
      const std::size_t cells = t.true_class.size() * t.num_classes;
      t.mean = Slice(payload, jt.at("mean_offset"), cells);
      t.sigma = Slice(payload, jt.at("sigma_offset"), cells);
      t.sigma_true.resize(t.true_class.size());
      for (std::size_t i = 0; i < t.true_class.size(); ++i) {
        t.sigma_true[i] = t.sigma[i * t.num_classes + t.true_class[i]];
      }
      e.table = std::move(t);
    }
    e.train_attributes = h.at("train_attributes").get<std::vector<int>>();

    for (const Json& r : h.at("history")) {
      e.history.push_back(
          {r.at("epoch"), r.at("cycle"),
           r.at("phase").get<std::string>() == "sampling" ? Phase::kSampling
                                                          : Phase::kExploration,
           r.at("mean_loss"), r.at("mean_weight"), r.at("lr")});
    }
    for (const Json& s : h.at("weight_stats")) {
      e.weight_stats.push_back({s.at("cycle"), s.at("mean_sigma_true"),
                                s.at("max_sigma_true"), s.at("mean_weight"),
                                s.at("max_weight")});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("malformed archive header: ") + ex.what());
  } catch (const ConfigError& ex) {
    throw SchemaError(std::string("archive model spec invalid: ") + ex.what());
  }
  return e;
}

void WriteArchive(const std::filesystem::path& path,
                  const TrainedEnsemble& ensemble) {
  WriteFileAtomic(path, ArchiveBytes(ensemble));
}

TrainedEnsemble ReadArchive(const std::filesystem::path& path) {
  return ParseArchive(ReadFileBytes(path));
}

}  // namespace epibias
