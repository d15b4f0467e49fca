//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retro/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "retro/data/reaction.h"

namespace retro::nn {
namespace {

constexpr const char *kFormatTag = "retrosynth-seq2seq";

static_assert(std::endian::native == std::endian::little, "checkpoint blobs assume a little-endian host");

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw data::IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

void save_checkpoint(const Seq2Seq<float> &model, const OptimizerState<float> &opt,
                     const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw data::IoError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["format"] = kFormatTag;
  manifest["version"] = kCheckpointVersion;
  manifest["config"] = to_json(model.config());
  manifest["optimizer_step"] = opt.step;
  manifest["tensors"] = nlohmann::ordered_json::array();

  std::string blob;
  auto append = [&](const std::string &name, const Matrix<float> &m) {
    manifest["tensors"].push_back({ { "name", name },
                                    { "shape", { m.rows(), m.cols() } },
                                    { "offset", blob.size() } });
    blob.append(reinterpret_cast<const char *>(m.data()), m.size() * sizeof(float));
  };
  const auto &tensors = model.tensors();
  for (const auto &t: tensors)
    append(t.name, t.value);
  for (std::size_t k = 0; k < tensors.size(); ++k)
    append("adam.first/" + tensors[k].name, opt.first[k]);
  for (std::size_t k = 0; k < tensors.size(); ++k)
    append("adam.second/" + tensors[k].name, opt.second[k]);

  std::ofstream bin(dir / "tensors.bin", std::ios::binary);
  bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  std::ofstream man(dir / "manifest.json", std::ios::binary);
  man << manifest.dump(1) << "\n";
  if (!bin || !man)
    throw data::IoError("cannot write checkpoint to " + dir.string());
}

Checkpoint load_checkpoint(const std::filesystem::path &dir, const Seq2SeqConfig *expected) {
  const std::string manifest_text = read_file(dir / "manifest.json");
  const std::string blob = read_file(dir / "tensors.bin");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_text);
  } catch (const nlohmann::json::exception &e) {
    throw data::FormatError(std::string("checkpoint manifest is not valid JSON: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("format") || !manifest.contains("version"))
    throw data::FormatError("checkpoint manifest lacks format or version");
  if (manifest["format"] != kFormatTag || manifest["version"] != kCheckpointVersion)
    throw VersionMismatch(fmt::format("unsupported checkpoint {} version {}", manifest["format"].dump(),
                                      manifest["version"].dump()));

  try {
    Seq2SeqConfig cfg = config_from_json(manifest.at("config"));
    try {
      cfg.validate();
    } catch (const ConfigError &e) {
      throw data::FormatError(std::string("checkpoint config: ") + e.what());
    }
    Checkpoint ck{ Seq2Seq<float>(expected ? *expected : cfg), {} };
    ck.optimizer = OptimizerState<float>::zeros_like(ck.model);
    ck.optimizer.step = manifest.at("optimizer_step").get<long>();

    auto &tensors = ck.model.tensors();
    const auto &entries = manifest.at("tensors");
    if (entries.size() != 3 * tensors.size())
      throw ShapeMismatch(fmt::format("checkpoint holds {} tensors, expected {}", entries.size(),
                                      3 * tensors.size()));
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const std::size_t which = k % tensors.size();
      Matrix<float> &dst = k < tensors.size()       ? tensors[which].value
                         : k < 2 * tensors.size() ? ck.optimizer.first[which]
                                                  : ck.optimizer.second[which];
      const auto &e = entries[k];
      const std::string name = e.at("name").get<std::string>();
      const auto rows = e.at("shape").at(0).get<Eigen::Index>();
      const auto cols = e.at("shape").at(1).get<Eigen::Index>();
      if (!name.ends_with(tensors[which].name) || rows != dst.rows() || cols != dst.cols())
        throw ShapeMismatch(fmt::format("tensor {} is {}x{}, expected {} {}x{}", name, rows, cols,
                                        tensors[which].name, dst.rows(), dst.cols()));
      const auto offset = e.at("offset").get<std::size_t>();
      const std::size_t bytes = static_cast<std::size_t>(dst.size()) * sizeof(float);
      if (offset > blob.size() || blob.size() - offset < bytes)
        throw data::FormatError("tensors.bin too short for " + name);
      std::memcpy(dst.data(), blob.data() + offset, bytes);
    }
    return ck;
  } catch (const nlohmann::json::exception &e) {
    throw data::FormatError(std::string("malformed checkpoint manifest: ") + e.what());
  }
}

}  // namespace retro::nn
