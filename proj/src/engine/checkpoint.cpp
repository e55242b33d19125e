// SPDX-License-Identifier: Apache-2.0
#include "adaret/engine/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint payloads assume a little-endian host");

std::filesystem::path manifest_path(const std::filesystem::path& dir) { return dir / "manifest.json"; }
std::filesystem::path payload_path(const std::filesystem::path& dir) { return dir / "tensors.bin"; }

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw CheckpointError("cannot create checkpoint directory " + dir.string() + ": " + ec.message());

    nlohmann::ordered_json manifest;
    manifest["format_version"] = kCheckpointFormatVersion;
    manifest["phase"] = ckpt.phase;
    manifest["epoch"] = ckpt.epoch;
    manifest["num_items"] = ckpt.num_items;
    auto& cfg = manifest["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config::entries(ckpt.config)) cfg[k] = v;
    auto& index = manifest["tensors"] = nlohmann::ordered_json::array();

    std::ofstream bin(payload_path(dir), std::ios::binary);
    if (!bin) throw CheckpointError("cannot write " + payload_path(dir).string());
    std::size_t offset = 0;
    for (const auto& t : ckpt.tensors) {
        const std::size_t bytes = t.values.size() * sizeof(float);
        index.push_back(nlohmann::ordered_json{
            {"name", t.name}, {"shape", t.shape}, {"dtype", "f32"}, {"offset", offset}, {"length", bytes}});
        std::vector<float> buf(t.values.begin(), t.values.end());
        bin.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(bytes));
        offset += bytes;
    }
    if (!bin) throw CheckpointError("failed writing " + payload_path(dir).string());

    std::ofstream out(manifest_path(dir));
    if (!out) throw CheckpointError("cannot write " + manifest_path(dir).string());
    out << manifest.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    std::ifstream in(manifest_path(dir));
    if (!in) throw CheckpointError("cannot open " + manifest_path(dir).string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("malformed manifest: " + std::string(e.what()));
    }

    Checkpoint ckpt;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    try {
        const int version = manifest.at("format_version").get<int>();
        if (version != kCheckpointFormatVersion) {
            throw CheckpointError("unsupported checkpoint format version " + std::to_string(version) + " (expected " +
                                  std::to_string(kCheckpointFormatVersion) + ")");
        }
        ckpt.phase = manifest.at("phase").get<std::string>();
        ckpt.epoch = manifest.value("epoch", 0);
        ckpt.num_items = manifest.at("num_items").get<std::size_t>();
        config::TrainConfig cfg;
        for (const auto& [k, v] : manifest.at("config").items()) config::set_value(cfg, k, v.get<std::string>());
        ckpt.config = cfg;
        for (const auto& entry : manifest.at("tensors")) {
            if (entry.at("dtype").get<std::string>() != "f32") throw CheckpointError("unsupported tensor dtype");
            TensorRecord rec;
            rec.name = entry.at("name").get<std::string>();
            rec.shape = entry.at("shape").get<compute::Shape>();
            const auto offset = entry.at("offset").get<std::size_t>();
            const auto length = entry.at("length").get<std::size_t>();
            if (length != compute::numel(rec.shape) * sizeof(float)) {
                throw CheckpointError("tensor '" + rec.name + "' length disagrees with its shape");
            }
            spans.emplace_back(offset, length);
            ckpt.tensors.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("malformed manifest: " + std::string(e.what()));
    }

    std::ifstream bin(payload_path(dir), std::ios::binary | std::ios::ate);
    if (!bin) throw CheckpointError("cannot open " + payload_path(dir).string());
    const auto size = static_cast<std::size_t>(bin.tellg());
    std::size_t expected = 0;
    for (const auto& [offset, length] : spans) expected = std::max(expected, offset + length);
    if (size < expected) {
        throw CheckpointError("truncated payload: " + std::to_string(size) + " bytes, manifest needs " +
                              std::to_string(expected));
    }
    if (size > expected) {
        throw CheckpointError("missing tensor: payload holds " + std::to_string(size - expected) +
                              " bytes not listed in the manifest");
    }
    bin.seekg(0);
    std::vector<float> buf;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        buf.resize(spans[i].second / sizeof(float));
        bin.seekg(static_cast<std::streamoff>(spans[i].first));
        bin.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(spans[i].second));
        if (!bin) throw CheckpointError("truncated payload while reading '" + ckpt.tensors[i].name + "'");
        ckpt.tensors[i].values.assign(buf.begin(), buf.end());
    }
    return ckpt;
}

}  // namespace engine
ADARET_END_NAMESPACE
