#include "lungbench/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "lungbench/common/checksum.hpp"
#include "lungbench/common/error.hpp"
#include "lungbench/nn/network.hpp"
#include "lungbench/nn/serialize.hpp"

namespace lungbench::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'L', 'B', 'C', 'K', 'P', 'T', '\0', '\0'};

template <class T>
void put(std::vector<char>& out, const T& value) {
    const auto* p = reinterpret_cast<const char*>(&value);
    out.insert(out.end(), p, p + sizeof(T));
}

void put_tensors(std::vector<char>& out, const ParameterSet& set) {
    for (const auto& t : set.tensors) {
        const auto* p = reinterpret_cast<const char*>(t.values.data());
        out.insert(out.end(), p, p + t.values.size() * sizeof(float));
    }
}

class Reader {
public:
    explicit Reader(const std::vector<char>& data) : data_(data) {}

    void read(void* dst, std::size_t n) {
        if (pos_ + n > data_.size()) throw Error("checkpoint.format", "truncated checkpoint");
        std::memcpy(dst, data_.data() + pos_, n);
        pos_ += n;
    }
    template <class T>
    T get() {
        T v;
        read(&v, sizeof(T));
        return v;
    }
    std::size_t position() const { return pos_; }

private:
    const std::vector<char>& data_;
    std::size_t pos_ = 0;
};

void read_tensors(Reader& in, ParameterSet& set) {
    for (auto& t : set.tensors) in.read(t.values.data(), t.values.size() * sizeof(float));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
    nlohmann::json header;
    header["model"] = ck.model;
    header["training"] = ck.training;
    header["history"] = ck.history;
    header["adam_step"] = ck.optimizer ? ck.optimizer->step : -1;
    nlohmann::json tensors = nlohmann::json::array();
    for (const auto& t : ck.params.tensors) tensors.push_back({{"name", t.name}, {"shape", t.shape}});
    header["tensors"] = tensors;
    const std::string text = header.dump();

    std::vector<char> out(std::begin(kMagic), std::end(kMagic));
    put(out, kCheckpointVersion);
    put(out, static_cast<std::uint64_t>(text.size()));
    out.insert(out.end(), text.begin(), text.end());
    put_tensors(out, ck.params);
    if (ck.optimizer) {
        put_tensors(out, ck.optimizer->m);
        put_tensors(out, ck.optimizer->v);
    }
    put(out, fnv1a64(std::as_bytes(std::span<const char>(out))));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("io.write", "cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error("io.write", "cannot write " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("io.read", "cannot read " + path.string());
    const std::vector<char> data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (data.size() < sizeof(kMagic) + 4 + 8 + 8 || std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
        throw Error("checkpoint.format", "not a checkpoint file: " + path.string());
    }
    std::uint64_t stored;
    std::memcpy(&stored, data.data() + data.size() - 8, 8);
    if (fnv1a64(std::as_bytes(std::span<const char>(data.data(), data.size() - 8))) != stored) {
        throw Error("checkpoint.checksum", "checksum mismatch in " + path.string());
    }

    Reader in(data);
    char magic[8];
    in.read(magic, 8);
    if (in.get<std::uint32_t>() != kCheckpointVersion) throw Error("checkpoint.format", "unsupported version");
    const auto header_bytes = in.get<std::uint64_t>();
    if (header_bytes > data.size()) throw Error("checkpoint.format", "bad header length");
    std::string text(static_cast<std::size_t>(header_bytes), '\0');
    in.read(text.data(), text.size());

    Checkpoint ck;
    try {
        const auto header = nlohmann::json::parse(text);
        ck.model = header.at("model").get<ModelConfig>();
        ck.training = header.at("training").get<TrainingConfig>();
        ck.history = header.at("history").get<TrainingHistory>();
        for (const auto& t : header.at("tensors")) {
            Tensor<float> tensor{t.at("name").get<std::string>(), t.at("shape").get<std::vector<int>>(), {}};
            std::size_t n = 1;
            for (int d : tensor.shape) n *= static_cast<std::size_t>(d);
            tensor.values.resize(n);
            ck.params.tensors.push_back(std::move(tensor));
        }
        const auto step = header.at("adam_step").get<std::int64_t>();
        read_tensors(in, ck.params);
        if (step >= 0) {
            AdamState adam = AdamState::fresh(ck.params);
            adam.step = step;
            read_tensors(in, adam.m);
            read_tensors(in, adam.v);
            ck.optimizer = std::move(adam);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("checkpoint.format", std::string("bad checkpoint header: ") + e.what());
    }
    if (in.position() != data.size() - 8) throw Error("checkpoint.format", "trailing bytes in checkpoint");

    const auto expected = Network<float>(ck.model).init_parameters();
    if (expected.size() != ck.params.size()) throw Error("checkpoint.format", "tensor list does not match model");
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i].name != ck.params[i].name || expected[i].shape != ck.params[i].shape) {
            throw Error("checkpoint.format", "tensor " + ck.params[i].name + " does not match model");
        }
    }
    return ck;
}

}  // namespace lungbench::nn
