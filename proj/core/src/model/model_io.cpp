#include "forgan/model/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "forgan/error.hpp"

namespace forgan::model {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "model files are written little-endian");

constexpr char kMagic[8] = {'F', 'O', 'R', 'G', 'A', 'N', 'M', 'D'};

std::uint64_t fnv1a(const std::uint8_t* p, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <class T>
void put(std::vector<std::uint8_t>& out, const T& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

    template <class T>
    T get(const char* what) {
        T v;
        need(sizeof(T), what);
        std::memcpy(&v, b_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    const std::uint8_t* take(std::size_t n, const char* what) {
        need(n, what);
        const auto* p = b_.data() + pos_;
        pos_ += n;
        return p;
    }
    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n, const char* what) const {
        if (n > b_.size() - pos_) throw FormatError(std::string("model file is truncated (while reading ") + what + ")");
    }
    const std::vector<std::uint8_t>& b_;
    std::size_t pos_ = 0;
};

std::vector<NamedConstTensor> tensors_of(const ForGanModel& m) {
    auto out = m.generator.named_parameters();
    if (m.has_discriminator()) {
        auto d = m.discriminator.named_parameters();
        out.insert(out.end(), d.begin(), d.end());
    }
    return out;
}

std::vector<NamedTensor> tensors_of(ForGanModel& m) {
    auto out = m.generator.named_parameters();
    if (m.has_discriminator()) {
        auto d = m.discriminator.named_parameters();
        out.insert(out.end(), d.begin(), d.end());
    }
    return out;
}

json hyper_json(const HyperParams& h) {
    return {{"cell", std::string(nn::to_string(h.cell))}, {"gen_hidden", h.gen_hidden},
            {"dis_hidden", h.dis_hidden},                 {"noise_dim", h.noise_dim},
            {"condition_len", h.condition_len},           {"d_iters", h.d_iters}};
}

HyperParams hyper_from(const json& j) {
    HyperParams h;
    h.cell = nn::parse_cell_kind(j.at("cell").get<std::string>());
    h.gen_hidden = j.at("gen_hidden").get<std::size_t>();
    h.dis_hidden = j.at("dis_hidden").get<std::size_t>();
    h.noise_dim = j.at("noise_dim").get<std::size_t>();
    h.condition_len = j.at("condition_len").get<std::size_t>();
    h.d_iters = j.at("d_iters").get<std::size_t>();
    return h;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const ForGanModel& model) {
    model.check();
    json tensors = json::array();
    const auto named = tensors_of(model);
    for (const auto& [name, t] : named) tensors.push_back({{"name", name}, {"shape", t->shape()}});
    const json header = {{"kind", std::string(to_string(model.kind))},
                         {"hyper", hyper_json(model.hyper)},
                         {"scaler", {{"offset", model.scaler.offset}, {"scale", model.scaler.scale}}},
                         {"tensors", tensors}};
    const std::string text = header.dump();

    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put(out, kModelFormatVersion);
    put(out, static_cast<std::uint64_t>(text.size()));
    out.insert(out.end(), text.begin(), text.end());
    for (const auto& [name, t] : named) {
        for (double v : t->values()) put(out, v);
    }
    put(out, fnv1a(out.data(), out.size()));
    return out;
}

ForGanModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
    Reader in(bytes);
    if (std::memcmp(in.take(sizeof(kMagic), "magic"), kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("not a model file (bad magic)");
    }
    const auto version = in.get<std::uint32_t>("version");
    if (version != kModelFormatVersion) {
        throw FormatError("unsupported model file version " + std::to_string(version) + " (this build reads " +
                          std::to_string(kModelFormatVersion) + ")");
    }
    if (bytes.size() < sizeof(std::uint64_t) + in.pos()) throw FormatError("model file is truncated");
    const std::size_t body = bytes.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + body, sizeof stored);
    if (stored != fnv1a(bytes.data(), body)) throw FormatError("model file is corrupt or truncated (checksum mismatch)");

    const auto len = in.get<std::uint64_t>("header length");
    if (len > body - in.pos()) throw FormatError("model file is truncated (header)");
    const auto* text = reinterpret_cast<const char*>(in.take(static_cast<std::size_t>(len), "header"));

    ForGanModel m;
    try {
        const json header = json::parse(text, text + len);
        m.kind = parse_model_kind(header.at("kind").get<std::string>());
        m.hyper = hyper_from(header.at("hyper"));
        m.hyper.validate();
        m.scaler.offset = header.at("scaler").at("offset").get<double>();
        m.scaler.scale = header.at("scaler").at("scale").get<double>();
        const auto& h = m.hyper;
        m.generator = Generator(h.cell, h.gen_hidden, h.noise_dim, h.condition_len);
        if (m.has_discriminator()) m.discriminator = Discriminator(h.cell, h.dis_hidden, h.condition_len);

        const auto named = tensors_of(m);
        const auto& listed = header.at("tensors");
        if (listed.size() != named.size()) throw FormatError("model file lists an unexpected number of tensors");
        for (std::size_t i = 0; i < named.size(); ++i) {
            const auto& [name, t] = named[i];
            if (listed[i].at("name").get<std::string>() != name ||
                listed[i].at("shape").get<nn::Shape>() != t->shape()) {
                throw FormatError("model file tensor " + std::to_string(i) + " does not match '" + name + "' " +
                                  nn::to_string(t->shape()));
            }
        }
        for (const auto& [name, t] : named) {
            const auto* raw = in.take(t->size() * sizeof(double), "parameters");
            std::memcpy(t->data(), raw, t->size() * sizeof(double));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("model file header is malformed: ") + e.what());
    } catch (const ContractError& e) {
        throw FormatError(std::string("model file header is invalid: ") + e.what());
    }
    if (in.pos() != body) throw FormatError("model file has trailing bytes");
    return m;
}

void save_model(const ForGanModel& model, const std::filesystem::path& path) {
    const auto bytes = serialize_model(model);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write model '" + path.string() + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("cannot write model '" + path.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

ForGanModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace forgan::model
