#include "autoflow/serialize.hpp"

#include <bit>
#include <cstring>

#include "autoflow/error.hpp"

namespace autoflow::serialize {

void Writer::u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }

void Writer::u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void Writer::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void Writer::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void Writer::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void Writer::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s.data(), s.size());
}

void Writer::raw(const void* data, std::size_t size) {
    buf_.append(static_cast<const char*>(data), size);
}

void Reader::need(std::size_t n) const {
    if (pos_ + n > data_.size())
        fail(ErrorCode::NotAModelFile, "truncated or corrupt model file");
}

std::uint8_t Reader::u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
}

std::uint16_t Reader::u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
}

std::uint32_t Reader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
}

std::uint64_t Reader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

std::string Reader::str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
}

namespace {
enum FieldTag : std::uint8_t {
    kU64 = 1,
    kF64 = 2,
    kStr = 3,
    kF64Array = 4,
    kU64Array = 5,
    kStrArray = 6,
};
}  // namespace

void FieldMap::write(Writer& w) const {
    w.u32(static_cast<std::uint32_t>(fields_.size()));
    for (const auto& [name, value] : fields_) {
        w.str(name);
        std::visit(
            [&w](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::uint64_t>) {
                    w.u8(kU64);
                    w.u64(v);
                } else if constexpr (std::is_same_v<T, double>) {
                    w.u8(kF64);
                    w.f64(v);
                } else if constexpr (std::is_same_v<T, std::string>) {
                    w.u8(kStr);
                    w.str(v);
                } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                    w.u8(kF64Array);
                    w.u64(v.size());
                    for (double x : v) w.f64(x);
                } else if constexpr (std::is_same_v<T, std::vector<std::uint64_t>>) {
                    w.u8(kU64Array);
                    w.u64(v.size());
                    for (std::uint64_t x : v) w.u64(x);
                } else {
                    w.u8(kStrArray);
                    w.u64(v.size());
                    for (const std::string& x : v) w.str(x);
                }
            },
            value);
    }
}

FieldMap FieldMap::read(Reader& r) {
    FieldMap m;
    const std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        std::string name = r.str();
        const std::uint8_t tag = r.u8();
        switch (tag) {
            case kU64: m.fields_[name] = r.u64(); break;
            case kF64: m.fields_[name] = r.f64(); break;
            case kStr: m.fields_[name] = r.str(); break;
            case kF64Array: {
                const std::uint64_t len = r.u64();
                if (len > r.remaining() / 8)
                    fail(ErrorCode::NotAModelFile, "array length exceeds file size");
                std::vector<double> v(len);
                for (auto& x : v) x = r.f64();
                m.fields_[name] = std::move(v);
                break;
            }
            case kU64Array: {
                const std::uint64_t len = r.u64();
                if (len > r.remaining() / 8)
                    fail(ErrorCode::NotAModelFile, "array length exceeds file size");
                std::vector<std::uint64_t> v(len);
                for (auto& x : v) x = r.u64();
                m.fields_[name] = std::move(v);
                break;
            }
            case kStrArray: {
                const std::uint64_t len = r.u64();
                if (len > r.remaining() / 4)  // every string costs at least its length prefix
                    fail(ErrorCode::NotAModelFile, "array length exceeds file size");
                std::vector<std::string> v(len);
                for (auto& x : v) x = r.str();
                m.fields_[name] = std::move(v);
                break;
            }
            default:
                fail(ErrorCode::NotAModelFile, "unknown field tag in model file");
        }
    }
    return m;
}

const FieldMap::Value& FieldMap::get(const std::string& name) const {
    auto it = fields_.find(name);
    if (it == fields_.end())
        fail(ErrorCode::NotAModelFile, "model file is missing field '" + name + "'");
    return it->second;
}

std::uint64_t FieldMap::u64(const std::string& name) const {
    const auto* p = std::get_if<std::uint64_t>(&get(name));
    if (!p) fail(ErrorCode::NotAModelFile, "field '" + name + "' has the wrong type");
    return *p;
}

double FieldMap::f64(const std::string& name) const {
    const auto* p = std::get_if<double>(&get(name));
    if (!p) fail(ErrorCode::NotAModelFile, "field '" + name + "' has the wrong type");
    return *p;
}

const std::string& FieldMap::str(const std::string& name) const {
    const auto* p = std::get_if<std::string>(&get(name));
    if (!p) fail(ErrorCode::NotAModelFile, "field '" + name + "' has the wrong type");
    return *p;
}

const std::vector<double>& FieldMap::f64s(const std::string& name) const {
    const auto* p = std::get_if<std::vector<double>>(&get(name));
    if (!p) fail(ErrorCode::NotAModelFile, "field '" + name + "' has the wrong type");
    return *p;
}

const std::vector<std::uint64_t>& FieldMap::u64s(const std::string& name) const {
    const auto* p = std::get_if<std::vector<std::uint64_t>>(&get(name));
    if (!p) fail(ErrorCode::NotAModelFile, "field '" + name + "' has the wrong type");
    return *p;
}

const std::vector<std::string>& FieldMap::strs(const std::string& name) const {
    const auto* p = std::get_if<std::vector<std::string>>(&get(name));
    if (!p) fail(ErrorCode::NotAModelFile, "field '" + name + "' has the wrong type");
    return *p;
}

}  // namespace autoflow::serialize
