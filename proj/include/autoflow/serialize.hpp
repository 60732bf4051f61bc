#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace autoflow::serialize {

/// Byte-level writer for the saved-pipeline format. Integers are explicit
/// little-endian, doubles travel as their IEEE-754 bit pattern, so files are
/// identical across platforms and predictions survive a roundtrip bit-exactly.
class Writer {
public:
    void u8(std::uint8_t v);
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(std::string_view s);
    void raw(const void* data, std::size_t size);

    const std::string& buffer() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();

    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const;

    std::string_view data_;
    std::size_t pos_ = 0;
};

/// A named-field dictionary, the unit of self-description in the format.
/// Every stage payload is one FieldMap; readers look fields up by name, so
/// field order and unknown extras are not load-bearing.
class FieldMap {
public:
    using Value = std::variant<std::uint64_t, double, std::string,
                               std::vector<double>, std::vector<std::uint64_t>,
                               std::vector<std::string>>;

    void set_u64(const std::string& name, std::uint64_t v) { fields_[name] = v; }
    void set_f64(const std::string& name, double v) { fields_[name] = v; }
    void set_str(const std::string& name, std::string v) { fields_[name] = std::move(v); }
    void set_f64s(const std::string& name, std::vector<double> v) { fields_[name] = std::move(v); }
    void set_u64s(const std::string& name, std::vector<std::uint64_t> v) { fields_[name] = std::move(v); }
    void set_strs(const std::string& name, std::vector<std::string> v) { fields_[name] = std::move(v); }

    std::uint64_t u64(const std::string& name) const;
    double f64(const std::string& name) const;
    const std::string& str(const std::string& name) const;
    const std::vector<double>& f64s(const std::string& name) const;
    const std::vector<std::uint64_t>& u64s(const std::string& name) const;
    const std::vector<std::string>& strs(const std::string& name) const;
    bool has(const std::string& name) const { return fields_.count(name) != 0; }

    void write(Writer& w) const;
    static FieldMap read(Reader& r);

private:
    const Value& get(const std::string& name) const;

    std::map<std::string, Value> fields_;  // ordered: deterministic bytes
};

}  // namespace autoflow::serialize
