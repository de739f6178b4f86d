#include "mvn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "mvn/errors.hpp"

namespace mvn {

namespace {

constexpr char kMagic[8] = {'M', 'V', 'N', 'W', 'C', 'K', 'P', 'T'};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  put_u32(out, static_cast<uint32_t>(v));
  put_u32(out, static_cast<uint32_t>(v >> 32));
}

void put_str(std::vector<uint8_t>& out, const std::string& s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Reader {
 public:
  explicit Reader(const std::vector<uint8_t>& b) : b_(b) {}
  uint32_t u32() {
    need(4);
    uint32_t v = static_cast<uint32_t>(b_[pos_]) | (static_cast<uint32_t>(b_[pos_ + 1]) << 8) |
                 (static_cast<uint32_t>(b_[pos_ + 2]) << 16) |
                 (static_cast<uint32_t>(b_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  uint64_t u64() {
    uint64_t lo = u32();
    uint64_t hi = u32();
    return lo | (hi << 32);
  }
  uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::string str() {
    uint32_t n = u32();
    need(n);
    std::string s(b_.begin() + pos_, b_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }
  void raw(uint8_t* dst, size_t n) {
    need(n);
    std::memcpy(dst, b_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(size_t n) const {
    if (pos_ + n > b_.size()) throw IoError("checkpoint: truncated file");
  }
  const std::vector<uint8_t>& b_;
  size_t pos_ = 0;
};

}  // namespace

std::string Checkpoint::meta_or(const std::string& key, const std::string& fallback) const {
  auto it = meta.find(key);
  return it == meta.end() ? fallback : it->second;
}

std::vector<uint8_t> serialize_checkpoint(const Checkpoint& c) {
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 8);
  put_u32(out, c.version);
  put_u32(out, static_cast<uint32_t>(c.meta.size()));
  for (const auto& [k, v] : c.meta) {
    put_str(out, k);
    put_str(out, v);
  }
  put_u32(out, static_cast<uint32_t>(c.params.count()));
  for (size_t i = 0; i < c.params.count(); ++i) {
    const Matrix& m = c.params.values[i];
    uint8_t dtype = i < c.dtypes.size() ? c.dtypes[i] : 0;
    put_str(out, c.params.names[i]);
    out.push_back(dtype);
    put_u32(out, static_cast<uint32_t>(m.rows));
    put_u32(out, static_cast<uint32_t>(m.cols));
    if (dtype == 0) {
      for (double x : m.d) put_u64(out, std::bit_cast<uint64_t>(x));
    } else {
      for (double x : m.d) put_u32(out, std::bit_cast<uint32_t>(static_cast<float>(x)));
    }
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::vector<uint8_t>& bytes) {
  Reader r(bytes);
  char magic[8];
  r.raw(reinterpret_cast<uint8_t*>(magic), 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw IoError("checkpoint: bad magic");
  Checkpoint c;
  c.version = r.u32();
  if (c.version != 1)
    throw IoError("checkpoint: unsupported version " + std::to_string(c.version));
  uint32_t n_meta = r.u32();
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.str();
    c.meta[k] = r.str();
  }
  uint32_t n_params = r.u32();
  for (uint32_t i = 0; i < n_params; ++i) {
    std::string name = r.str();
    uint8_t dtype = r.u8();
    if (dtype > 1) throw IoError("checkpoint: unknown dtype for " + name);
    uint32_t rows = r.u32();
    uint32_t cols = r.u32();
    Matrix m(static_cast<int>(rows), static_cast<int>(cols));
    for (auto& x : m.d) {
      if (dtype == 0)
        x = std::bit_cast<double>(r.u64());
      else
        x = static_cast<double>(std::bit_cast<float>(r.u32()));
    }
    c.params.add(name, std::move(m));
    c.dtypes.push_back(dtype);
  }
  if (!r.done()) throw IoError("checkpoint: trailing bytes");
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  auto bytes = serialize_checkpoint(c);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot write");
  f.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (!f) throw IoError(path + ": write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace mvn
