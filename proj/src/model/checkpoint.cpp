#include "quanvnext/model/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "quanvnext/error.hpp"

namespace quanvnext::model {
namespace {

constexpr char kMagic[4] = {'Q', 'N', 'X', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kText = 1;
constexpr std::uint8_t kTensor = 2;

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& buf, std::string context) : buf_(buf), context_(std::move(context)) {}

  template <typename T>
  T get(const char* field) {
    if (pos_ + sizeof(T) > buf_.size()) {
      throw ParseError(context_ + ": truncated while reading " + field);
    }
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, buf_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }

  std::string bytes(std::size_t n, const char* field) {
    if (pos_ + n > buf_.size()) throw ParseError(context_ + ": truncated while reading " + field);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == buf_.size(); }

 private:
  const std::string& buf_;
  std::string context_;
  std::size_t pos_ = 0;
};

void put_record_header(std::string& out, const std::string& name, std::uint8_t kind,
                       std::uint64_t length) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
  out += name;
  put<std::uint8_t>(out, kind);
  put<std::uint64_t>(out, length);
}

void put_text(std::string& out, const std::string& name, const std::string& text) {
  put_record_header(out, name, kText, text.size());
  out += text;
}

void put_tensor(std::string& out, const std::string& name, const Tensor& t) {
  put_record_header(out, name, kTensor, 16 + 8 * t.size());
  put<std::uint64_t>(out, t.rows());
  put<std::uint64_t>(out, t.cols());
  for (double v : t.flat()) put<double>(out, v);
}

Tensor row_tensor(const std::vector<double>& v) { return {1, v.size(), v}; }

struct Record {
  std::uint8_t kind = 0;
  std::string payload;
};

Tensor decode_tensor(const std::string& name, const Record& rec) {
  if (rec.kind != kTensor) throw ParseError("checkpoint record '" + name + "': not a tensor");
  Reader r(rec.payload, "checkpoint record '" + name + "'");
  const auto rows = r.get<std::uint64_t>("rows");
  const auto cols = r.get<std::uint64_t>("cols");
  if (rec.payload.size() != 16 + 8 * rows * cols) {
    throw ParseError("checkpoint record '" + name + "': payload size does not match shape");
  }
  std::vector<double> data(rows * cols);
  for (double& v : data) v = r.get<double>("value");
  return {rows, cols, std::move(data)};
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const std::string& metadata_json) {
  std::string body;
  std::uint32_t count = 0;
  put_text(body, "config", model.config.to_json());
  ++count;
  put_text(body, "metadata", metadata_json);
  ++count;
  const auto names = model.trainable_names();
  const auto tensors = model.trainable();
  for (std::size_t i = 0; i < names.size(); ++i) {
    put_tensor(body, "param/" + names[i], *tensors[i]);
    ++count;
  }
  put_tensor(body, "frozen/embedding.phi", model.embedding.phi);
  ++count;
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    put_tensor(body, "frozen/block" + std::to_string(i + 1) + ".phi", model.blocks[i].quanv.phi);
    ++count;
  }
  put_tensor(body, "frozen/projection.phi", model.projection.phi);
  ++count;
  if (!model.normalization.empty()) {
    put_tensor(body, "norm/mean", row_tensor(model.normalization.mean));
    put_tensor(body, "norm/std", row_tensor(model.normalization.stddev));
    count += 2;
  }

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, count);
  out += body;

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string buf = ss.str();
  const std::string ctx = "checkpoint " + path.string();
  Reader r(buf, ctx);
  if (r.bytes(4, "magic") != std::string(kMagic, 4)) throw ParseError(ctx + ": bad magic");
  if (r.get<std::uint32_t>("version") != kVersion) throw ParseError(ctx + ": unsupported version");
  const auto count = r.get<std::uint32_t>("record count");
  std::map<std::string, Record> records;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.get<std::uint32_t>("record name length");
    std::string name = r.bytes(name_len, "record name");
    Record rec;
    rec.kind = r.get<std::uint8_t>("record kind");
    const auto len = r.get<std::uint64_t>("record length");
    rec.payload = r.bytes(len, "record payload");
    records[name] = std::move(rec);
  }
  if (!r.done()) throw ParseError(ctx + ": trailing bytes after last record");

  auto need = [&](const std::string& name) -> const Record& {
    auto it = records.find(name);
    if (it == records.end()) throw ParseError(ctx + ": missing record '" + name + "'");
    return it->second;
  };

  LoadedCheckpoint out;
  const Record& cfg = need("config");
  if (cfg.kind != kText) throw ParseError(ctx + ": record 'config' is not text");
  out.model = build_model(ModelConfig::from_json(cfg.payload), 0);
  out.metadata_json = need("metadata").payload;

  const auto names = out.model.trainable_names();
  auto tensors = out.model.trainable();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string key = "param/" + names[i];
    Tensor t = decode_tensor(key, need(key));
    if (!t.same_shape(*tensors[i])) throw ParseError(ctx + ": record '" + key + "' has wrong shape");
    *tensors[i] = std::move(t);
  }
  auto load_phi = [&](const std::string& key, Tensor& dst) {
    Tensor t = decode_tensor(key, need(key));
    if (!t.same_shape(dst)) throw ParseError(ctx + ": record '" + key + "' has wrong shape");
    dst = std::move(t);
  };
  load_phi("frozen/embedding.phi", out.model.embedding.phi);
  for (std::size_t i = 0; i < out.model.blocks.size(); ++i) {
    load_phi("frozen/block" + std::to_string(i + 1) + ".phi", out.model.blocks[i].quanv.phi);
  }
  load_phi("frozen/projection.phi", out.model.projection.phi);
  if (records.contains("norm/mean")) {
    out.model.normalization.mean = decode_tensor("norm/mean", need("norm/mean")).values();
    out.model.normalization.stddev = decode_tensor("norm/std", need("norm/std")).values();
  }
  return out;
}

}  // namespace quanvnext::model
