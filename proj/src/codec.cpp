#include <algorithm>
#include <set>

#include "rcpor/error.hpp"
#include "rcpor/por.hpp"

namespace rcpor::por {

namespace {

Bytes pad_to(ByteView file, std::size_t payload_len) {
  Bytes out(file.begin(), file.end());
  out.resize((file.size() + payload_len - 1) / payload_len * payload_len, 0);
  return out;
}

void check_shape(ByteView encoded, std::size_t payload_len) {
  if (payload_len == 0 || encoded.size() % payload_len != 0)
    throw Error(ErrorCode::kInvalidParams, "encoded length is not a multiple of the payload length");
}

}  // namespace

Bytes IdentityCodec::encode(ByteView file, std::size_t payload_len) const {
  if (payload_len == 0) throw Error(ErrorCode::kInvalidParams, "payload length 0");
  return pad_to(file, payload_len);
}

Bytes IdentityCodec::decode(ByteView encoded, std::size_t payload_len, std::size_t original_len,
                            const std::vector<std::size_t>& erased) const {
  check_shape(encoded, payload_len);
  if (!erased.empty()) throw Error(ErrorCode::kInvalidParams, "identity codec cannot repair erasures");
  if (original_len > encoded.size()) throw Error(ErrorCode::kInvalidParams, "original length too large");
  return Bytes(encoded.begin(), encoded.begin() + original_len);
}

Bytes XorParityCodec::encode(ByteView file, std::size_t payload_len) const {
  if (payload_len == 0) throw Error(ErrorCode::kInvalidParams, "payload length 0");
  Bytes data = pad_to(file, payload_len);
  const std::size_t n = data.size() / payload_len;
  Bytes out;
  out.reserve(data.size() + (n + kGroup - 1) / kGroup * payload_len);
  for (std::size_t g = 0; g < n; g += kGroup) {
    Bytes parity(payload_len, 0);
    for (std::size_t i = g; i < std::min(n, g + kGroup); ++i) {
      auto p = ByteView(data).subspan(i * payload_len, payload_len);
      append(out, p);
      for (std::size_t b = 0; b < payload_len; ++b) parity[b] ^= p[b];
    }
    append(out, parity);
  }
  return out;
}

Bytes XorParityCodec::decode(ByteView encoded, std::size_t payload_len, std::size_t original_len,
                             const std::vector<std::size_t>& erased) const {
  check_shape(encoded, payload_len);
  const std::set<std::size_t> lost(erased.begin(), erased.end());
  const std::size_t total = encoded.size() / payload_len;
  Bytes out;
  for (std::size_t start = 0; start < total; start += kGroup + 1) {
    const std::size_t end = std::min(total, start + kGroup + 1);  // parity at end-1
    std::size_t missing = 0;
    std::size_t missing_pos = 0;
    for (std::size_t i = start; i < end; ++i)
      if (lost.count(i)) {
        ++missing;
        missing_pos = i;
      }
    if (missing > 1)
      throw Error(ErrorCode::kInvalidParams, "more than one erasure in parity group at " + std::to_string(start));
    Bytes repaired(payload_len, 0);
    if (missing == 1) {
      for (std::size_t i = start; i < end; ++i) {
        if (i == missing_pos) continue;
        auto p = encoded.subspan(i * payload_len, payload_len);
        for (std::size_t b = 0; b < payload_len; ++b) repaired[b] ^= p[b];
      }
    }
    for (std::size_t i = start; i + 1 < end; ++i) {
      if (missing == 1 && i == missing_pos)
        append(out, repaired);
      else
        append(out, encoded.subspan(i * payload_len, payload_len));
    }
  }
  if (original_len > out.size()) throw Error(ErrorCode::kInvalidParams, "original length too large");
  out.resize(original_len);
  return out;
}

std::unique_ptr<Codec> make_codec(const std::string& name) {
  if (name == "identity") return std::make_unique<IdentityCodec>();
  if (name == "xor-parity") return std::make_unique<XorParityCodec>();
  throw Error(ErrorCode::kInvalidParams, "unknown codec '" + name + "'");
}

}  // namespace rcpor::por
