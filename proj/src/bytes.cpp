#include "rcpor/bytes.hpp"

#include <stdexcept>

#include "rcpor/error.hpp"

namespace rcpor {

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

void append_u32_be(Bytes& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void append_u64_be(Bytes& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t read_u32_be(ByteView in) {
  if (in.size() < 4) throw std::out_of_range("read_u32_be");
  return (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) | (std::uint32_t{in[2]} << 8) |
         std::uint32_t{in[3]};
}

std::uint64_t read_u64_be(ByteView in) {
  if (in.size() < 8) throw std::out_of_range("read_u64_be");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
  return v;
}

BlockStore BlockStore::from_blocks(std::span<const Bytes> blocks) {
  if (blocks.empty()) throw Error(ErrorCode::kEmptyInput, "no blocks");
  BlockStore store(blocks.front().size());
  if (store.block_len_ == 0) throw Error(ErrorCode::kEmptyInput, "zero-length block");
  store.reserve(blocks.size());
  for (const auto& b : blocks) {
    if (b.size() != store.block_len_)
      throw Error(ErrorCode::kUnequalBlockLength, "block length " + std::to_string(b.size()) +
                                                      " != " + std::to_string(store.block_len_));
    store.push_back(b);
  }
  return store;
}

void BlockStore::push_back(ByteView block) {
  if (block.size() != block_len_)
    throw Error(ErrorCode::kUnequalBlockLength, "block length mismatch");
  data_.insert(data_.end(), block.begin(), block.end());
}

}  // namespace rcpor
