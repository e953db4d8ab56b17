#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rcpor {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);
// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

void append(Bytes& out, ByteView data);
void append_u32_be(Bytes& out, std::uint32_t v);
void append_u64_be(Bytes& out, std::uint64_t v);
std::uint32_t read_u32_be(ByteView in);
std::uint64_t read_u64_be(ByteView in);

inline ByteView as_view(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Fixed-width block storage kept in one contiguous buffer. Blocks are
// addressed 0-based here; protocol-level indices are 1-based.
class BlockStore {
 public:
  BlockStore() = default;
  explicit BlockStore(std::size_t block_len) : block_len_(block_len) {}

  // Throws EmptyInput / UnequalBlockLength.
  static BlockStore from_blocks(std::span<const Bytes> blocks);

  void push_back(ByteView block);
  void reserve(std::size_t count) { data_.reserve(count * block_len_); }

  std::size_t size() const { return block_len_ == 0 ? 0 : data_.size() / block_len_; }
  bool empty() const { return data_.empty(); }
  std::size_t block_len() const { return block_len_; }

  ByteView block(std::size_t i) const {
    return ByteView(data_).subspan(i * block_len_, block_len_);
  }
  std::span<std::uint8_t> mutable_block(std::size_t i) {
    return std::span<std::uint8_t>(data_).subspan(i * block_len_, block_len_);
  }
  const Bytes& raw() const { return data_; }

  friend bool operator==(const BlockStore&, const BlockStore&) = default;

 private:
  std::size_t block_len_ = 0;
  Bytes data_;
};

}  // namespace rcpor
