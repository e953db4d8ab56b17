#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rcpor/bytes.hpp"
#include "rcpor/crypto.hpp"

namespace rcpor::merkle {

using crypto::Digest;
using crypto::HashFn;

// Binary Merkle tree whose level-1 nodes hash raw block pairs directly:
// node = H(block_{2i-1} || block_{2i}). The leaf list is padded with
// all-zero blocks up to max(2, next power of two).
class MerkleTree {
 public:
  const BlockStore& leaves() const { return leaves_; }
  // Original (unpadded) leaf count.
  std::size_t leaf_count() const { return leaves_.size(); }
  std::size_t padded_count() const { return padded_; }
  // log2(padded_count()); always >= 1.
  unsigned height() const { return height_; }
  std::size_t hash_len() const { return hash_len_; }
  const HashFn& hash() const { return hash_; }

  // 0-based leaf access into the padded list.
  ByteView padded_leaf(std::size_t i) const;
  // Node i (0-based) of level k, 1 <= k <= height().
  ByteView node(unsigned level, std::size_t i) const;
  Digest root() const;

 private:
  friend MerkleTree gen_tree(BlockStore blocks, const HashFn& hash);

  BlockStore leaves_;
  Bytes zero_block_;
  std::size_t padded_ = 0;
  unsigned height_ = 0;
  std::size_t hash_len_ = 0;
  HashFn hash_;
  // levels_[k-1] holds level k as a flat run of hash_len-byte digests.
  std::vector<Bytes> levels_;
};

struct MerklePath {
  std::uint32_t leaf_index = 0;  // 1-based
  Bytes leaf_block;
  Bytes sibling_block;
  std::vector<Digest> sibling_digests;  // levels 1..height-1

  std::size_t element_count() const { return 1 + sibling_digests.size(); }
  friend bool operator==(const MerklePath&, const MerklePath&) = default;
};

// Throws kEmptyInput / kUnequalBlockLength.
MerkleTree gen_tree(BlockStore blocks, const HashFn& hash = HashFn{});
MerkleTree gen_tree(std::span<const Bytes> blocks, const HashFn& hash = HashFn{});

// index is 1-based over the original leaves. Throws kIndexOutOfRange.
MerklePath prove(const MerkleTree& tree, std::uint32_t index);

// Recomputes the root; left/right order comes from the bits of leaf_index-1,
// least significant first. Returns false on any malformed length.
bool verify(const MerklePath& path, const Digest& root, const HashFn& hash);
bool verify(const MerklePath& path, const Digest& root);

// Wire form: be32(leaf_index) || leaf_block || sibling_block || digests.
Bytes serialize(const MerklePath& path);
// Throws kInvalidParams when the length does not fit the stated shape.
MerklePath parse_path(ByteView wire, std::size_t block_len, std::size_t hash_len);

}  // namespace rcpor::merkle
