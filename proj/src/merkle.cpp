#include "rcpor/merkle.hpp"

#include <cstring>

#include "rcpor/error.hpp"

namespace rcpor::merkle {

ByteView MerkleTree::padded_leaf(std::size_t i) const {
  if (i >= padded_) throw Error(ErrorCode::kIndexOutOfRange, "padded leaf " + std::to_string(i));
  return i < leaves_.size() ? leaves_.block(i) : ByteView(zero_block_);
}

ByteView MerkleTree::node(unsigned level, std::size_t i) const {
  if (level == 0 || level > height_ || i >= (padded_ >> level))
    throw Error(ErrorCode::kIndexOutOfRange, "node (" + std::to_string(level) + ", " + std::to_string(i) + ")");
  return ByteView(levels_[level - 1]).subspan(i * hash_len_, hash_len_);
}

Digest MerkleTree::root() const {
  auto r = node(height_, 0);
  return Digest{Bytes(r.begin(), r.end())};
}

MerkleTree gen_tree(BlockStore blocks, const HashFn& hash) {
  if (blocks.empty()) throw Error(ErrorCode::kEmptyInput, "cannot build a tree over zero blocks");
  MerkleTree t;
  t.hash_ = hash;
  t.hash_len_ = hash.out_len();
  t.zero_block_.assign(blocks.block_len(), 0);
  t.padded_ = 2;
  t.height_ = 1;
  while (t.padded_ < blocks.size()) {
    t.padded_ <<= 1;
    ++t.height_;
  }
  t.leaves_ = std::move(blocks);

  const std::size_t hl = t.hash_len_;
  t.levels_.resize(t.height_);
  Bytes& first = t.levels_[0];
  first.resize((t.padded_ / 2) * hl);
  for (std::size_t i = 0; i < t.padded_ / 2; ++i)
    hash.hash_pair(t.padded_leaf(2 * i), t.padded_leaf(2 * i + 1), first.data() + i * hl);
  for (unsigned k = 2; k <= t.height_; ++k) {
    const Bytes& below = t.levels_[k - 2];
    Bytes& cur = t.levels_[k - 1];
    const std::size_t n = t.padded_ >> k;
    cur.resize(n * hl);
    for (std::size_t i = 0; i < n; ++i)
      hash.hash_pair(ByteView(below).subspan(2 * i * hl, hl), ByteView(below).subspan((2 * i + 1) * hl, hl),
                     cur.data() + i * hl);
  }
  return t;
}

MerkleTree gen_tree(std::span<const Bytes> blocks, const HashFn& hash) {
  return gen_tree(BlockStore::from_blocks(blocks), hash);
}

MerklePath prove(const MerkleTree& tree, std::uint32_t index) {
  if (index == 0 || index > tree.leaf_count())
    throw Error(ErrorCode::kIndexOutOfRange,
                "leaf " + std::to_string(index) + " not in [1, " + std::to_string(tree.leaf_count()) + "]");
  const std::size_t i0 = index - 1;
  MerklePath p;
  p.leaf_index = index;
  auto leaf = tree.padded_leaf(i0);
  auto sib = tree.padded_leaf(i0 ^ 1);
  p.leaf_block.assign(leaf.begin(), leaf.end());
  p.sibling_block.assign(sib.begin(), sib.end());
  for (unsigned k = 1; k < tree.height(); ++k) {
    auto d = tree.node(k, (i0 >> k) ^ 1);
    p.sibling_digests.push_back(Digest{Bytes(d.begin(), d.end())});
  }
  return p;
}

bool verify(const MerklePath& path, const Digest& root, const HashFn& hash) {
  if (path.leaf_index == 0 || root.size() != hash.out_len()) return false;
  if (path.leaf_block.empty() || path.leaf_block.size() != path.sibling_block.size()) return false;
  const std::size_t hl = hash.out_len();
  const std::size_t i0 = path.leaf_index - 1;
  const std::size_t height = path.sibling_digests.size() + 1;
  if (height < 64 && (i0 >> height) != 0) return false;

  Bytes cur(hl);
  if ((i0 & 1) == 0)
    hash.hash_pair(path.leaf_block, path.sibling_block, cur.data());
  else
    hash.hash_pair(path.sibling_block, path.leaf_block, cur.data());
  Bytes next(hl);
  for (std::size_t k = 1; k < height; ++k) {
    const Digest& d = path.sibling_digests[k - 1];
    if (d.size() != hl) return false;
    if (((i0 >> k) & 1) == 0)
      hash.hash_pair(cur, d.view(), next.data());
    else
      hash.hash_pair(d.view(), cur, next.data());
    cur.swap(next);
  }
  return cur == root.bytes;
}

bool verify(const MerklePath& path, const Digest& root) {
  if (root.size() == 0 || root.size() > 32) return false;
  return verify(path, root, HashFn(root.size()));
}

Bytes serialize(const MerklePath& path) {
  Bytes out;
  append_u32_be(out, path.leaf_index);
  append(out, path.leaf_block);
  append(out, path.sibling_block);
  for (const auto& d : path.sibling_digests) append(out, d.view());
  return out;
}

MerklePath parse_path(ByteView wire, std::size_t block_len, std::size_t hash_len) {
  if (block_len == 0 || hash_len == 0 || wire.size() < 4 + 2 * block_len ||
      (wire.size() - 4 - 2 * block_len) % hash_len != 0)
    throw Error(ErrorCode::kInvalidParams, "path wire length " + std::to_string(wire.size()) +
                                               " does not fit block/hash lengths");
  MerklePath p;
  p.leaf_index = read_u32_be(wire);
  std::size_t off = 4;
  p.leaf_block.assign(wire.begin() + off, wire.begin() + off + block_len);
  off += block_len;
  p.sibling_block.assign(wire.begin() + off, wire.begin() + off + block_len);
  off += block_len;
  for (; off < wire.size(); off += hash_len)
    p.sibling_digests.push_back(Digest{Bytes(wire.begin() + off, wire.begin() + off + hash_len)});
  return p;
}

}  // namespace rcpor::merkle
