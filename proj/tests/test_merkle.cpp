#include <gtest/gtest.h>

#include "rcpor/error.hpp"
#include "rcpor/merkle.hpp"

using namespace rcpor;
using namespace rcpor::merkle;

namespace {

std::vector<Bytes> numbered(std::size_t n, std::size_t len = 16) {
  std::vector<Bytes> out;
  for (std::size_t i = 1; i <= n; ++i) out.emplace_back(len, static_cast<std::uint8_t>(i));
  return out;
}

std::vector<Bytes> random_blocks(std::size_t n, std::size_t len, std::uint64_t seed) {
  crypto::Rng rng(seed);
  std::vector<Bytes> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(rng.bytes(len));
  return out;
}

}  // namespace

TEST(Merkle, FrozenRoots) {
  EXPECT_EQ(gen_tree(numbered(4)).root().hex(), "a2c8182f5ad25b50deebc7eab3a28456");
  EXPECT_EQ(gen_tree(numbered(3)).root().hex(), "bdb933c5c70b28aec4c7d80415b5be06");
  EXPECT_EQ(gen_tree(numbered(1)).root().hex(), "5392401ead5cf319f807bf5e48c10777");
  EXPECT_EQ(gen_tree(numbered(4), crypto::HashFn(32)).root().hex(),
            "331a0f23887efc48d0989ba296ae25b51a5504b9474dfc2d4d133ce4fc999435");
}

TEST(Merkle, ShapeAndPadding) {
  auto t1 = gen_tree(numbered(1));
  EXPECT_EQ(t1.padded_count(), 2u);
  EXPECT_EQ(t1.height(), 1u);
  auto t5 = gen_tree(numbered(5));
  EXPECT_EQ(t5.padded_count(), 8u);
  EXPECT_EQ(t5.height(), 3u);
  EXPECT_EQ(t5.leaf_count(), 5u);
  EXPECT_EQ(Bytes(t5.padded_leaf(7).begin(), t5.padded_leaf(7).end()), Bytes(16, 0));
}

TEST(Merkle, EveryPathVerifies) {
  for (std::size_t m = 1; m <= 17; ++m) {
    auto blocks = random_blocks(m, 20, m);
    auto tree = gen_tree(blocks);
    for (std::uint32_t i = 1; i <= m; ++i) {
      auto p = prove(tree, i);
      EXPECT_EQ(p.leaf_block, blocks[i - 1]);
      EXPECT_EQ(p.sibling_digests.size() + 1, tree.height());
      EXPECT_TRUE(verify(p, tree.root())) << "m=" << m << " i=" << i;
    }
  }
}

TEST(Merkle, AnyTamperFails) {
  auto tree = gen_tree(random_blocks(8, 16, 9));
  for (std::uint32_t i = 1; i <= 8; ++i) {
    auto p = prove(tree, i);
    for (std::size_t b = 0; b < p.leaf_block.size(); ++b) {
      auto q = p;
      q.leaf_block[b] ^= 1;
      EXPECT_FALSE(verify(q, tree.root()));
      q = p;
      q.sibling_block[b] ^= 1;
      EXPECT_FALSE(verify(q, tree.root()));
    }
    for (std::size_t d = 0; d < p.sibling_digests.size(); ++d) {
      auto q = p;
      q.sibling_digests[d].bytes[0] ^= 1;
      EXPECT_FALSE(verify(q, tree.root()));
    }
    for (std::uint32_t other = 0; other <= 9; ++other) {
      if (other == i) continue;
      auto q = p;
      q.leaf_index = other;
      EXPECT_FALSE(verify(q, tree.root())) << i << " as " << other;
    }
  }
}

TEST(Merkle, MalformedPathsRejected) {
  auto tree = gen_tree(random_blocks(4, 16, 3));
  auto p = prove(tree, 2);
  auto q = p;
  q.sibling_digests.clear();
  EXPECT_FALSE(verify(q, tree.root()));
  q = p;
  q.sibling_digests.push_back(p.sibling_digests[0]);
  EXPECT_FALSE(verify(q, tree.root()));
  q = p;
  q.sibling_block.pop_back();
  EXPECT_FALSE(verify(q, tree.root()));
  q = p;
  q.sibling_digests[0].bytes.pop_back();
  EXPECT_FALSE(verify(q, tree.root()));
  q = p;
  q.leaf_index = 0;
  EXPECT_FALSE(verify(q, tree.root()));
  EXPECT_FALSE(verify(p, crypto::Digest{Bytes(8, 0)}));
}

TEST(Merkle, ProveOutOfRange) {
  auto tree = gen_tree(numbered(3));
  for (std::uint32_t bad : {0u, 4u, 100u}) {
    try {
      prove(tree, bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
    }
  }
}

TEST(Merkle, EmptyInput) {
  std::vector<Bytes> none;
  try {
    gen_tree(none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Merkle, SerializeRoundTrip) {
  auto tree = gen_tree(random_blocks(6, 20, 4));
  auto p = prove(tree, 5);
  Bytes wire = serialize(p);
  EXPECT_EQ(wire.size(), 4 + 2 * 20 + 2 * 16u);
  EXPECT_EQ(read_u32_be(wire), 5u);
  EXPECT_EQ(parse_path(wire, 20, 16), p);
  EXPECT_THROW(parse_path(ByteView(wire).subspan(1), 20, 16), Error);
}
