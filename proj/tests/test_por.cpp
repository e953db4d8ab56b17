#include <gtest/gtest.h>

#include <filesystem>

#include "rcpor/error.hpp"
#include "rcpor/por.hpp"

using namespace rcpor;
using namespace rcpor::por;

namespace {

Bytes random_file(std::size_t n, std::uint64_t seed) {
  crypto::Rng rng(seed);
  return rng.bytes(n);
}

Bytes seq16() {
  Bytes b(16);
  for (int i = 0; i < 16; ++i) b[i] = static_cast<std::uint8_t>(i);
  return b;
}

}  // namespace

TEST(Por, DeriveIndicesFrozen) {
  EXPECT_EQ(derive_indices(PrfKey(Bytes(16, 0)), 3, 8), (std::vector<std::uint32_t>{6, 6, 6}));
  EXPECT_EQ(derive_indices(PrfKey(seq16()), 5, 1000), (std::vector<std::uint32_t>{705, 987, 908, 249, 421}));
  EXPECT_EQ(derive_index(PrfKey(seq16()), 2, 1000), 987u);
}

TEST(Por, SetupEncodesIndices) {
  IdentityCodec codec;
  auto s = setup(random_file(100, 1), 16, codec, 4);
  EXPECT_EQ(s.pp.m, 7u);
  EXPECT_EQ(s.file.m(), 7u);
  EXPECT_EQ(s.file.block_len(), 20u);
  for (std::uint32_t i = 0; i < 7; ++i) EXPECT_EQ(block_index(s.file.blocks.block(i)), i + 1);
  EXPECT_EQ(s.pp.sigma, s.tree.root());
  EXPECT_EQ(s.pp.zeta.key_bits, 128u);
}

TEST(Por, SetupErrors) {
  IdentityCodec codec;
  auto code_of = [&](ByteView f, std::uint32_t phi) {
    try {
      setup(f, 16, codec, phi);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code_of({}, 1), ErrorCode::kEmptyFile);
  Bytes f = random_file(64, 2);
  EXPECT_EQ(code_of(f, 0), ErrorCode::kInvalidParams);
  EXPECT_EQ(code_of(f, 5), ErrorCode::kInvalidParams);
}

TEST(Por, HonestProofAccepted) {
  IdentityCodec codec;
  crypto::Rng rng(3);
  auto s = setup(random_file(4096, 3), 16, codec, 16);
  for (int t = 0; t < 20; ++t) {
    auto key = gen_query(rng);
    auto pi = prove(s.tree, key, s.pp);
    EXPECT_EQ(pi.size(), 16u);
    EXPECT_EQ(verify(pi, key, s.pp), Verdict::accept());
    EXPECT_EQ(pi.entries[0].block, prove(s.file, key, s.pp).entries[0].block);
  }
}

TEST(Por, FirstFailureReported) {
  IdentityCodec codec;
  crypto::Rng rng(4);
  auto s = setup(random_file(2048, 4), 16, codec, 10);
  auto key = gen_query(rng);
  auto pi = prove(s.tree, key, s.pp);

  auto bad = pi;
  bad.entries[6].block[0] ^= 1;
  bad.entries[6].path.leaf_block = bad.entries[6].block;
  EXPECT_EQ(verify(bad, key, s.pp), Verdict::reject(7));

  bad = pi;
  bad.entries[8].path.sibling_digests[2].bytes[0] ^= 1;
  bad.entries[3].path.sibling_block[0] ^= 1;
  EXPECT_EQ(verify(bad, key, s.pp), Verdict::reject(4));

  // index pass runs before any path check
  bad = pi;
  bad.entries[1].path.sibling_block[0] ^= 1;
  bad.entries[5].path.leaf_index += 1;
  EXPECT_EQ(verify(bad, key, s.pp), Verdict::reject(6));

  bad = pi;
  bad.entries[2].path.leaf_block[0] ^= 1;
  EXPECT_EQ(verify(bad, key, s.pp), Verdict::reject(3));

  bad = pi;
  bad.entries.pop_back();
  EXPECT_EQ(verify(bad, key, s.pp), Verdict::reject(10));
  bad = pi;
  bad.entries.push_back(pi.entries[0]);
  EXPECT_EQ(verify(bad, key, s.pp), Verdict::reject(11));
  EXPECT_EQ(verify(ProofVector{}, key, s.pp), Verdict::reject(1));
}

TEST(Por, ExplicitSingleIndex) {
  IdentityCodec codec;
  crypto::Rng rng(5);
  auto s = setup(random_file(512, 5), 16, codec, 8);
  auto key = gen_query(rng);
  auto pi = prove(s.tree, key, s.pp);
  for (std::uint32_t g = 1; g <= 8; ++g) {
    const auto q = derive_index(key, g, s.pp.m);
    ProofVector single{{pi.entries[g - 1]}};
    EXPECT_TRUE(verify(single, std::vector<std::uint32_t>{q}, s.pp).accepted);
    single.entries[0].block[0] ^= 1;
    single.entries[0].path.leaf_block = single.entries[0].block;
    EXPECT_EQ(verify(single, std::vector<std::uint32_t>{q}, s.pp), Verdict::reject(1));
  }
}

TEST(Por, ProveParamMismatch) {
  IdentityCodec codec;
  crypto::Rng rng(6);
  auto a = setup(random_file(256, 6), 16, codec, 4);
  auto b = setup(random_file(256, 7), 16, codec, 4);
  try {
    prove(a.tree, gen_query(rng), b.pp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParamMismatch);
  }
}

TEST(Codec, IdentityPadsAndDecodes) {
  IdentityCodec c;
  Bytes f = random_file(37, 8);
  Bytes enc = c.encode(f, 16);
  EXPECT_EQ(enc.size(), 48u);
  EXPECT_EQ(c.decode(enc, 16, 37, {}), f);
  EXPECT_THROW(c.decode(enc, 16, 37, {0}), Error);
}

TEST(Codec, XorParityRepairsOnePerGroup) {
  XorParityCodec c;
  Bytes f = random_file(16 * 10 + 3, 9);  // 11 payloads: groups of 4, 4, 3
  Bytes enc = c.encode(f, 16);
  EXPECT_EQ(enc.size(), 16u * (11 + 3));
  EXPECT_EQ(c.decode(enc, 16, f.size(), {}), f);
  Bytes damaged = enc;
  for (std::size_t pos : {1u, 7u, 12u})
    for (std::size_t b = 0; b < 16; ++b) damaged[pos * 16 + b] = 0xee;
  EXPECT_EQ(c.decode(damaged, 16, f.size(), {1, 7, 12}), f);
  EXPECT_THROW(c.decode(enc, 16, f.size(), {0, 1}), Error);
  EXPECT_EQ(make_codec("xor-parity")->name(), "xor-parity");
  EXPECT_THROW(make_codec("reed-solomon"), Error);
}

TEST(Por, EncodedFileRoundTrip) {
  IdentityCodec codec;
  auto s = setup(random_file(300, 10), 16, codec, 2);
  auto path = std::filesystem::temp_directory_path() / "rcpor_test_encoded.bin";
  write_encoded_file(path, s.file);
  EXPECT_EQ(read_encoded_file(path), s.file);
  EXPECT_EQ(std::filesystem::file_size(path), 12 + s.file.m() * 20);
  std::filesystem::remove(path);
  try {
    read_encoded_file(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}
