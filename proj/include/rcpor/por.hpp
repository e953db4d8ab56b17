#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rcpor/bytes.hpp"
#include "rcpor/crypto.hpp"
#include "rcpor/merkle.hpp"

namespace rcpor::por {

using crypto::Digest;
using crypto::PrfKey;

inline constexpr std::uint32_t kDefaultPhi = 460;
inline constexpr std::size_t kDefaultPayloadLen = 16;
inline constexpr std::size_t kIndexFieldLen = 4;

// Erasure-code hook applied to the raw file before it is split into blocks.
class Codec {
 public:
  virtual ~Codec() = default;
  virtual std::string name() const = 0;
  // Output length is a multiple of payload_len (the last payload is
  // zero-padded first).
  virtual Bytes encode(ByteView file, std::size_t payload_len) const = 0;
  // Recovers the original file of original_len bytes from encoded payloads.
  // Entries listed in `erased` (0-based payload positions) are treated as
  // lost. Throws kInvalidParams when the erasures exceed what the code fixes.
  virtual Bytes decode(ByteView encoded, std::size_t payload_len, std::size_t original_len,
                       const std::vector<std::size_t>& erased) const = 0;
};

class IdentityCodec final : public Codec {
 public:
  std::string name() const override { return "identity"; }
  Bytes encode(ByteView file, std::size_t payload_len) const override;
  Bytes decode(ByteView encoded, std::size_t payload_len, std::size_t original_len,
               const std::vector<std::size_t>& erased) const override;
};

// One XOR parity payload after every group of kGroup data payloads (the
// final group may be short). Repairs one erasure per group.
class XorParityCodec final : public Codec {
 public:
  static constexpr std::size_t kGroup = 4;
  std::string name() const override { return "xor-parity"; }
  Bytes encode(ByteView file, std::size_t payload_len) const override;
  Bytes decode(ByteView encoded, std::size_t payload_len, std::size_t original_len,
               const std::vector<std::size_t>& erased) const override;
};

// Throws kInvalidParams for unknown names.
std::unique_ptr<Codec> make_codec(const std::string& name);

// u*: payload || be32(index), indices 1..m.
struct EncodedFile {
  BlockStore blocks;
  std::size_t payload_len = kDefaultPayloadLen;

  std::size_t m() const { return blocks.size(); }
  std::size_t block_len() const { return payload_len + kIndexFieldLen; }
  friend bool operator==(const EncodedFile&, const EncodedFile&) = default;
};

struct PrfDescription {
  std::uint32_t key_bits = crypto::kPrfKeyLen * 8;
  std::uint32_t input_bits = crypto::kPrfCounterLen * 8;
  std::uint32_t output_bits = crypto::kPrfOutputLen * 8;
  friend bool operator==(const PrfDescription&, const PrfDescription&) = default;
};

struct PublicParams {
  Digest sigma;
  std::uint32_t phi = kDefaultPhi;
  std::uint32_t m = 0;
  PrfDescription zeta;
  friend bool operator==(const PublicParams&, const PublicParams&) = default;
};

struct ProofEntry {
  Bytes block;
  merkle::MerklePath path;
  friend bool operator==(const ProofEntry&, const ProofEntry&) = default;
};

struct ProofVector {
  std::vector<ProofEntry> entries;
  std::size_t size() const { return entries.size(); }
};

struct Verdict {
  bool accepted = true;
  std::optional<std::size_t> failing_index;  // 1-based position into the proof vector

  static Verdict accept() { return {true, std::nullopt}; }
  static Verdict reject(std::size_t i) { return {false, i}; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct SetupResult {
  EncodedFile file;
  PublicParams pp;
  merkle::MerkleTree tree;
};

// Throws kEmptyFile, kInvalidParams (payload_len == 0, phi == 0 or phi > m).
SetupResult setup(ByteView file, std::size_t payload_len, const Codec& codec,
                  std::uint32_t phi = kDefaultPhi,
                  const crypto::HashFn& hash = crypto::HashFn{});

PrfKey gen_query(crypto::Rng& rng);

// q_i = (PRF(key, i) mod m) + 1 for i = 1..phi, PRF output read as an
// unsigned big-endian integer.
std::vector<std::uint32_t> derive_indices(const PrfKey& key, std::uint32_t phi, std::uint32_t m);
// q_i alone; one PRF call.
std::uint32_t derive_index(const PrfKey& key, std::uint32_t i, std::uint32_t m);

// Throws kParamMismatch when the tree does not match pp.
ProofVector prove(const merkle::MerkleTree& tree, const PrfKey& key, const PublicParams& pp);
ProofVector prove(const EncodedFile& file, const PrfKey& key, const PublicParams& pp);

// Either a PRF key (indices derived) or an explicit index list.
using Query = std::variant<PrfKey, std::vector<std::uint32_t>>;

Verdict verify(const ProofVector& pi, const Query& query, const PublicParams& pp);

// Parses the trailing be32 index of an encoded block. nullopt if too short.
std::optional<std::uint32_t> block_index(ByteView block);

// Flat file: "RCPF" || be32(m) || be32(payload_len) || blocks.
void write_encoded_file(const std::filesystem::path& path, const EncodedFile& file);
EncodedFile read_encoded_file(const std::filesystem::path& path);

}  // namespace rcpor::por
