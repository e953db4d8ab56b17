#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rcpor/bytes.hpp"
#include "rcpor/crypto.hpp"
#include "rcpor/por.hpp"

// Encrypt-then-pad encoding of queries and proof vectors as they appear on
// the ledger.
namespace rcpor::wire {

// Real units per proof entry: the challenged block, the path's leaf index,
// the sibling block and height-1 sibling digests.
inline constexpr std::uint32_t entry_real_units(unsigned height) { return height + 2; }

// Height of the tree over m leaves (padded to max(2, 2^k)).
unsigned tree_height(std::uint32_t m);

struct ProofLayout {
  std::uint32_t phi = 0;
  unsigned height = 1;
  std::uint32_t pad_pi = 0;
  std::size_t block_len = 0;  // payload + index field
  std::size_t hash_len = crypto::kDefaultHashLen;

  std::size_t real_units() const { return entry_real_units(height); }
  std::size_t entry_units() const { return real_units() + pad_pi; }
  std::size_t total_units() const { return static_cast<std::size_t>(phi) * entry_units(); }
  // Plaintext bytes per unit: wide enough for a block, a digest or an index.
  std::size_t unit_payload_len() const;
  std::size_t unit_len() const { return crypto::unit_length(unit_payload_len()); }
  std::size_t wire_len() const { return total_units() * unit_len(); }
};

// Query plaintext: one declared-length byte followed by a key slot of
// kPrfKeyLen bytes, so every query ciphertext has the same size.
inline constexpr std::size_t kQueryPayloadLen = 1 + crypto::kPrfKeyLen;
inline constexpr std::size_t query_unit_len() { return crypto::unit_length(kQueryPayloadLen); }

enum class QueryForm {
  kValid,
  kTruncated,  // declared length below psi/8
  kEmpty,      // declared length 0
  kGarbage,    // random bytes that do not decrypt
};

// Encrypts `key` (or a malformed variant of it) under k_bar.
Bytes encode_query(const crypto::SymKey& k_bar, const crypto::PrfKey& key, QueryForm form,
                   crypto::Rng& rng);

// Decrypts a posted query and applies the key-universe checks: decryptable,
// non-empty, exactly psi bits. nullopt means the query is rejected.
std::optional<crypto::PrfKey> decode_query(const crypto::SymKey& k_bar, ByteView unit);

// Encrypts each element and appends pad_pi sampled units after every entry.
Bytes encode_proof(const por::ProofVector& pi, const ProofLayout& layout,
                   const crypto::SymKey& k_bar, crypto::Rng& rng);

// A proof-shaped vector of sampled units.
Bytes dummy_proof(const ProofLayout& layout, crypto::Rng& rng);

// Strips the pads of entry g (1-based) and decrypts it. nullopt when the wire
// is the wrong size or any real unit fails to decrypt or parse.
std::optional<por::ProofEntry> decode_entry(ByteView wire, std::size_t g, const ProofLayout& layout,
                                            const crypto::SymKey& k_bar);

// Decodes every entry; undecodable ones come back as empty entries, which
// the PoR verifier rejects in its index pass.
por::ProofVector decode_proof(ByteView wire, const ProofLayout& layout, const crypto::SymKey& k_bar);

}  // namespace rcpor::wire
