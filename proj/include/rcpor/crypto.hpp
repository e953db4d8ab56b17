#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>

#include "rcpor/bytes.hpp"

namespace rcpor::crypto {

inline constexpr std::size_t kDefaultHashLen = 16;   // 128-bit truncated output
inline constexpr std::size_t kPrfKeyLen = 16;        // psi = 128
inline constexpr std::size_t kPrfOutputLen = 16;     // iota = 128
inline constexpr std::size_t kPrfCounterLen = 8;     // eta = 64
inline constexpr std::size_t kCommitRandLen = 16;    // lambda = 128
inline constexpr std::size_t kSymKeyLen = 16;
inline constexpr std::size_t kNonceLen = 12;
inline constexpr std::size_t kTagLen = 16;

// Fixed-length hash value. Length is whatever the producing HashFn emits.
struct Digest {
  Bytes bytes;

  std::size_t size() const { return bytes.size(); }
  std::string hex() const { return to_hex(bytes); }
  ByteView view() const { return bytes; }

  friend bool operator==(const Digest&, const Digest&) = default;
};

// SHA-256 truncated to out_len bytes (1..32). Every call bumps a
// thread-local invocation counter, which the cost accounting reads.
class HashFn {
 public:
  explicit HashFn(std::size_t out_len = kDefaultHashLen);

  std::size_t out_len() const { return out_len_; }

  Digest operator()(std::initializer_list<ByteView> parts) const;
  Digest operator()(ByteView data) const { return (*this)({data}); }
  // Writes out_len bytes to out.
  void hash_pair(ByteView left, ByteView right, std::uint8_t* out) const;

 private:
  std::size_t out_len_;
};

std::uint64_t hash_invocations();
void reset_hash_invocations();

// Full SHA-256 for bookkeeping (trace digests); not counted.
Bytes sha256(ByteView data);

// Deterministic byte stream: SHA-256(seed || counter) blocks. Reproducible
// for a given seed; from_entropy() seeds from the OS.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng from_entropy();

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  std::uint64_t next_u64();
  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound);
  // Derive an independent child stream (used to give roles their own rng).
  Rng fork();

 private:
  Rng() = default;
  void refill();

  std::array<std::uint8_t, 32> seed_{};
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> buffer_{};
  std::size_t pos_ = 32;
};

class PrfKey {
 public:
  // Throws kBadKeyLength unless key.size() == kPrfKeyLen.
  explicit PrfKey(ByteView key);
  static PrfKey random(Rng& rng);

  ByteView view() const { return bytes_; }
  const Bytes& bytes() const { return bytes_; }

  friend bool operator==(const PrfKey&, const PrfKey&) = default;

 private:
  Bytes bytes_;
};

// W(key, counter) = SHA-256(key || be64(counter)) truncated to iota bits.
Bytes prf(const PrfKey& key, std::uint64_t counter);

struct Commitment {
  Digest digest;
  friend bool operator==(const Commitment&, const Commitment&) = default;
};

struct Opening {
  Bytes statement;
  Bytes randomness;
  friend bool operator==(const Opening&, const Opening&) = default;
};

// H(statement || randomness). Throws kBadRandomnessLength.
Commitment commit(ByteView statement, ByteView randomness,
                  const HashFn& hash = HashFn{});
bool commit_verify(const Commitment& c, const Opening& o,
                   const HashFn& hash = HashFn{});

class SymKey {
 public:
  SymKey() : bytes_(kSymKeyLen, 0) {}
  explicit SymKey(ByteView key);  // throws kBadKeyLength
  static SymKey random(Rng& rng);

  ByteView view() const { return bytes_; }
  friend bool operator==(const SymKey&, const SymKey&) = default;

 private:
  Bytes bytes_;
};

inline constexpr std::size_t unit_length(std::size_t payload_len) {
  return kNonceLen + payload_len + kTagLen;
}

// AES-128-GCM over fixed-size payloads. Wire form: nonce || ciphertext || tag.
// All units produced by one UnitCipher share unit_len(), which is also the
// space sample() draws from.
class UnitCipher {
 public:
  UnitCipher(SymKey key, std::size_t payload_len);

  std::size_t payload_len() const { return payload_len_; }
  std::size_t unit_len() const { return unit_length(payload_len_); }

  // Throws kInvalidParams if plaintext.size() != payload_len().
  Bytes enc(ByteView plaintext, Rng& rng) const;
  // Throws kDecryptFailure on wrong key, wrong length or any tampering.
  Bytes dec(ByteView unit) const;
  std::optional<Bytes> try_dec(ByteView unit) const;

 private:
  SymKey key_;
  std::size_t payload_len_;
};

// Uniformly random bytes of a ciphertext unit's length.
Bytes sample_unit(Rng& rng, std::size_t unit_len);

}  // namespace rcpor::crypto
