#include "rcpor/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>
#include <memory>

#include "rcpor/error.hpp"

namespace rcpor::crypto {

namespace {

thread_local std::uint64_t g_hash_calls = 0;

const EVP_MD* sha256_md() {
  static const EVP_MD* md = EVP_sha256();
  return md;
}

struct CtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

EVP_MD_CTX* md_ctx() {
  thread_local std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx(EVP_MD_CTX_new());
  return ctx.get();
}

// Uncounted SHA-256; the rng uses this so instrumentation only sees protocol
// hashing.
void sha256_raw(std::initializer_list<ByteView> parts, std::uint8_t out[32]) {
  EVP_MD_CTX* ctx = md_ctx();
  if (EVP_DigestInit_ex(ctx, sha256_md(), nullptr) != 1) throw std::runtime_error("sha256 init");
  for (auto p : parts) EVP_DigestUpdate(ctx, p.data(), p.size());
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx, out, &len);
}

}  // namespace

HashFn::HashFn(std::size_t out_len) : out_len_(out_len) {
  if (out_len == 0 || out_len > 32) throw Error(ErrorCode::kInvalidParams, "hash length must be 1..32");
}

Digest HashFn::operator()(std::initializer_list<ByteView> parts) const {
  std::uint8_t full[32];
  sha256_raw(parts, full);
  ++g_hash_calls;
  return Digest{Bytes(full, full + out_len_)};
}

void HashFn::hash_pair(ByteView left, ByteView right, std::uint8_t* out) const {
  std::uint8_t full[32];
  sha256_raw({left, right}, full);
  ++g_hash_calls;
  std::memcpy(out, full, out_len_);
}

std::uint64_t hash_invocations() { return g_hash_calls; }
void reset_hash_invocations() { g_hash_calls = 0; }

Bytes sha256(ByteView data) {
  Bytes out(32);
  sha256_raw({data}, out.data());
  return out;
}

Rng::Rng(std::uint64_t seed) {
  Bytes s;
  append(s, as_view(std::string("rcpor-rng")));
  append_u64_be(s, seed);
  sha256_raw({s}, seed_.data());
}

Rng Rng::from_entropy() {
  Rng r;
  if (RAND_bytes(r.seed_.data(), static_cast<int>(r.seed_.size())) != 1)
    throw std::runtime_error("RAND_bytes failed");
  return r;
}

void Rng::refill() {
  Bytes ctr;
  append_u64_be(ctr, counter_++);
  sha256_raw({seed_, ctr}, buffer_.data());
  pos_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (pos_ == buffer_.size()) refill();
    b = buffer_[pos_++];
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Rng::next_u64() {
  std::uint8_t b[8];
  fill(b);
  return read_u64_be(b);
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidParams, "uniform bound 0");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

Rng Rng::fork() {
  Rng child;
  std::uint8_t material[32];
  fill(material);
  sha256_raw({as_view(std::string("rcpor-fork")), ByteView(material, 32)}, child.seed_.data());
  return child;
}

PrfKey::PrfKey(ByteView key) : bytes_(key.begin(), key.end()) {
  if (bytes_.size() != kPrfKeyLen)
    throw Error(ErrorCode::kBadKeyLength, "PRF key must be " + std::to_string(kPrfKeyLen) + " bytes");
}

PrfKey PrfKey::random(Rng& rng) { return PrfKey(rng.bytes(kPrfKeyLen)); }

Bytes prf(const PrfKey& key, std::uint64_t counter) {
  std::uint8_t ctr[8];
  for (int i = 0; i < 8; ++i) ctr[i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
  return HashFn(kPrfOutputLen)({key.view(), ByteView(ctr, 8)}).bytes;
}

Commitment commit(ByteView statement, ByteView randomness, const HashFn& hash) {
  if (randomness.size() != kCommitRandLen)
    throw Error(ErrorCode::kBadRandomnessLength,
                "commitment randomness must be " + std::to_string(kCommitRandLen) + " bytes");
  return Commitment{hash({statement, randomness})};
}

bool commit_verify(const Commitment& c, const Opening& o, const HashFn& hash) {
  if (o.randomness.size() != kCommitRandLen) return false;
  return hash({o.statement, o.randomness}) == c.digest;
}

SymKey::SymKey(ByteView key) : bytes_(key.begin(), key.end()) {
  if (bytes_.size() != kSymKeyLen)
    throw Error(ErrorCode::kBadKeyLength, "symmetric key must be " + std::to_string(kSymKeyLen) + " bytes");
}

SymKey SymKey::random(Rng& rng) { return SymKey(rng.bytes(kSymKeyLen)); }

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

}  // namespace

UnitCipher::UnitCipher(SymKey key, std::size_t payload_len)
    : key_(std::move(key)), payload_len_(payload_len) {}

Bytes UnitCipher::enc(ByteView plaintext, Rng& rng) const {
  if (plaintext.size() != payload_len_)
    throw Error(ErrorCode::kInvalidParams, "plaintext is " + std::to_string(plaintext.size()) +
                                               " bytes, unit payload is " + std::to_string(payload_len_));
  Bytes out(unit_len());
  rng.fill(std::span<std::uint8_t>(out.data(), kNonceLen));
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  bool ok = ctx && EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceLen, nullptr) == 1 &&
            EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key_.view().data(), out.data()) == 1 &&
            EVP_EncryptUpdate(ctx.get(), out.data() + kNonceLen, &len, plaintext.data(),
                              static_cast<int>(plaintext.size())) == 1 &&
            EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceLen + len, &len) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen,
                                out.data() + kNonceLen + payload_len_) == 1;
  if (!ok) throw std::runtime_error("AES-GCM encryption failed");
  return out;
}

std::optional<Bytes> UnitCipher::try_dec(ByteView unit) const {
  if (unit.size() != unit_len()) return std::nullopt;
  Bytes out(payload_len_);
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes tag(unit.begin() + kNonceLen + payload_len_, unit.end());
  int len = 0;
  bool ok = ctx && EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceLen, nullptr) == 1 &&
            EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key_.view().data(), unit.data()) == 1 &&
            EVP_DecryptUpdate(ctx.get(), out.data(), &len, unit.data() + kNonceLen,
                              static_cast<int>(payload_len_)) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen, tag.data()) == 1 &&
            EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &len) == 1;
  if (!ok) return std::nullopt;
  return out;
}

Bytes UnitCipher::dec(ByteView unit) const {
  auto out = try_dec(unit);
  if (!out) throw Error(ErrorCode::kDecryptFailure, "unit does not decrypt under this key");
  return std::move(*out);
}

Bytes sample_unit(Rng& rng, std::size_t unit_len) { return rng.bytes(unit_len); }

}  // namespace rcpor::crypto
