#include "rcpor/wire.hpp"

#include <algorithm>

#include "rcpor/error.hpp"

namespace rcpor::wire {

unsigned tree_height(std::uint32_t m) {
  std::uint64_t padded = 2;
  unsigned h = 1;
  while (padded < m) {
    padded <<= 1;
    ++h;
  }
  return h;
}

std::size_t ProofLayout::unit_payload_len() const {
  return std::max({block_len, hash_len, por::kIndexFieldLen});
}

Bytes encode_query(const crypto::SymKey& k_bar, const crypto::PrfKey& key, QueryForm form, crypto::Rng& rng) {
  if (form == QueryForm::kGarbage) return crypto::sample_unit(rng, query_unit_len());
  Bytes pt(kQueryPayloadLen, 0);
  auto k = key.view();
  switch (form) {
    case QueryForm::kValid:
      pt[0] = static_cast<std::uint8_t>(crypto::kPrfKeyLen);
      std::copy(k.begin(), k.end(), pt.begin() + 1);
      break;
    case QueryForm::kTruncated:
      pt[0] = static_cast<std::uint8_t>(crypto::kPrfKeyLen / 2);
      std::copy(k.begin(), k.begin() + crypto::kPrfKeyLen / 2, pt.begin() + 1);
      break;
    case QueryForm::kEmpty:
    case QueryForm::kGarbage:
      break;
  }
  return crypto::UnitCipher(k_bar, kQueryPayloadLen).enc(pt, rng);
}

std::optional<crypto::PrfKey> decode_query(const crypto::SymKey& k_bar, ByteView unit) {
  auto pt = crypto::UnitCipher(k_bar, kQueryPayloadLen).try_dec(unit);
  if (!pt || (*pt)[0] != crypto::kPrfKeyLen) return std::nullopt;
  return crypto::PrfKey(ByteView(*pt).subspan(1, crypto::kPrfKeyLen));
}

namespace {

Bytes padded(ByteView v, std::size_t len) {
  Bytes out(v.begin(), v.end());
  out.resize(len, 0);
  return out;
}

}  // namespace

Bytes encode_proof(const por::ProofVector& pi, const ProofLayout& layout, const crypto::SymKey& k_bar,
                   crypto::Rng& rng) {
  if (pi.size() != layout.phi)
    throw Error(ErrorCode::kInvalidParams, "proof has " + std::to_string(pi.size()) + " entries, layout expects " +
                                               std::to_string(layout.phi));
  const std::size_t upl = layout.unit_payload_len();
  crypto::UnitCipher cipher(k_bar, upl);
  Bytes out;
  out.reserve(layout.wire_len());
  for (const auto& e : pi.entries) {
    if (e.block.size() != layout.block_len || e.path.sibling_block.size() != layout.block_len ||
        e.path.sibling_digests.size() + 1 != layout.height)
      throw Error(ErrorCode::kInvalidParams, "proof entry does not fit the layout");
    append(out, cipher.enc(padded(e.block, upl), rng));
    Bytes idx;
    append_u32_be(idx, e.path.leaf_index);
    append(out, cipher.enc(padded(idx, upl), rng));
    append(out, cipher.enc(padded(e.path.sibling_block, upl), rng));
    for (const auto& d : e.path.sibling_digests) {
      if (d.size() != layout.hash_len) throw Error(ErrorCode::kInvalidParams, "digest length mismatch");
      append(out, cipher.enc(padded(d.view(), upl), rng));
    }
    for (std::uint32_t p = 0; p < layout.pad_pi; ++p) append(out, crypto::sample_unit(rng, layout.unit_len()));
  }
  return out;
}

Bytes dummy_proof(const ProofLayout& layout, crypto::Rng& rng) {
  return crypto::sample_unit(rng, layout.wire_len());
}

std::optional<por::ProofEntry> decode_entry(ByteView wire, std::size_t g, const ProofLayout& layout,
                                            const crypto::SymKey& k_bar) {
  if (wire.size() != layout.wire_len() || g == 0 || g > layout.phi) return std::nullopt;
  const std::size_t ul = layout.unit_len();
  crypto::UnitCipher cipher(k_bar, layout.unit_payload_len());
  const std::size_t base = (g - 1) * layout.entry_units() * ul;
  std::vector<Bytes> pts;
  for (std::size_t u = 0; u < layout.real_units(); ++u) {
    auto pt = cipher.try_dec(wire.subspan(base + u * ul, ul));
    if (!pt) return std::nullopt;
    pts.push_back(std::move(*pt));
  }
  por::ProofEntry e;
  e.block.assign(pts[0].begin(), pts[0].begin() + layout.block_len);
  e.path.leaf_index = read_u32_be(pts[1]);
  e.path.leaf_block = e.block;
  e.path.sibling_block.assign(pts[2].begin(), pts[2].begin() + layout.block_len);
  for (std::size_t u = 3; u < pts.size(); ++u)
    e.path.sibling_digests.push_back(crypto::Digest{Bytes(pts[u].begin(), pts[u].begin() + layout.hash_len)});
  return e;
}

por::ProofVector decode_proof(ByteView wire, const ProofLayout& layout, const crypto::SymKey& k_bar) {
  por::ProofVector pi;
  pi.entries.reserve(layout.phi);
  for (std::size_t g = 1; g <= layout.phi; ++g)
    pi.entries.push_back(decode_entry(wire, g, layout, k_bar).value_or(por::ProofEntry{}));
  return pi;
}

}  // namespace rcpor::wire
