#include "rcpor/por.hpp"

#include <fstream>

#include "rcpor/error.hpp"

namespace rcpor::por {

SetupResult setup(ByteView file, std::size_t payload_len, const Codec& codec, std::uint32_t phi,
                  const crypto::HashFn& hash) {
  if (file.empty()) throw Error(ErrorCode::kEmptyFile, "file is empty");
  if (payload_len == 0) throw Error(ErrorCode::kInvalidParams, "block payload length 0");
  Bytes encoded = codec.encode(file, payload_len);
  const std::size_t m = encoded.size() / payload_len;
  if (m > UINT32_MAX) throw Error(ErrorCode::kInvalidParams, "too many blocks");
  if (phi == 0 || phi > m)
    throw Error(ErrorCode::kInvalidParams,
                "phi=" + std::to_string(phi) + " must be in [1, m=" + std::to_string(m) + "]");

  EncodedFile u{BlockStore(payload_len + kIndexFieldLen), payload_len};
  u.blocks.reserve(m);
  Bytes block;
  for (std::size_t i = 0; i < m; ++i) {
    block.assign(encoded.begin() + i * payload_len, encoded.begin() + (i + 1) * payload_len);
    append_u32_be(block, static_cast<std::uint32_t>(i + 1));
    u.blocks.push_back(block);
  }
  auto tree = merkle::gen_tree(u.blocks, hash);
  PublicParams pp{tree.root(), phi, static_cast<std::uint32_t>(m), PrfDescription{}};
  return SetupResult{std::move(u), std::move(pp), std::move(tree)};
}

PrfKey gen_query(crypto::Rng& rng) { return PrfKey::random(rng); }

std::uint32_t derive_index(const PrfKey& key, std::uint32_t i, std::uint32_t m) {
  if (m == 0) throw Error(ErrorCode::kInvalidParams, "m = 0");
  Bytes w = crypto::prf(key, i);
  std::uint64_t r = 0;
  for (auto b : w) r = (r * 256 + b) % m;
  return static_cast<std::uint32_t>(r + 1);
}

std::vector<std::uint32_t> derive_indices(const PrfKey& key, std::uint32_t phi, std::uint32_t m) {
  std::vector<std::uint32_t> out;
  out.reserve(phi);
  for (std::uint32_t i = 1; i <= phi; ++i) out.push_back(derive_index(key, i, m));
  return out;
}

ProofVector prove(const merkle::MerkleTree& tree, const PrfKey& key, const PublicParams& pp) {
  if (tree.leaf_count() != pp.m || !(tree.root() == pp.sigma))
    throw Error(ErrorCode::kParamMismatch, "tree does not match public parameters");
  ProofVector pi;
  pi.entries.reserve(pp.phi);
  for (auto q : derive_indices(key, pp.phi, pp.m)) {
    auto b = tree.leaves().block(q - 1);
    pi.entries.push_back(ProofEntry{Bytes(b.begin(), b.end()), merkle::prove(tree, q)});
  }
  return pi;
}

ProofVector prove(const EncodedFile& file, const PrfKey& key, const PublicParams& pp) {
  if (file.m() != pp.m) throw Error(ErrorCode::kParamMismatch, "block count does not match m");
  return prove(merkle::gen_tree(file.blocks, crypto::HashFn(pp.sigma.size())), key, pp);
}

std::optional<std::uint32_t> block_index(ByteView block) {
  if (block.size() < kIndexFieldLen) return std::nullopt;
  return read_u32_be(block.subspan(block.size() - kIndexFieldLen));
}

Verdict verify(const ProofVector& pi, const Query& query, const PublicParams& pp) {
  std::vector<std::uint32_t> q;
  if (const auto* key = std::get_if<PrfKey>(&query))
    q = derive_indices(*key, pp.phi, pp.m);
  else
    q = std::get<std::vector<std::uint32_t>>(query);
  const std::size_t phi = q.size();

  for (std::size_t i = 0; i < phi; ++i) {
    if (i >= pi.size()) return Verdict::reject(i + 1);
    const auto& e = pi.entries[i];
    auto idx = block_index(e.block);
    if (!idx || *idx != q[i] || e.path.leaf_index != q[i] || e.path.leaf_block != e.block)
      return Verdict::reject(i + 1);
  }
  if (pi.size() > phi) return Verdict::reject(phi + 1);

  if (pp.sigma.size() == 0 || pp.sigma.size() > 32) return phi ? Verdict::reject(1) : Verdict::accept();
  crypto::HashFn hash(pp.sigma.size());
  for (std::size_t i = 0; i < phi; ++i)
    if (!merkle::verify(pi.entries[i].path, pp.sigma, hash)) return Verdict::reject(i + 1);
  return Verdict::accept();
}

void write_encoded_file(const std::filesystem::path& path, const EncodedFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Bytes header;
  append(header, as_view(std::string("RCPF")));
  append_u32_be(header, static_cast<std::uint32_t>(file.m()));
  append_u32_be(header, static_cast<std::uint32_t>(file.payload_len));
  out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  const auto& raw = file.blocks.raw();
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

EncodedFile read_encoded_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::string(data.begin(), data.begin() + 4) != "RCPF")
    throw Error(ErrorCode::kIo, "not an encoded file: " + path.string());
  const std::uint32_t m = read_u32_be(ByteView(data).subspan(4));
  const std::uint32_t payload = read_u32_be(ByteView(data).subspan(8));
  const std::size_t block_len = payload + kIndexFieldLen;
  if (payload == 0 || data.size() - 12 != static_cast<std::size_t>(m) * block_len)
    throw Error(ErrorCode::kIo, "truncated encoded file: " + path.string());
  EncodedFile f{BlockStore(block_len), payload};
  f.blocks.reserve(m);
  for (std::uint32_t i = 0; i < m; ++i) f.blocks.push_back(ByteView(data).subspan(12 + i * block_len, block_len));
  return f;
}

}  // namespace rcpor::por
