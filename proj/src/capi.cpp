#include "rcpor/rcpor.h"

#include <cstring>
#include <string>

#include "rcpor/error.hpp"
#include "rcpor/merkle.hpp"
#include "rcpor/por.hpp"
#include "rcpor/scenario.hpp"

struct rcpor_merkle {
  rcpor::merkle::MerkleTree tree;
};

struct rcpor_report {
  std::string json;
  std::string trace;
  bool valid = false;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_problems;

template <typename F>
rcpor_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return RCPOR_OK;
  } catch (const rcpor::Error& e) {
    g_last_error = e.what();
    return static_cast<rcpor_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RCPOR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return RCPOR_ERR_INTERNAL;
  }
}

rcpor_status null_arg(const char* name) {
  g_last_error = std::string("null argument: ") + name;
  return RCPOR_ERR_NULL_ARGUMENT;
}

}  // namespace

extern "C" {

const char* rcpor_status_str(rcpor_status status) {
  switch (status) {
    case RCPOR_OK: return "OK";
    case RCPOR_ERR_NULL_ARGUMENT: return "NullArgument";
    case RCPOR_ERR_INTERNAL: return "Internal";
    default: break;
  }
  if (status >= RCPOR_ERR_EMPTY_INPUT && status <= RCPOR_ERR_IO)
    return rcpor::error_code_name(static_cast<rcpor::ErrorCode>(static_cast<int>(status)));
  return "Unknown";
}

const char* rcpor_last_error(void) { return g_last_error.c_str(); }

const char* rcpor_version(void) { return "0.1.0"; }

rcpor_status rcpor_merkle_build(const uint8_t* blocks, size_t block_count, size_t block_len, size_t hash_len,
                                rcpor_merkle** out) {
  if (!out) return null_arg("out");
  if (!blocks && block_count) return null_arg("blocks");
  return guarded([&] {
    if (block_count == 0 || block_len == 0) throw rcpor::Error(rcpor::ErrorCode::kEmptyInput, "no blocks");
    rcpor::BlockStore store(block_len);
    store.reserve(block_count);
    for (size_t i = 0; i < block_count; ++i) store.push_back(rcpor::ByteView(blocks + i * block_len, block_len));
    auto tree = rcpor::merkle::gen_tree(std::move(store), rcpor::crypto::HashFn(hash_len));
    *out = new rcpor_merkle{std::move(tree)};
  });
}

void rcpor_merkle_free(rcpor_merkle* tree) { delete tree; }

size_t rcpor_merkle_height(const rcpor_merkle* tree) { return tree ? tree->tree.height() : 0; }

rcpor_status rcpor_merkle_root(const rcpor_merkle* tree, uint8_t* out, size_t out_len) {
  if (!tree) return null_arg("tree");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto root = tree->tree.root();
    if (out_len < root.size()) throw rcpor::Error(rcpor::ErrorCode::kInvalidParams, "output buffer too small");
    std::memcpy(out, root.bytes.data(), root.size());
  });
}

rcpor_status rcpor_merkle_prove(const rcpor_merkle* tree, uint32_t index, uint8_t* out, size_t* out_len) {
  if (!tree) return null_arg("tree");
  if (!out_len) return null_arg("out_len");
  return guarded([&] {
    auto wire = rcpor::merkle::serialize(rcpor::merkle::prove(tree->tree, index));
    if (out) {
      if (*out_len < wire.size()) throw rcpor::Error(rcpor::ErrorCode::kInvalidParams, "output buffer too small");
      std::memcpy(out, wire.data(), wire.size());
    }
    *out_len = wire.size();
  });
}

rcpor_status rcpor_merkle_verify(const uint8_t* path, size_t path_len, size_t block_len, const uint8_t* root,
                                 size_t hash_len, int* valid) {
  if (!path) return null_arg("path");
  if (!root) return null_arg("root");
  if (!valid) return null_arg("valid");
  return guarded([&] {
    *valid = 0;
    rcpor::merkle::MerklePath p;
    try {
      p = rcpor::merkle::parse_path(rcpor::ByteView(path, path_len), block_len, hash_len);
    } catch (const rcpor::Error&) {
      return;
    }
    rcpor::crypto::Digest r{rcpor::Bytes(root, root + hash_len)};
    *valid = rcpor::merkle::verify(p, r) ? 1 : 0;
  });
}

rcpor_status rcpor_derive_indices(const uint8_t* key, size_t key_len, uint32_t phi, uint32_t m, uint32_t* out) {
  if (!key) return null_arg("key");
  if (!out && phi) return null_arg("out");
  return guarded([&] {
    auto q = rcpor::por::derive_indices(rcpor::crypto::PrfKey(rcpor::ByteView(key, key_len)), phi, m);
    std::memcpy(out, q.data(), q.size() * sizeof(uint32_t));
  });
}

rcpor_status rcpor_scenario_run(const char* spec_json, const rcpor_run_options* options, rcpor_report** out) {
  if (!spec_json) return null_arg("spec_json");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto spec = rcpor::scenario::ScenarioSpec::parse(spec_json);
    if (options) {
      if (options->has_seed) spec.seed = options->seed;
      if (options->variant) {
        try {
          spec.variant = rcpor::ledger::parse_variant(options->variant);
        } catch (const rcpor::Error& e) {
          throw rcpor::Error(rcpor::ErrorCode::kSpecInvalid, e.what());
        }
      }
    }
    auto result = rcpor::scenario::run(spec);
    *out = new rcpor_report{std::move(result.report), std::move(result.trace_jsonl), result.valid};
  });
}

void rcpor_report_free(rcpor_report* report) { delete report; }

const char* rcpor_report_json(const rcpor_report* report) { return report ? report->json.c_str() : ""; }

const char* rcpor_report_trace(const rcpor_report* report) { return report ? report->trace.c_str() : ""; }

int rcpor_report_valid(const rcpor_report* report) { return report && report->valid ? 1 : 0; }

rcpor_status rcpor_report_verify(const char* report_json, int* valid, const char** problems) {
  if (!report_json) return null_arg("report_json");
  if (!valid) return null_arg("valid");
  return guarded([&] {
    auto r = rcpor::scenario::verify_report(report_json);
    g_problems.clear();
    for (const auto& p : r.problems) g_problems += p + "\n";
    *valid = r.valid ? 1 : 0;
    if (problems) *problems = g_problems.c_str();
  });
}

}  // extern "C"
