#pragma once

// Content hashes embedded in every output file.

#include <cstdint>
#include <cstdio>
#include <string>

#include <openssl/evp.h>

#include "momc/config.hpp"
#include "momc/errors.hpp"
#include "momc/models.hpp"

namespace momc {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Object keys are sorted by the JSON library, so dump() is canonical.
inline std::string canonical_json(const Json& j) { return j.dump(); }

/// Hash of the configuration, ignoring settings that cannot change results.
inline std::string config_hash(Json tree) {
  if (tree.is_object()) {
    tree.erase("output");
    tree.erase("workers");
  }
  return hex64(fnv1a64(canonical_json(tree)));
}

inline std::string sha1_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw Error("SHA-1 digest failed");
  }
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

/// Same digest as `git hash-object` of the given content.
inline std::string git_blob_hash(const std::string& content) {
  std::string data = "blob " + std::to_string(content.size());
  data.push_back('\0');
  data += content;
  return sha1_hex(data);
}

inline Json model_to_json(const ModelSpec& m) {
  Json j;
  j["kind"] = to_string(m.kind);
  j["profile"] = m.profile;
  switch (m.kind) {
    case ModelKind::burgers: break;
    case ModelKind::jinxin:
      j["jx_a"] = m.jx_a;
      j["jx_epsilon"] = m.jx_epsilon;
      break;
    case ModelKind::swe:
      j["froude"] = m.froude_number();
      j["wave_amplitude"] = m.wave_amplitude;
      j["wave_velocity"] = m.wave_velocity;
      j["scales"] = {{"length", m.swe_scales.length}, {"time", m.swe_scales.time},
                     {"depth", m.swe_scales.depth}};
      break;
    case ModelKind::bloodflow:
    case ModelKind::bloodflow_elastic:
      j["test"] = m.bf_test;
      j["rho"] = m.rho;
      j["h0"] = m.h0;
      j["eta"] = m.eta;
      j["area_amplitude"] = m.area_amplitude;
      if (m.tau_override) j["tau"] = *m.tau_override;
      if (m.equilibrium_pressure) j["pressure"] = "equilibrium";
      j["scales"] = {{"length", m.bf_scales.length}, {"time", m.bf_scales.time},
                     {"density", m.bf_scales.density}, {"area", m.bf_scales.area},
                     {"viscosity", m.bf_scales.viscosity}};
      break;
  }
  return j;
}

inline std::string model_hash(const ModelSpec& m) { return git_blob_hash(canonical_json(model_to_json(m)) + "\n"); }

}  // namespace momc
