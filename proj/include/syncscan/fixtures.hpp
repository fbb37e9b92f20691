#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace syncscan {

// Writes the deterministic golden-fixture suite (WAV files + manifest.json)
// into out_dir and returns the manifest. Regeneration from the same seed is
// byte-identical. Cases: clean-single, noisy-6db, jitter-10hz, two-messages,
// truncated-payload, four-fragments (4 files), pseudo-sync, speech-like.
nlohmann::ordered_json generate_suite(const std::string& out_dir, uint64_t seed);

// SHA-256 hex digest of a file's contents (manifest integrity field).
std::string sha256_file(const std::string& path);

} // namespace syncscan
