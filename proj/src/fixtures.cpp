#include "syncscan/fixtures.hpp"

#include "syncscan/audio_io.hpp"
#include "syncscan/embed.hpp"
#include "syncscan/errors.hpp"
#include "syncscan/hexutil.hpp"
#include "syncscan/fragment.hpp"
#include "syncscan/protocol.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

namespace syncscan {

namespace {

std::array<uint8_t, 32> random_payload(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::array<uint8_t, 32> p{};
    for (auto& b : p) b = static_cast<uint8_t>(rng() & 0xFF);
    return p;
}

// Syllabic amplitude modulation over band-shaped noise; a crude but
// deterministic stand-in for the paper's (unavailable) speech material.
AudioBuffer speech_like_carrier(double duration_s, uint64_t seed) {
    AudioBuffer noise = generate_carrier_noise(duration_s, -16.0, seed);
    AudioBuffer shaped = bandpass(noise, 300.0, 3400.0);
    for (size_t i = 0; i < shaped.samples.size(); ++i) {
        const double t = static_cast<double>(i) / shaped.sample_rate_hz;
        shaped.samples[i] *= 0.55 + 0.45 * std::sin(2.0 * std::numbers::pi * 3.1 * t);
    }
    return shaped;
}

nlohmann::ordered_json embed_spec_json(const std::string& payload_hex, double at_time_s,
                                       double gain_db, double freq_offset_hz) {
    return nlohmann::ordered_json{{"payload_hex", payload_hex},
                                  {"at_time_s", at_time_s},
                                  {"gain_db", gain_db},
                                  {"freq_offset_hz", freq_offset_hz}};
}

} // namespace

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for hashing: " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    return to_hex(std::span<const uint8_t>(digest, len));
}

nlohmann::ordered_json generate_suite(const std::string& out_dir, uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const ProtocolConfig cfg;
    nlohmann::ordered_json manifest = nlohmann::ordered_json::array();

    auto write_case = [&](const std::string& name, const AudioBuffer& audio, uint64_t case_seed,
                          nlohmann::ordered_json embed_specs, nlohmann::ordered_json expected) {
        const std::string file = name + ".wav";
        write_wav(audio, (fs::path(out_dir) / file).string());
        manifest.push_back({{"file", file},
                            {"seed", case_seed},
                            {"embed_specs", std::move(embed_specs)},
                            {"expected", std::move(expected)},
                            {"sha256", sha256_file((fs::path(out_dir) / file).string())}});
    };

    // clean-single: one message with the documented example block, repeated.
    {
        EmbedSpec spec;
        const std::array<uint8_t, 8> block = {0x01, 0x00, 0x10, 0x00, 0x20, 0x05, 0x40, 0xA0};
        for (size_t i = 0; i < 4; ++i) {
            std::copy(block.begin(), block.end(), spec.payload.begin() + i * 8);
        }
        spec.at_time_s = 1.5;
        const auto result = embed_message(generate_carrier_silence(4.0), spec, cfg);
        write_case("clean-single", result.audio, seed,
                   nlohmann::ordered_json::array(
                       {embed_spec_json(to_hex(spec.payload), spec.at_time_s, spec.gain_db, 0.0)}),
                   {{"detections", 1},
                    {"messages", 1},
                    {"payload_hex", to_hex(spec.payload)},
                    {"start_time_s", spec.at_time_s}});
    }

    // noisy-6db: -6 dBFS tones over -12 dBFS noise (SNR 6 dB).
    {
        EmbedSpec spec;
        spec.payload = random_payload(seed ^ 0x6db);
        spec.at_time_s = 1.5;
        const auto result =
            embed_message(generate_carrier_noise(4.0, -12.0, seed ^ 0x6db), spec, cfg);
        write_case("noisy-6db", result.audio, seed ^ 0x6db,
                   nlohmann::ordered_json::array(
                       {embed_spec_json(to_hex(spec.payload), spec.at_time_s, spec.gain_db, 0.0)}),
                   {{"detections", 1},
                    {"messages", 1},
                    {"payload_hex", to_hex(spec.payload)},
                    {"start_time_s", spec.at_time_s}});
    }

    // jitter-10hz: every tone detuned +10 Hz, still inside the +-20 Hz window.
    {
        EmbedSpec spec;
        spec.payload = random_payload(seed ^ 0x10);
        spec.at_time_s = 1.5;
        spec.freq_offset_hz = 10.0;
        const auto result = embed_message(generate_carrier_silence(4.0), spec, cfg);
        write_case("jitter-10hz", result.audio, seed ^ 0x10,
                   nlohmann::ordered_json::array({embed_spec_json(
                       to_hex(spec.payload), spec.at_time_s, spec.gain_db, 10.0)}),
                   {{"detections", 1},
                    {"messages", 1},
                    {"payload_hex", to_hex(spec.payload)},
                    {"start_time_s", spec.at_time_s}});
    }

    // two-messages: distinct payloads, well separated.
    {
        EmbedSpec first;
        for (size_t i = 0; i < 32; ++i) first.payload[i] = static_cast<uint8_t>(i);
        first.at_time_s = 1.0;
        EmbedSpec second;
        second.payload = random_payload(seed ^ 0x22);
        second.at_time_s = 3.5;
        auto result = embed_message(generate_carrier_silence(6.0), first, cfg);
        result = embed_message(result.audio, second, cfg);
        write_case(
            "two-messages", result.audio, seed ^ 0x22,
            nlohmann::ordered_json::array(
                {embed_spec_json(to_hex(first.payload), first.at_time_s, first.gain_db, 0.0),
                 embed_spec_json(to_hex(second.payload), second.at_time_s, second.gain_db, 0.0)}),
            {{"detections", 2},
             {"messages", 2},
             {"payload_hex",
              nlohmann::ordered_json::array({to_hex(first.payload), to_hex(second.payload)})},
             {"start_time_s", nlohmann::ordered_json::array({1.0, 3.5})}});
    }

    // truncated-payload: the sync frame fits, the payload does not.
    {
        EmbedSpec spec;
        spec.payload = random_payload(seed ^ 0x7c);
        spec.at_time_s = 1.3;
        auto result = embed_message(generate_carrier_silence(6.0), spec, cfg);
        result.audio.samples.resize(
            static_cast<size_t>(std::llround(1.8 * result.audio.sample_rate_hz)));
        write_case("truncated-payload", result.audio, seed ^ 0x7c,
                   nlohmann::ordered_json::array(
                       {embed_spec_json(to_hex(spec.payload), spec.at_time_s, spec.gain_db, 0.0)}),
                   {{"detections", 1}, {"messages", 0}, {"payload_hex", nullptr}});
    }

    // four-fragments: one 32-byte message split across four noise carriers.
    {
        const std::array<uint8_t, 32> payload = random_payload(seed ^ 0x4f);
        const auto frags = fragment_message(payload);
        nlohmann::ordered_json expected_frags = nlohmann::ordered_json::array();
        for (int i = 0; i < 4; ++i) {
            const auto carrier = generate_carrier_noise(3.0, -20.0, seed ^ (0x4f0 + i));
            const auto result =
                embed_fragment(carrier, frags[static_cast<size_t>(i)], 1.0, cfg);
            const std::string file = "four-fragments-" + std::to_string(i) + ".wav";
            write_wav(result.audio, (fs::path(out_dir) / file).string());
            expected_frags.push_back(
                {{"file", file},
                 {"seq_index", i},
                 {"total", 4},
                 {"block_hex", to_hex(frags[static_cast<size_t>(i)].block_bytes)}});
            manifest.push_back(
                {{"file", file},
                 {"seed", seed ^ (0x4f0 + i)},
                 {"embed_specs",
                  nlohmann::ordered_json::array(
                      {{{"fragment_seq", i},
                        {"fragment_total", 4},
                        {"block_hex", to_hex(frags[static_cast<size_t>(i)].block_bytes)},
                        {"at_time_s", 1.0},
                        {"gain_db", -6.0}}})},
                 {"expected",
                  {{"fragments", 1}, {"reassembled_payload_hex", to_hex(payload)}}},
                 {"sha256",
                  sha256_file((fs::path(out_dir) / file).string())}});
        }
    }

    // pseudo-sync: stable FF-band runs whose terminator is ~56 Hz off; the
    // detector must stay silent. Byte 0x86 maps to ~2101 Hz.
    {
        std::vector<uint8_t> group(ProtocolConfig::sync_pattern.begin(),
                                   ProtocolConfig::sync_pattern.end() - 1);
        group.push_back(0x86);
        AudioBuffer audio = generate_carrier_silence(8.0);
        for (double t : {1.0, 3.0, 5.5}) {
            audio = embed_symbols(audio, group, t, cfg).audio;
        }
        write_case("pseudo-sync", audio, seed,
                   nlohmann::ordered_json::array(),
                   {{"detections", 0}, {"messages", 0}});
    }

    // speech-like: formant-band shaped noise with syllabic modulation.
    {
        write_case("speech-like", speech_like_carrier(8.0, seed ^ 0x5e), seed ^ 0x5e,
                   nlohmann::ordered_json::array(),
                   {{"detections", 0}, {"messages", 0}});
    }

    std::ofstream mf(fs::path(out_dir) / "manifest.json", std::ios::trunc);
    if (!mf) throw IoError("cannot write manifest in " + out_dir);
    mf << manifest.dump(2) << '\n';
    return manifest;
}

} // namespace syncscan
