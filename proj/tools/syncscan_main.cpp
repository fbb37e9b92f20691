// Command-line front end for the sync-steganography toolkit.
//
// Exit codes: 0 success with findings, 3 success with no findings,
// 2 usage error, 1 runtime error, 4 incomplete reassembly.

#include "syncscan/analysis.hpp"
#include "syncscan/audio_io.hpp"
#include "syncscan/embed.hpp"
#include "syncscan/errors.hpp"
#include "syncscan/fixtures.hpp"
#include "syncscan/fragment.hpp"
#include "syncscan/hexutil.hpp"
#include "syncscan/payload_decode.hpp"
#include "syncscan/protocol.hpp"
#include "syncscan/spectral.hpp"
#include "syncscan/sync_detect.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;
using namespace syncscan;

constexpr int kExitFindings = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNoFindings = 3;
constexpr int kExitIncomplete = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string protocol_file;
    double window_ms = 25.0;
    double hop_ms = 10.0;
    double epsilon_hz = 20.0;
    bool text_output = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--protocol", opts.protocol_file, "Protocol config JSON file");
    cmd->add_option("--window-ms", opts.window_ms, "Analysis window length (ms)");
    cmd->add_option("--hop-ms", opts.hop_ms, "Analysis hop (ms)");
    cmd->add_option("--epsilon-hz", opts.epsilon_hz, "Frequency tolerance (Hz)");
    cmd->add_flag("--text", opts.text_output, "Human-readable output instead of JSON");
    cmd->add_flag("--json", [](std::int64_t) {}, "JSON output (default)");
}

ProtocolConfig make_protocol(const CommonOpts& opts) {
    ProtocolConfig cfg;
    if (!opts.protocol_file.empty()) cfg = load_protocol(opts.protocol_file);
    cfg.tolerance_hz = opts.epsilon_hz;
    return cfg;
}

WindowConfig make_window(const CommonOpts& opts) {
    WindowConfig w;
    w.window_ms = opts.window_ms;
    w.hop_ms = opts.hop_ms;
    return w;
}

std::array<uint8_t, 32> parse_payload_hex(const std::string& hex) {
    std::vector<uint8_t> bytes;
    try {
        bytes = from_hex(hex);
    } catch (const Error& e) {
        throw UsageError(std::string("--payload: ") + e.what());
    }
    if (bytes.size() != 32) {
        throw UsageError("--payload must be exactly 32 bytes (64 hex digits), got " +
                         std::to_string(bytes.size()));
    }
    std::array<uint8_t, 32> out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

std::pair<double, double> parse_range(const std::string& s, const char* flag) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        throw UsageError(std::string(flag) + " expects t0:t1 in seconds");
    }
    try {
        const double a = std::stod(s.substr(0, colon));
        const double b = std::stod(s.substr(colon + 1));
        return {a, b};
    } catch (const std::exception&) {
        throw UsageError(std::string(flag) + " expects t0:t1 in seconds");
    }
}

AudioBuffer make_generated_carrier(const std::string& kind, double duration_s, double level_db,
                                   uint64_t seed, const std::vector<double>& tones) {
    if (kind == "silence") return generate_carrier_silence(duration_s);
    if (kind == "noise") return generate_carrier_noise(duration_s, level_db, seed);
    if (kind == "tones") {
        if (tones.empty()) throw UsageError("--generate tones requires --tones f1,f2,...");
        return generate_carrier_tones(duration_s, tones);
    }
    throw UsageError("unknown carrier kind '" + kind + "' (silence|noise|tones)");
}

int cmd_detect(const std::string& input, const CommonOpts& opts) {
    const ProtocolConfig cfg = make_protocol(opts);
    const AudioBuffer audio = load_wav(input);
    const DominantTrack track = dominant_track(audio, make_window(opts));
    const auto events = scan(track, audio, cfg);
    if (opts.text_output) {
        for (const auto& ev : events) {
            std::printf("sync frame at %.4f s (confidence %.3f)\n", ev.start_time_s,
                        ev.confidence);
        }
        if (events.empty()) std::printf("no sync frames detected\n");
    } else {
        std::cout << sync_events_to_json(events).dump(2) << '\n';
    }
    return events.empty() ? kExitNoFindings : kExitFindings;
}

int cmd_decode(const std::string& input, const CommonOpts& opts) {
    const ProtocolConfig cfg = make_protocol(opts);
    const AudioBuffer audio = load_wav(input);
    const DominantTrack track = dominant_track(audio, make_window(opts));
    const auto events = scan(track, audio, cfg);

    std::vector<StegoMessage> messages;
    for (const auto& ev : events) {
        try {
            messages.push_back(decode_at(audio, ev, cfg));
        } catch (const Error& e) {
            std::cerr << "decode at " << ev.start_time_s << " s failed: " << e.what() << '\n';
        }
    }
    if (opts.text_output) {
        for (const auto& m : messages) {
            std::printf("message at %.4f s payload %s\n", m.sync.start_time_s,
                        to_hex(m.raw_payload).c_str());
        }
        if (messages.empty()) std::printf("no messages decoded\n");
    } else {
        ordered_json arr = ordered_json::array();
        for (const auto& m : messages) arr.push_back(message_to_json(m));
        std::cout << arr.dump(2) << '\n';
    }
    return messages.empty() ? kExitNoFindings : kExitFindings;
}

std::array<uint8_t, 32> payload_from_blocks_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open blocks file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("invalid blocks JSON: " + std::string(e.what()));
    }
    if (!j.is_array() || j.size() != 4) throw UsageError("--blocks file must hold 4 blocks");
    std::array<uint8_t, 32> payload{};
    for (size_t i = 0; i < 4; ++i) {
        GuidanceBlock b;
        b.target_id = j[i].value("target_id", 0);
        b.coord_x = j[i].value("coord_x", 0);
        b.coord_y = j[i].value("coord_y", 0);
        b.speed = j[i].value("speed", 0);
        b.heading = j[i].value("heading", 0);
        b.command_code = j[i].value("command_code", 0);
        const auto bytes = encode_block(b);
        std::copy(bytes.begin(), bytes.end(), payload.begin() + i * 8);
    }
    return payload;
}

int cmd_embed(const std::string& carrier_file, const std::string& generate_kind,
              double duration_s, double level_db, uint64_t seed,
              const std::vector<double>& tones, const std::string& payload_hex,
              const std::string& blocks_file, double at_s, double gain_db, double ramp_ms,
              double freq_offset_hz, const std::string& out, const CommonOpts& opts) {
    const ProtocolConfig cfg = make_protocol(opts);

    EmbedSpec spec;
    if (!payload_hex.empty() && !blocks_file.empty()) {
        throw UsageError("--payload and --blocks are mutually exclusive");
    }
    if (!payload_hex.empty()) {
        spec.payload = parse_payload_hex(payload_hex);
    } else if (!blocks_file.empty()) {
        spec.payload = payload_from_blocks_file(blocks_file);
    } else {
        throw UsageError("either --payload or --blocks is required");
    }
    spec.at_time_s = at_s;
    spec.gain_db = gain_db;
    spec.ramp_ms = ramp_ms;
    spec.freq_offset_hz = freq_offset_hz;

    AudioBuffer carrier;
    if (!carrier_file.empty()) {
        carrier = load_wav(carrier_file);
    } else if (!generate_kind.empty()) {
        carrier = make_generated_carrier(generate_kind, duration_s, level_db, seed, tones);
    } else {
        throw UsageError("either a carrier file or --generate is required");
    }

    const EmbedResult result = embed_message(carrier, spec, cfg);
    write_wav(result.audio, out);

    // Ground-truth sidecar so harnesses never parse logs.
    ordered_json side;
    side["file"] = out;
    side["payload_hex"] = to_hex(spec.payload);
    side["at_time_s"] = spec.at_time_s;
    side["gain_db"] = spec.gain_db;
    side["ramp_ms"] = spec.ramp_ms;
    side["freq_offset_hz"] = spec.freq_offset_hz;
    side["clipped"] = result.clipped;
    side["protocol"] = protocol_to_json(cfg);
    std::ofstream sf(out + ".json", std::ios::trunc);
    if (!sf) throw IoError("cannot write sidecar: " + out + ".json");
    sf << side.dump(2) << '\n';

    if (result.clipped) std::cerr << "warning: mixing clipped some samples\n";
    std::cout << side.dump(2) << '\n';
    return kExitFindings;
}

int cmd_analyze(const std::string& input, const std::optional<std::string>& normal,
                const std::optional<std::string>& anomalous, size_t segment_symbols,
                double threshold, const std::string& csv_path, const CommonOpts& opts) {
    AnalysisConfig cfg;
    cfg.window = make_window(opts);
    cfg.protocol = make_protocol(opts);
    cfg.entropy_segment_symbols = segment_symbols;
    cfg.entropy_threshold = threshold;
    if (normal) cfg.normal_range = parse_range(*normal, "--normal");
    if (anomalous) cfg.anomalous_range = parse_range(*anomalous, "--anomalous");

    const AudioBuffer audio = load_wav(input);
    const ForensicReport report = full_report(audio, cfg);
    if (!csv_path.empty()) export_energy_csv(report.energy, csv_path);
    std::cout << report_to_json(report).dump(2) << '\n';
    return kExitFindings;
}

int cmd_fragment(const std::string& payload_hex, const std::vector<std::string>& carriers,
                 const std::string& generate_kind, double duration_s, double level_db,
                 uint64_t seed, double at_s, double gain_db, const std::string& out_dir,
                 const CommonOpts& opts) {
    const ProtocolConfig cfg = make_protocol(opts);
    const auto payload = parse_payload_hex(payload_hex);
    const auto frags = fragment_message(payload);

    if (!carriers.empty() && carriers.size() != 4) {
        throw UsageError("--carriers requires exactly 4 files (one per fragment)");
    }
    std::filesystem::create_directories(out_dir);

    ordered_json out = ordered_json::array();
    for (size_t i = 0; i < 4; ++i) {
        AudioBuffer carrier;
        if (!carriers.empty()) {
            carrier = load_wav(carriers[i]);
        } else if (!generate_kind.empty()) {
            carrier = make_generated_carrier(generate_kind, duration_s, level_db,
                                             seed + i, {});
        } else {
            throw UsageError("either --carriers or --generate is required");
        }
        const auto result = embed_fragment(carrier, frags[i], at_s, cfg, gain_db);
        const std::string file =
            (std::filesystem::path(out_dir) / ("fragment_" + std::to_string(i) + ".wav"))
                .string();
        write_wav(result.audio, file);
        out.push_back({{"seq_index", frags[i].seq_index},
                       {"total", frags[i].total},
                       {"block_hex", to_hex(frags[i].block_bytes)},
                       {"file", file},
                       {"at_time_s", at_s}});
    }
    std::cout << out.dump(2) << '\n';
    return kExitFindings;
}

int cmd_reassemble(const std::vector<std::string>& inputs, const CommonOpts& opts) {
    const ProtocolConfig cfg = make_protocol(opts);
    std::vector<AudioBuffer> audios;
    audios.reserve(inputs.size());
    for (const auto& f : inputs) audios.push_back(load_wav(f));

    const FragmentScanResult scanres = detect_fragments(audios, cfg);
    for (const auto& w : scanres.warnings) std::cerr << "warning: " << w << '\n';
    if (scanres.fragments.empty()) {
        std::cout << ordered_json{{"fragments", ordered_json::array()},
                                  {"payload_hex", nullptr}}
                         .dump(2)
                  << '\n';
        return kExitNoFindings;
    }

    std::vector<Fragment> frags;
    frags.reserve(scanres.fragments.size());
    for (const auto& df : scanres.fragments) frags.push_back(df.fragment);

    ordered_json j;
    j["fragments"] = fragments_to_json(scanres.fragments, inputs);
    try {
        const auto payload = reassemble(frags);
        j["payload_hex"] = to_hex(payload);
        std::cout << j.dump(2) << '\n';
        if (opts.text_output) std::printf("%s\n", to_hex(payload).c_str());
        return kExitFindings;
    } catch (const ReassembleError& e) {
        j["payload_hex"] = nullptr;
        j["error"] = e.what();
        std::cout << j.dump(2) << '\n';
        std::cerr << "reassembly failed: " << e.what() << '\n';
        return kExitIncomplete;
    }
}

int cmd_export_features(const std::string& input, const std::string& out,
                        const std::string& bands_arg, const CommonOpts& opts) {
    FeatureConfig cfg;
    cfg.window = make_window(opts);
    cfg.protocol = make_protocol(opts);
    if (!bands_arg.empty()) {
        cfg.bands.clear();
        std::stringstream ss(bands_arg);
        std::string item;
        while (std::getline(ss, item, ',')) {
            cfg.bands.push_back(parse_range(item, "--bands"));
        }
        if (cfg.bands.empty()) throw UsageError("--bands expects lo:hi[,lo:hi...]");
    }
    const AudioBuffer audio = load_wav(input);
    export_features_csv(audio, cfg, out);
    return kExitFindings;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audio sync-steganography detection, decoding and embedding toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* detect = app.add_subcommand("detect", "Scan a WAV for sync frames");
    std::string detect_input;
    detect->add_option("input", detect_input, "Input WAV file")->required();
    add_common(detect, opts);

    auto* decode = app.add_subcommand("decode", "Detect and structurally decode messages");
    std::string decode_input;
    decode->add_option("input", decode_input, "Input WAV file")->required();
    add_common(decode, opts);

    auto* embed = app.add_subcommand("embed", "Embed a message into a carrier");
    std::string embed_carrier, embed_generate, embed_payload, embed_blocks, embed_out;
    double embed_at = 0.5, embed_gain = -6.0, embed_ramp = 2.0, embed_offset = 0.0;
    double embed_duration = 10.0, embed_level = -20.0;
    uint64_t embed_seed = 1;
    std::vector<double> embed_tones;
    embed->add_option("carrier", embed_carrier, "Carrier WAV file");
    embed->add_option("--generate", embed_generate,
                      "Generated carrier kind (silence|noise|tones)");
    embed->add_option("--duration", embed_duration, "Generated carrier duration (s)");
    embed->add_option("--level-db", embed_level, "Generated noise RMS level (dBFS)");
    embed->add_option("--seed", embed_seed, "Generator seed");
    embed->add_option("--tones", embed_tones, "Tone-mix frequencies (Hz)")->delimiter(',');
    embed->add_option("--payload", embed_payload, "32-byte payload as 64 hex digits");
    embed->add_option("--blocks", embed_blocks, "JSON file with 4 guidance blocks");
    embed->add_option("--at", embed_at, "Embedding start time (s)");
    embed->add_option("--gain-db", embed_gain, "Tone gain (dBFS)");
    embed->add_option("--ramp-ms", embed_ramp, "Symbol onset/offset ramp (ms)");
    embed->add_option("--freq-offset-hz", embed_offset, "Global tone detuning (Hz)");
    embed->add_option("-o,--out", embed_out, "Output WAV path")->required();
    add_common(embed, opts);

    auto* analyze = app.add_subcommand("analyze", "Run the full forensic report");
    std::string analyze_input, analyze_csv;
    std::optional<std::string> analyze_normal, analyze_anomalous;
    size_t analyze_segment_symbols = 40;
    double analyze_threshold = 0.2;
    analyze->add_option("input", analyze_input, "Input WAV file")->required();
    analyze->add_option("--normal", analyze_normal, "Normal segment t0:t1 (s)");
    analyze->add_option("--anomalous", analyze_anomalous, "Anomalous segment t0:t1 (s)");
    analyze->add_option("--segment-symbols", analyze_segment_symbols,
                        "Symbols per entropy segment");
    analyze->add_option("--threshold", analyze_threshold, "Entropy flag threshold");
    analyze->add_option("--csv", analyze_csv, "Write the energy comparison CSV here");
    add_common(analyze, opts);

    auto* fragment = app.add_subcommand("fragment", "Split a message across 4 carriers");
    std::string frag_payload, frag_generate = "silence", frag_outdir = ".";
    std::vector<std::string> frag_carriers;
    double frag_duration = 3.0, frag_level = -20.0, frag_at = 1.0, frag_gain = -6.0;
    uint64_t frag_seed = 1;
    fragment->add_option("--payload", frag_payload, "32-byte payload as 64 hex digits")
        ->required();
    fragment->add_option("--carriers", frag_carriers, "Exactly 4 carrier WAV files");
    fragment->add_option("--generate", frag_generate, "Generated carrier kind");
    fragment->add_option("--duration", frag_duration, "Generated carrier duration (s)");
    fragment->add_option("--level-db", frag_level, "Generated noise level (dBFS)");
    fragment->add_option("--seed", frag_seed, "Generator seed");
    fragment->add_option("--at", frag_at, "Embedding start time (s)");
    fragment->add_option("--gain-db", frag_gain, "Tone gain (dBFS)");
    fragment->add_option("--out-dir", frag_outdir, "Directory for fragment WAVs");
    add_common(fragment, opts);

    auto* reassemble_cmd = app.add_subcommand("reassemble", "Recover a payload from carriers");
    std::vector<std::string> reassemble_inputs;
    reassemble_cmd->add_option("inputs", reassemble_inputs, "Carrier WAV files")
        ->required()
        ->expected(-1);
    add_common(reassemble_cmd, opts);

    auto* features = app.add_subcommand("export-features",
                                        "Write the per-window classifier feature matrix");
    std::string features_input, features_out, features_bands;
    features->add_option("input", features_input, "Input WAV file")->required();
    features->add_option("-o,--out", features_out, "Output CSV path")->required();
    features->add_option("--bands", features_bands, "Sub-bands as lo:hi[,lo:hi...] (Hz)");
    add_common(features, opts);

    auto* fixtures = app.add_subcommand("gen-fixtures", "Generate the golden fixture suite");
    std::string fixtures_dir;
    uint64_t fixtures_seed = 1;
    fixtures->add_option("--out-dir", fixtures_dir, "Output directory")->required();
    fixtures->add_option("--seed", fixtures_seed, "Master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(detect)) return cmd_detect(detect_input, opts);
        if (app.got_subcommand(decode)) return cmd_decode(decode_input, opts);
        if (app.got_subcommand(embed)) {
            return cmd_embed(embed_carrier, embed_generate, embed_duration, embed_level,
                             embed_seed, embed_tones, embed_payload, embed_blocks, embed_at,
                             embed_gain, embed_ramp, embed_offset, embed_out, opts);
        }
        if (app.got_subcommand(analyze)) {
            return cmd_analyze(analyze_input, analyze_normal, analyze_anomalous,
                               analyze_segment_symbols, analyze_threshold, analyze_csv, opts);
        }
        if (app.got_subcommand(fragment)) {
            return cmd_fragment(frag_payload, frag_carriers, frag_generate, frag_duration,
                                frag_level, frag_seed, frag_at, frag_gain, frag_outdir, opts);
        }
        if (app.got_subcommand(reassemble_cmd)) return cmd_reassemble(reassemble_inputs, opts);
        if (app.got_subcommand(features)) {
            return cmd_export_features(features_input, features_out, features_bands, opts);
        }
        if (app.got_subcommand(fixtures)) {
            generate_suite(fixtures_dir, fixtures_seed);
            return kExitFindings;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
