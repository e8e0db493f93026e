#pragma once

#include <filesystem>
#include <string>

#include "mespot/types.hpp"

namespace mespot {

// Two lossless storage layouts are supported:
//  * raw sequence file: 16-byte header ("MESQ", then little-endian u32 width,
//    height, frame_count) followed by concatenated row-major 8-bit frames;
//  * directory of binary PGM files named frame_000000.pgm, frame_000001.pgm, ...

inline constexpr char kSequenceMagic[4] = {'M', 'E', 'S', 'Q'};

std::string encode_sequence(const FrameSequence& seq);
FrameSequence decode_sequence(std::string_view bytes, const std::string& video_id, double fps);

void write_sequence_file(const FrameSequence& seq, const std::filesystem::path& path);
FrameSequence read_sequence_file(const std::filesystem::path& path, const std::string& video_id,
                                 double fps);

void write_frame_directory(const FrameSequence& seq, const std::filesystem::path& dir);
FrameSequence read_frame_directory(const std::filesystem::path& dir, const std::string& video_id,
                                   double fps);

std::string encode_pgm(const Raster& raster);
Raster decode_pgm(std::string_view bytes);

/// Resolves `record.frames_path` against `base_dir` (when relative) and loads
/// it in whichever layout is present. The frame count must match the record.
FrameSequence load_frames(const VideoRecord& record, const std::filesystem::path& base_dir);

std::filesystem::path resolve_frames_path(const VideoRecord& record,
                                          const std::filesystem::path& base_dir);

}  // namespace mespot
