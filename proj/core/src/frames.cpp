#include "mespot/frames.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cstring>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"

namespace mespot {

Raster::Raster(int width, int height, std::uint8_t fill)
    : width_(width), height_(height),
      pixels_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill) {
  if (width < 0 || height < 0) fail(ErrorKind::Argument, "negative raster size");
}

Raster::Raster(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 0 || height < 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(ErrorKind::Argument, "pixel buffer does not match raster size");
  }
}

void FrameSequence::validate() const {
  if (frames.empty()) fail(ErrorKind::Validation, "sequence " + video_id + " has no frames");
  if (width <= 0 || height <= 0) fail(ErrorKind::Validation, "sequence " + video_id + " has no area");
  for (const auto& f : frames) {
    if (f.width() != width || f.height() != height) {
      fail(ErrorKind::Validation, "sequence " + video_id + " has frames of differing size");
    }
  }
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_sequence(const FrameSequence& seq) {
  seq.validate();
  const std::size_t frame_bytes = static_cast<std::size_t>(seq.width) * seq.height;
  std::string out;
  out.reserve(16 + frame_bytes * seq.frames.size());
  out.append(kSequenceMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(seq.width));
  put_u32(out, static_cast<std::uint32_t>(seq.height));
  put_u32(out, static_cast<std::uint32_t>(seq.frames.size()));
  for (const auto& f : seq.frames) {
    const auto px = f.pixels();
    out.append(reinterpret_cast<const char*>(px.data()), px.size());
  }
  return out;
}

FrameSequence decode_sequence(std::string_view bytes, const std::string& video_id, double fps) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kSequenceMagic, 4) != 0) {
    fail(ErrorKind::Parse, "missing MESQ header for video " + video_id);
  }
  const std::uint32_t w = get_u32(bytes, 4);
  const std::uint32_t h = get_u32(bytes, 8);
  const std::uint32_t n = get_u32(bytes, 12);
  const std::size_t frame_bytes = static_cast<std::size_t>(w) * h;
  if (w == 0 || h == 0 || n == 0 || bytes.size() != 16 + frame_bytes * n) {
    fail(ErrorKind::Parse, fmt::format("MESQ payload size mismatch for video {}", video_id));
  }
  FrameSequence seq;
  seq.video_id = video_id;
  seq.width = static_cast<int>(w);
  seq.height = static_cast<int>(h);
  seq.fps = fps;
  seq.frames.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const char* p = bytes.data() + 16 + frame_bytes * i;
    seq.frames.emplace_back(seq.width, seq.height,
                            std::vector<std::uint8_t>(reinterpret_cast<const std::uint8_t*>(p),
                                                      reinterpret_cast<const std::uint8_t*>(p) + frame_bytes));
  }
  return seq;
}

void write_sequence_file(const FrameSequence& seq, const std::filesystem::path& path) {
  write_file_atomic(path, encode_sequence(seq));
}

FrameSequence read_sequence_file(const std::filesystem::path& path, const std::string& video_id,
                                 double fps) {
  return decode_sequence(read_text_file(path), video_id, fps);
}

std::string encode_pgm(const Raster& raster) {
  std::string out = fmt::format("P5\n{} {}\n255\n", raster.width(), raster.height());
  const auto px = raster.pixels();
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

Raster decode_pgm(std::string_view bytes) {
  // Header tokens: magic, width, height, maxval; '#' comments allowed between.
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  if (next_token() != "P5") fail(ErrorKind::Parse, "not a binary PGM");
  const auto w = parse_integer(next_token());
  const auto h = parse_integer(next_token());
  const auto maxval = parse_integer(next_token());
  if (!w || !h || !maxval || *w <= 0 || *h <= 0 || *maxval != 255) {
    fail(ErrorKind::Parse, "unsupported PGM header (8-bit grayscale required)");
  }
  ++pos;  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(*w) * static_cast<std::size_t>(*h);
  if (bytes.size() < pos + n) fail(ErrorKind::Parse, "truncated PGM payload");
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data() + pos);
  return Raster(static_cast<int>(*w), static_cast<int>(*h), std::vector<std::uint8_t>(p, p + n));
}

void write_frame_directory(const FrameSequence& seq, const std::filesystem::path& dir) {
  seq.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string());
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    write_file_atomic(dir / fmt::format("frame_{:06d}.pgm", i), encode_pgm(seq.frames[i]));
  }
}

FrameSequence read_frame_directory(const std::filesystem::path& dir, const std::string& video_id,
                                   double fps) {
  FrameSequence seq;
  seq.video_id = video_id;
  seq.fps = fps;
  for (std::size_t i = 0;; ++i) {
    const auto path = dir / fmt::format("frame_{:06d}.pgm", i);
    if (!std::filesystem::exists(path)) break;
    seq.frames.push_back(decode_pgm(read_text_file(path)));
  }
  if (seq.frames.empty()) fail(ErrorKind::Io, "no frame_000000.pgm in " + dir.string());
  seq.width = seq.frames.front().width();
  seq.height = seq.frames.front().height();
  seq.validate();
  return seq;
}

std::filesystem::path resolve_frames_path(const VideoRecord& record,
                                          const std::filesystem::path& base_dir) {
  std::filesystem::path p(record.frames_path);
  return p.is_absolute() ? p : base_dir / p;
}

FrameSequence load_frames(const VideoRecord& record, const std::filesystem::path& base_dir) {
  const auto path = resolve_frames_path(record, base_dir);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    fail(ErrorKind::Io, "frames for video " + record.video_id + " not found at " + path.string());
  }
  FrameSequence seq = std::filesystem::is_directory(path, ec)
                          ? read_frame_directory(path, record.video_id, record.fps)
                          : read_sequence_file(path, record.video_id, record.fps);
  if (seq.frame_count() != record.frame_count) {
    fail(ErrorKind::Validation, fmt::format("video {} has {} frames on disk but {} in the manifest",
                                            record.video_id, seq.frame_count(), record.frame_count));
  }
  return seq;
}

}  // namespace mespot
