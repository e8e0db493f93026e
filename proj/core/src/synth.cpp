#include "mespot/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"
#include "mespot/frames.hpp"
#include "mespot/landmarks.hpp"
#include "mespot/manifest.hpp"
#include "mespot/rng.hpp"

namespace mespot {

void FixtureConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::Configuration, msg); };
  if (videos < 1) bad("fixture needs at least one video");
  if (subjects < 1 || subjects > videos) bad("subjects must lie in [1, videos]");
  if (frames_per_video < 8) bad("frames_per_video must be >= 8");
  if (!(fps > 0.0)) bad("fps must be positive");
  if (mes_min < 0 || mes_max < mes_min) bad("ME count range is inconsistent");
  if (me_length_min < 2 || me_length_max < me_length_min || me_length_max > frames_per_video / 4) {
    bad("ME length range must lie within [2, frames_per_video / 4]");
  }
  if (separation < 0) bad("separation must be >= 0");
  if (!(me_amplitude_min > 0.0) || me_amplitude_max < me_amplitude_min) bad("ME amplitude range is inconsistent");
  if (texture_amplitude < 0.0 || noise_amplitude < 0.0) bad("texture and noise amplitudes must be >= 0");
  if (distractors.blink < 0.0 || distractors.head_shift < 0.0 || distractors.macro_expression < 0.0) {
    bad("distractor rates must be >= 0");
  }
  if (width < 32 || height < 32) bad("frames must be at least 32x32");
}

FixtureConfig FixtureConfig::clean_profile() {
  FixtureConfig cfg;
  cfg.mes_min = cfg.mes_max = 3;
  cfg.noise_amplitude = 1.0;
  return cfg;
}

FixtureConfig FixtureConfig::distractor_profile() {
  FixtureConfig cfg = clean_profile();
  cfg.distractors = {3.0, 1.0, 1.0};
  return cfg;
}

std::string_view to_string(DistractorKind kind) {
  switch (kind) {
    case DistractorKind::Blink: return "blink";
    case DistractorKind::HeadShift: return "head_shift";
    case DistractorKind::MacroExpression: return "macro_expression";
  }
  return "?";
}

namespace {

enum class EventKind { MicroExpression, Blink, HeadShift, MacroExpression };

enum class Region { RightBrow, LeftBrow, MouthLeft, MouthRight };

struct Event {
  EventKind kind;
  int onset;
  int offset;
  Region region = Region::RightBrow;
  double cx = 0, cy = 0, sigma = 0, amplitude = 0;
  int shift_dx = 0, shift_dy = 0;

  bool active(int t) const { return t >= onset && t <= offset; }

  // Linear onset -> apex -> offset ramp with the apex at the interval centre.
  double ramp(int t) const {
    const int apex = (onset + offset) / 2;
    if (t < onset || t > offset) return 0.0;
    if (t <= apex) return apex == onset ? 1.0 : double(t - onset) / (apex - onset);
    return offset == apex ? 1.0 : double(offset - t) / (offset - apex);
  }

  double raised_cosine(int t) const {
    if (t < onset || t > offset) return 0.0;
    const double len = std::max(1, offset - onset);
    return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (t - onset) / len));
  }

  double progress(int t) const {
    if (t <= onset) return 0.0;
    if (t >= offset) return 1.0;
    return double(t - onset) / (offset - onset);
  }
};

// Face layout in a 128x128 reference frame; scaled to the fixture size.
struct Geometry {
  double sx, sy;
  Point2 map(double x, double y) const { return {x * sx, y * sy}; }
};

std::vector<Point2> base_landmarks(const Geometry& g) {
  std::vector<Point2> p(LandmarkTrack::kDefaultPointCount);
  const double pi = std::numbers::pi;
  for (int i = 0; i <= 16; ++i) {  // jaw: lower half of the face ellipse
    const double a = pi - pi * i / 16.0;
    p[i] = g.map(64 + 44 * std::cos(a), 64 + 56 * std::sin(a) * (i == 0 || i == 16 ? 0.0 : 1.0) + 8);
  }
  for (int i = 0; i < 5; ++i) {
    p[17 + i] = g.map(32 + 5.0 * i, 39 - (i == 2 ? 2.0 : (i == 1 || i == 3 ? 1.0 : 0.0)));
    p[22 + i] = g.map(76 + 5.0 * i, 39 - (i == 2 ? 2.0 : (i == 1 || i == 3 ? 1.0 : 0.0)));
  }
  for (int i = 0; i < 4; ++i) p[27 + i] = g.map(64, 58 + 9.0 * i);
  for (int i = 0; i < 5; ++i) p[31 + i] = g.map(56 + 4.0 * i, i == 2 ? 100 : 97);
  auto eye = [&](int first, double cx, double angle0) {
    const double angles[6] = {180, 120, 60, 0, -60, -120};
    for (int i = 0; i < 6; ++i) {
      const double a = (angles[i] + angle0) * pi / 180.0;
      p[first + i] = g.map(cx + 10 * std::cos(a), 51 - 5 * std::sin(a));
    }
  };
  eye(landmark68::kRightEyeFirst, 42, 0);
  eye(landmark68::kLeftEyeFirst, 86, 0);
  for (int i = 0; i < 12; ++i) {
    const double a = (180.0 - 30.0 * i) * pi / 180.0;
    p[48 + i] = g.map(64 + 18 * std::cos(a), 114 - 6 * std::sin(a));
  }
  for (int i = 0; i < 8; ++i) {
    const double a = (180.0 - 45.0 * i) * pi / 180.0;
    p[60 + i] = g.map(64 + 12 * std::cos(a), 114 - 3 * std::sin(a));
  }
  return p;
}

std::vector<float> base_face(const Geometry& g, int w, int h, double texture, SplitMix64& rng) {
  std::vector<float> img(static_cast<std::size_t>(w) * h);
  auto inside = [](double x, double y, double cx, double cy, double rx, double ry) {
    const double u = (x - cx) / rx, v = (y - cy) / ry;
    return u * u + v * v <= 1.0;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double fx = x / g.sx, fy = y / g.sy;  // reference coordinates
      double v = 40.0 + 0.15 * fy;
      if (inside(fx, fy, 64, 66, 46, 60)) v = 150.0 - 0.1 * std::abs(fx - 64);
      if (std::abs(fy - 38.0) <= 2.0 && ((fx >= 30 && fx <= 54) || (fx >= 74 && fx <= 98))) v = 95.0;
      if (inside(fx, fy, 42, 51, 10, 5) || inside(fx, fy, 86, 51, 10, 5)) v = 70.0;
      if (inside(fx, fy, 42, 51, 3, 3) || inside(fx, fy, 86, 51, 3, 3)) v = 30.0;
      if (inside(fx, fy, 64, 98, 8, 3)) v = 120.0;
      if (inside(fx, fy, 64, 114, 18, 6)) v = 110.0;
      if (inside(fx, fy, 64, 114, 12, 1.5)) v = 80.0;
      v += texture * (2.0 * rng.uniform() - 1.0);
      img[static_cast<std::size_t>(y) * w + x] = static_cast<float>(v);
    }
  }
  return img;
}

bool place(std::vector<Event>& placed, Event e, int length, int n, int separation, SplitMix64& rng) {
  const int lo = separation;
  const int hi = n - separation - length;
  if (hi < lo) return false;
  for (int attempt = 0; attempt < 4000; ++attempt) {
    const int onset = static_cast<int>(rng.uniform_int(lo, hi));
    const int offset = onset + length - 1;
    const bool clear = std::all_of(placed.begin(), placed.end(), [&](const Event& o) {
      return onset - o.offset > separation || o.onset - offset > separation;
    });
    if (clear) {
      e.onset = onset;
      e.offset = offset;
      placed.push_back(e);
      return true;
    }
  }
  return false;
}

int draw_count(double rate, SplitMix64& rng) {
  const double whole = std::floor(rate);
  return static_cast<int>(whole) + (rng.bernoulli(rate - whole) ? 1 : 0);
}

void add_blob(std::vector<float>& img, int w, int h, double cx, double cy, double sigma, double amp) {
  if (amp == 0.0) return;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  const int x0 = std::max(0, static_cast<int>(cx) - r), x1 = std::min(w - 1, static_cast<int>(cx) + r);
  const int y0 = std::max(0, static_cast<int>(cy) - r), y1 = std::min(h - 1, static_cast<int>(cy) + r);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      img[static_cast<std::size_t>(y) * w + x] += static_cast<float>(amp * std::exp(-d2 * inv));
    }
  }
}

// Backward warp: pixels near (cx, cy) move by up to (dx, dy), Gaussian falloff.
void local_warp(std::vector<float>& img, int w, int h, double cx, double cy, double sigma, double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return;
  const std::vector<float> src = img;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  auto at = [&](int x, int y) {
    return src[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
  };
  for (int y = std::max(0, static_cast<int>(cy) - r); y <= std::min(h - 1, static_cast<int>(cy) + r); ++y) {
    for (int x = std::max(0, static_cast<int>(cx) - r); x <= std::min(w - 1, static_cast<int>(cx) + r); ++x) {
      const double wgt = std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) * inv);
      const double sx = x - dx * wgt, sy = y - dy * wgt;
      const int ix = static_cast<int>(std::floor(sx)), iy = static_cast<int>(std::floor(sy));
      const double fx = sx - ix, fy = sy - iy;
      img[static_cast<std::size_t>(y) * w + x] = static_cast<float>(
          (1 - fy) * ((1 - fx) * at(ix, iy) + fx * at(ix + 1, iy)) + fy * ((1 - fx) * at(ix, iy + 1) + fx * at(ix + 1, iy + 1)));
    }
  }
}

void add_ellipse(std::vector<float>& img, int w, int h, double cx, double cy, double rx, double ry, double amp) {
  for (int y = std::max(0, int(cy - ry) - 1); y <= std::min(h - 1, int(cy + ry) + 1); ++y) {
    for (int x = std::max(0, int(cx - rx) - 1); x <= std::min(w - 1, int(cx + rx) + 1); ++x) {
      const double u = (x - cx) / rx, v = (y - cy) / ry;
      if (u * u + v * v <= 1.0) img[static_cast<std::size_t>(y) * w + x] += static_cast<float>(amp);
    }
  }
}

struct VideoOutput {
  FrameSequence frames;
  LandmarkTrack landmarks;
  std::vector<GroundTruthSample> ground_truth;
  std::vector<DistractorEvent> distractors;
};

VideoOutput generate_video(const FixtureConfig& cfg, int index, const std::string& video_id,
                           const std::string& subject_id) {
  SplitMix64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(index)));
  const int w = cfg.width, h = cfg.height, n = cfg.frames_per_video;
  const Geometry g{w / 128.0, h / 128.0};
  const double scale = std::min(g.sx, g.sy);

  std::vector<Event> events;
  const int me_count = static_cast<int>(rng.uniform_int(cfg.mes_min, cfg.mes_max));
  for (int i = 0; i < me_count; ++i) {
    Event e{EventKind::MicroExpression, 0, 0};
    e.region = static_cast<Region>(rng.uniform_int(0, 3));
    const Point2 anchor = e.region == Region::RightBrow  ? g.map(42, 40)
                          : e.region == Region::LeftBrow ? g.map(86, 40)
                          : e.region == Region::MouthLeft ? g.map(48, 112)
                                                          : g.map(80, 112);
    e.cx = anchor.x + rng.uniform(-2.0, 2.0) * scale;
    e.cy = anchor.y + rng.uniform(-2.0, 2.0) * scale;
    e.sigma = 5.0 * scale;
    e.amplitude = rng.uniform(cfg.me_amplitude_min, cfg.me_amplitude_max) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
    const int length = static_cast<int>(rng.uniform_int(cfg.me_length_min, cfg.me_length_max));
    if (!place(events, e, length, n, cfg.separation, rng)) {
      fail(ErrorKind::Configuration,
           fmt::format("cannot fit {} events into {} frames with separation {}", me_count, n, cfg.separation));
    }
  }
  auto add_distractors = [&](double rate, EventKind kind) {
    const int count = draw_count(rate, rng);
    for (int i = 0; i < count; ++i) {
      Event e{kind, 0, 0};
      int length = 0;
      switch (kind) {
        case EventKind::Blink:
          length = static_cast<int>(rng.uniform_int(8, 14));
          e.amplitude = -rng.uniform(60.0, 80.0);
          break;
        case EventKind::HeadShift:
          length = static_cast<int>(rng.uniform_int(10, 30));
          if (rng.bernoulli(0.5)) {
            e.shift_dx = rng.bernoulli(0.5) ? 2 : -2;
          } else {
            e.shift_dy = rng.bernoulli(0.5) ? 2 : -2;
          }
          break;
        case EventKind::MacroExpression:
          length = static_cast<int>(rng.uniform_int(80, 150));
          e.amplitude = rng.uniform(40.0, 60.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
          break;
        case EventKind::MicroExpression:
          break;
      }
      if (!place(events, e, length, n, cfg.separation, rng)) {
        fail(ErrorKind::Configuration, fmt::format("cannot fit distractors into {} frames", n));
      }
    }
  };
  add_distractors(cfg.distractors.blink, EventKind::Blink);
  add_distractors(cfg.distractors.head_shift, EventKind::HeadShift);
  add_distractors(cfg.distractors.macro_expression, EventKind::MacroExpression);
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.onset < b.onset; });

  VideoOutput out;
  const std::vector<float> base = base_face(g, w, h, cfg.texture_amplitude, rng);
  const std::vector<Point2> base_points = base_landmarks(g);
  out.frames.video_id = video_id;
  out.frames.width = w;
  out.frames.height = h;
  out.frames.fps = cfg.fps;
  out.frames.frames.reserve(n);
  out.landmarks.video_id = video_id;
  out.landmarks.frames.reserve(n);

  std::vector<float> face;
  for (int t = 0; t < n; ++t) {
    face = base;
    std::vector<Point2> pts = base_points;
    double shift_x = 0.0, shift_y = 0.0;
    for (const Event& e : events) {
      if (e.kind == EventKind::HeadShift) {
        shift_x += e.shift_dx * e.progress(t);
        shift_y += e.shift_dy * e.progress(t);
        continue;
      }
      if (!e.active(t)) continue;
      switch (e.kind) {
        case EventKind::MicroExpression: {
          const double r = e.ramp(t);
          double dx = 0.0, dy = 0.0;
          if (e.region == Region::RightBrow || e.region == Region::LeftBrow) {
            dy = -2.5 * r * g.sy;
            const int first = e.region == Region::RightBrow ? landmark68::kRightBrowFirst : landmark68::kLeftBrowFirst;
            for (int i = first; i < first + 5; ++i) pts[i].y += dy;
          } else {
            dx = (e.region == Region::MouthLeft ? -2.0 : 2.0) * r * g.sx;
            dy = -1.0 * r * g.sy;
            const int corner = e.region == Region::MouthLeft ? landmark68::kMouthLeft : landmark68::kMouthRight;
            pts[corner].x += dx;
            pts[corner].y += dy;
          }
          local_warp(face, w, h, e.cx, e.cy, 2.0 * e.sigma, dx, dy);
          add_blob(face, w, h, e.cx, e.cy, e.sigma, e.amplitude * r);
          break;
        }
        case EventKind::Blink: {
          const double r = e.ramp(t);
          const Point2 re = g.map(42, 51), le = g.map(86, 51);
          local_warp(face, w, h, re.x, re.y - 4 * g.sy, 6 * scale, 0.0, 4.0 * r * g.sy);
          local_warp(face, w, h, le.x, le.y - 4 * g.sy, 6 * scale, 0.0, 4.0 * r * g.sy);
          add_ellipse(face, w, h, re.x, re.y, 11 * g.sx, 6 * g.sy, e.amplitude * r);
          add_ellipse(face, w, h, le.x, le.y, 11 * g.sx, 6 * g.sy, e.amplitude * r);
          for (const int i : {37, 38, 43, 44}) pts[i].y += 4.0 * r * g.sy;
          break;
        }
        case EventKind::MacroExpression: {
          const double env = e.raised_cosine(t);
          const Point2 mouth = g.map(64, 114), brows = g.map(64, 40);
          local_warp(face, w, h, mouth.x - 18 * g.sx, mouth.y, 10 * scale, -4.0 * env * g.sx, 0.0);
          local_warp(face, w, h, mouth.x + 18 * g.sx, mouth.y, 10 * scale, 4.0 * env * g.sx, 0.0);
          local_warp(face, w, h, g.map(42, 39).x, brows.y, 10 * scale, 0.0, -3.0 * env * g.sy);
          local_warp(face, w, h, g.map(86, 39).x, brows.y, 10 * scale, 0.0, -3.0 * env * g.sy);
          add_blob(face, w, h, mouth.x, mouth.y, 12 * scale, e.amplitude * env);
          add_blob(face, w, h, brows.x, brows.y, 10 * scale, 0.6 * e.amplitude * env);
          pts[landmark68::kMouthLeft].x -= 4.0 * env * g.sx;
          pts[landmark68::kMouthRight].x += 4.0 * env * g.sx;
          pts[landmark68::kMouthTop].y -= 2.0 * env * g.sy;
          pts[landmark68::kMouthBottom].y += 2.0 * env * g.sy;
          for (int i = 17; i <= 26; ++i) pts[i].y -= 3.0 * env * g.sy;
          break;
        }
        case EventKind::HeadShift:
          break;
      }
    }
    const int dx = static_cast<int>(std::lround(std::clamp(shift_x, -2.0, 2.0)));
    const int dy = static_cast<int>(std::lround(std::clamp(shift_y, -2.0, 2.0)));

    Raster frame(w, h);
    for (int y = 0; y < h; ++y) {
      const int sy = std::clamp(y - dy, 0, h - 1);
      for (int x = 0; x < w; ++x) {
        const int sx = std::clamp(x - dx, 0, w - 1);
        double v = face[static_cast<std::size_t>(sy) * w + sx];
        if (cfg.noise_amplitude > 0.0) v += cfg.noise_amplitude * (2.0 * rng.uniform() - 1.0);
        frame.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
    out.frames.frames.push_back(std::move(frame));

    for (auto& p : pts) {
      p.x = std::clamp(p.x + dx, 0.0, w - 1.0);
      p.y = std::clamp(p.y + dy, 0.0, h - 1.0);
    }
    out.landmarks.frames.push_back({t, std::move(pts)});
  }

  for (const Event& e : events) {
    switch (e.kind) {
      case EventKind::MicroExpression:
        out.ground_truth.push_back({video_id, subject_id, e.onset, e.offset});
        break;
      case EventKind::Blink:
        out.distractors.push_back({video_id, DistractorKind::Blink, e.onset, e.offset});
        break;
      case EventKind::HeadShift:
        out.distractors.push_back({video_id, DistractorKind::HeadShift, e.onset, e.offset});
        break;
      case EventKind::MacroExpression:
        out.distractors.push_back({video_id, DistractorKind::MacroExpression, e.onset, e.offset});
        break;
    }
  }
  return out;
}

}  // namespace

Fixture generate_fixture(const FixtureConfig& cfg) {
  cfg.validate();
  Fixture fx;
  for (int i = 0; i < cfg.videos; ++i) {
    const std::string subject = fmt::format("s{:02d}", i % cfg.subjects + 1);
    const std::string video = fmt::format("{}_v{:03d}", subject, i + 1);
    VideoOutput v = generate_video(cfg, i, video, subject);
    fx.manifest.videos.push_back({video, subject, cfg.frames_per_video, cfg.fps, "frames/" + video + ".mesq"});
    for (auto& gt : v.ground_truth) fx.manifest.ground_truth.push_back(std::move(gt));
    for (auto& d : v.distractors) fx.distractors.push_back(std::move(d));
    fx.sequences.push_back(std::move(v.frames));
    fx.landmarks.push_back(std::move(v.landmarks));
  }
  fx.manifest.validate_and_update_stats();
  return fx;
}

std::string write_distractors_text(const std::vector<DistractorEvent>& events) {
  std::string out(kDistractorHeader);
  out += '\n';
  for (const auto& e : events) out += fmt::format("{},{},{},{}\n", e.video_id, to_string(e.kind), e.onset, e.offset);
  return out;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "frames", ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + (dir / "frames").string());
  for (std::size_t i = 0; i < fixture.sequences.size(); ++i) {
    write_sequence_file(fixture.sequences[i], dir / fixture.manifest.videos[i].frames_path);
  }
  write_landmarks(fixture.landmarks, dir / "landmarks.csv");
  write_file_atomic(dir / "distractors.csv", write_distractors_text(fixture.distractors));
  write_manifest(fixture.manifest, dir / "manifest.txt");
}

}  // namespace mespot
