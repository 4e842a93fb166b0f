#include <circrect/error.hpp>
#include <circrect/io.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace circrect::io {
namespace {
using nlohmann::json;

auto parse_error(const std::string &path, const std::string &message) -> Error {
  return Error{ErrorKind::ParseError, (path.empty() ? std::string{"<root>"} : path) + ": " + message};
}

// Strict view of one JSON object: every key must be consumed or listed, and
// every access reports the full path on failure.
class Node {
public:
  Node(const json &j, std::string path) : m_json{j}, m_path{std::move(path)} {
    if (!m_json.is_object()) {
      throw parse_error(m_path, "expected an object");
    }
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto &[key, value] : m_json.items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw parse_error(m_path, "unknown field '" + key + "'");
      }
    }
  }

  [[nodiscard]] auto has(const std::string &key) const -> bool { return m_json.contains(key); }

  [[nodiscard]] auto child_path(const std::string &key) const -> std::string {
    return m_path.empty() ? key : m_path + "." + key;
  }

  [[nodiscard]] auto raw(const std::string &key) const -> const json & {
    if (!m_json.contains(key)) {
      throw parse_error(m_path, "missing field '" + key + "'");
    }
    return m_json.at(key);
  }

  [[nodiscard]] auto object(const std::string &key) const -> Node {
    return Node{raw(key), child_path(key)};
  }

  [[nodiscard]] auto real(const std::string &key) const -> double {
    const auto &v = raw(key);
    if (!v.is_number()) {
      throw parse_error(child_path(key), "expected a number");
    }
    return v.get<double>();
  }

  [[nodiscard]] auto real_or(const std::string &key, double fallback) const -> double {
    return has(key) ? real(key) : fallback;
  }

  [[nodiscard]] auto integer(const std::string &key) const -> std::int64_t {
    const auto &v = raw(key);
    if (!v.is_number_integer()) {
      throw parse_error(child_path(key), "expected an integer");
    }
    return v.get<std::int64_t>();
  }

  [[nodiscard]] auto int32(const std::string &key) const -> int {
    const auto v = integer(key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      throw parse_error(child_path(key), "integer out of range");
    }
    return static_cast<int>(v);
  }

  [[nodiscard]] auto uint64(const std::string &key) const -> std::uint64_t {
    const auto &v = raw(key);
    if (!v.is_number_unsigned()) {
      throw parse_error(child_path(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  [[nodiscard]] auto boolean(const std::string &key) const -> bool {
    const auto &v = raw(key);
    if (!v.is_boolean()) {
      throw parse_error(child_path(key), "expected true or false");
    }
    return v.get<bool>();
  }

  [[nodiscard]] auto string(const std::string &key) const -> std::string {
    const auto &v = raw(key);
    if (!v.is_string()) {
      throw parse_error(child_path(key), "expected a string");
    }
    return v.get<std::string>();
  }

  [[nodiscard]] auto array(const std::string &key) const -> const json & {
    const auto &v = raw(key);
    if (!v.is_array()) {
      throw parse_error(child_path(key), "expected an array");
    }
    return v;
  }

  template <size_t N>
  [[nodiscard]] auto reals(const std::string &key) const -> std::array<double, N> {
    const auto &v = array(key);
    if (v.size() != N) {
      throw parse_error(child_path(key), "expected " + std::to_string(N) + " numbers");
    }
    auto out = std::array<double, N>{};
    for (size_t i = 0; i < N; ++i) {
      if (!v[i].is_number()) {
        throw parse_error(child_path(key) + "[" + std::to_string(i) + "]", "expected a number");
      }
      out[i] = v[i].get<double>();
    }
    return out;
  }

  [[nodiscard]] auto vec3(const std::string &key) const -> Vec3 {
    const auto a = reals<3>(key);
    return {a[0], a[1], a[2]};
  }

  [[nodiscard]] auto path() const -> const std::string & { return m_path; }

private:
  const json &m_json;
  std::string m_path;
};

auto parse_json(std::string_view text) -> json {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    throw Error{ErrorKind::ParseError, std::string{"malformed JSON: "} + e.what()};
  }
}

void check_version(const Node &root) {
  const auto v = root.integer("format_version");
  if (v != kFormatVersion) {
    throw parse_error(root.child_path("format_version"),
                      "unsupported version " + std::to_string(v));
  }
}

auto vec3_json(const Vec3 &v) -> json { return json::array({v.x(), v.y(), v.z()}); }

auto rig_spec_json(const RigSpec &s) -> json {
  return {{"n_cameras", s.n_cameras},
          {"radius", s.radius},
          {"x_cen", s.x_cen},
          {"z_cen", s.z_cen},
          {"camera_height", s.camera_height},
          {"arc_span", s.arc_span},
          {"arc_center", s.arc_center},
          {"position_noise", s.position_noise},
          {"rotation_noise", s.rotation_noise},
          {"seed", s.seed},
          {"intrinsics",
           {{"f_x", s.intrinsics.fx},
            {"f_y", s.intrinsics.fy},
            {"o_x", s.intrinsics.ox},
            {"o_y", s.intrinsics.oy},
            {"skew", s.intrinsics.skew}}},
          {"width", s.image_width},
          {"height", s.image_height}};
}

auto rig_spec_from(const Node &n) -> RigSpec {
  n.allow({"n_cameras", "radius", "x_cen", "z_cen", "camera_height", "arc_span", "arc_center",
           "position_noise", "rotation_noise", "seed", "intrinsics", "width", "height"});
  auto s = RigSpec{};
  s.n_cameras = n.int32("n_cameras");
  s.radius = n.real("radius");
  s.x_cen = n.real_or("x_cen", s.x_cen);
  s.z_cen = n.real_or("z_cen", s.z_cen);
  s.camera_height = n.real_or("camera_height", s.camera_height);
  s.arc_span = n.real_or("arc_span", s.arc_span);
  s.arc_center = n.real_or("arc_center", s.arc_center);
  s.position_noise = n.real_or("position_noise", s.position_noise);
  s.rotation_noise = n.real_or("rotation_noise", s.rotation_noise);
  if (n.has("seed")) {
    s.seed = n.uint64("seed");
  }
  if (n.has("intrinsics")) {
    const auto k = n.object("intrinsics");
    k.allow({"f_x", "f_y", "o_x", "o_y", "skew"});
    s.intrinsics = {k.real("f_x"), k.real("f_y"), k.real("o_x"), k.real("o_y"),
                    k.real_or("skew", 0.0)};
  }
  if (n.has("width")) {
    s.image_width = n.int32("width");
  }
  if (n.has("height")) {
    s.image_height = n.int32("height");
  }
  try {
    validate(s);
  } catch (const Error &e) {
    throw parse_error(n.path(), e.what());
  }
  return s;
}

auto texture_json(const Texture &t) -> json {
  return {{"kind", std::string{to_string(t.kind)}},
          {"luma", t.luma},
          {"luma_amplitude", t.luma_amplitude},
          {"chroma_u", t.chroma_u},
          {"chroma_v", t.chroma_v},
          {"chroma_amplitude", t.chroma_amplitude},
          {"scale", t.scale},
          {"direction", vec3_json(t.direction)},
          {"seed", t.seed}};
}

auto texture_from(const Node &n) -> Texture {
  n.allow({"kind", "luma", "luma_amplitude", "chroma_u", "chroma_v", "chroma_amplitude", "scale",
           "direction", "seed"});
  auto t = Texture{};
  try {
    t.kind = parse_texture_kind(n.string("kind"));
  } catch (const Error &e) {
    throw parse_error(n.child_path("kind"), e.what());
  }
  t.luma = n.real_or("luma", t.luma);
  t.luma_amplitude = n.real_or("luma_amplitude", t.luma_amplitude);
  t.chroma_u = n.real_or("chroma_u", t.chroma_u);
  t.chroma_v = n.real_or("chroma_v", t.chroma_v);
  t.chroma_amplitude = n.real_or("chroma_amplitude", t.chroma_amplitude);
  t.scale = n.real_or("scale", t.scale);
  if (n.has("direction")) {
    t.direction = n.vec3("direction");
  }
  if (n.has("seed")) {
    t.seed = n.uint64("seed");
  }
  return t;
}

auto scene_spec_json(const SceneSpec &s) -> json {
  auto prims = json::array();
  for (const auto &p : s.primitives) {
    auto j = json{{"kind", std::string{to_string(p.kind)}}, {"center", vec3_json(p.center)}};
    switch (p.kind) {
    case PrimitiveKind::Plane:
      j["normal"] = vec3_json(p.normal);
      break;
    case PrimitiveKind::Sphere:
      j["radius"] = p.radius;
      break;
    case PrimitiveKind::Box:
      j["half_extents"] = vec3_json(p.half_extents);
      j["yaw"] = p.yaw;
      break;
    }
    j["texture"] = texture_json(p.texture);
    prims.push_back(j);
  }
  return {{"primitives", prims},
          {"background_depth", s.background_depth},
          {"background_luma", s.background_luma},
          {"z_near", s.z_near},
          {"z_far", s.z_far}};
}

auto scene_spec_from(const Node &n) -> SceneSpec {
  n.allow({"primitives", "background_depth", "background_luma", "z_near", "z_far"});
  auto s = SceneSpec{};
  const auto &prims = n.array("primitives");
  for (size_t i = 0; i < prims.size(); ++i) {
    const auto pn = Node{prims[i], n.child_path("primitives") + "[" + std::to_string(i) + "]"};
    auto p = Primitive{};
    try {
      p.kind = parse_primitive_kind(pn.string("kind"));
    } catch (const Error &e) {
      throw parse_error(pn.child_path("kind"), e.what());
    }
    switch (p.kind) {
    case PrimitiveKind::Plane:
      pn.allow({"kind", "center", "normal", "texture"});
      p.normal = pn.vec3("normal");
      break;
    case PrimitiveKind::Sphere:
      pn.allow({"kind", "center", "radius", "texture"});
      p.radius = pn.real("radius");
      break;
    case PrimitiveKind::Box:
      pn.allow({"kind", "center", "half_extents", "yaw", "texture"});
      p.half_extents = pn.vec3("half_extents");
      p.yaw = pn.real_or("yaw", 0.0);
      break;
    }
    p.center = pn.vec3("center");
    p.texture = texture_from(pn.object("texture"));
    s.primitives.push_back(p);
  }
  s.background_depth = n.real("background_depth");
  s.background_luma = n.real_or("background_luma", s.background_luma);
  s.z_near = n.real("z_near");
  s.z_far = n.real("z_far");
  try {
    validate(s);
  } catch (const Error &e) {
    throw parse_error(n.path(), e.what());
  }
  return s;
}

auto byte_size(const std::filesystem::path &path) -> std::size_t {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) {
    throw Error{ErrorKind::InvalidArgument, "cannot stat " + path.string() + ": " + ec.message()};
  }
  return static_cast<std::size_t>(size);
}

auto read_bytes(const std::filesystem::path &path) -> std::vector<unsigned char> {
  auto in = std::ifstream{path, std::ios::binary};
  if (!in) {
    throw Error{ErrorKind::InvalidArgument, "cannot open " + path.string()};
  }
  return {std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
}

void check_frame_multiple(const std::filesystem::path &path, std::size_t size,
                          std::size_t frame_bytes) {
  if (frame_bytes == 0) {
    throw Error{ErrorKind::InvalidArgument, "frame size must be positive"};
  }
  if (size % frame_bytes != 0) {
    std::ostringstream msg;
    msg << path.string() << ": size " << size << " bytes is not a multiple of the frame size "
        << frame_bytes << "; last complete frame ends at byte offset "
        << (size / frame_bytes) * frame_bytes << ", " << size % frame_bytes
        << " trailing bytes";
    throw Error{ErrorKind::TruncatedFile, msg.str()};
  }
}

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
    throw Error{ErrorKind::InvalidArgument, "frame dimensions must be positive and even"};
  }
}

auto split_csv_line(std::string_view line) -> std::vector<std::string> {
  auto out = std::vector<std::string>{};
  auto cur = std::string{};
  for (const auto c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

auto lines_of(std::string_view text) -> std::vector<std::string> {
  auto out = std::vector<std::string>{};
  auto in = std::istringstream{std::string{text}};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    out.push_back(line);
  }
  return out;
}

auto real_json(double v) -> json {
  if (std::isfinite(v)) {
    return v;
  }
  return format_real(v);
}

auto real_from_json(const json &j, const std::string &path) -> double {
  if (j.is_number()) {
    return j.get<double>();
  }
  if (j.is_string()) {
    return parse_real(j.get<std::string>());
  }
  throw parse_error(path, "expected a number");
}

constexpr std::string_view kCsvHeader =
    "sequence,pair,predictor,sse,psnr_db,hole_fraction,ns_per_point";
} // namespace

auto to_string(TranslationConvention c) -> std::string_view {
  return c == TranslationConvention::WorldOffset ? "world-offset" : "camera-center";
}

auto format_real(double v) -> std::string {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

auto parse_real(std::string_view text) -> double {
  if (text == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (text == "-inf") {
    return -std::numeric_limits<double>::infinity();
  }
  if (text == "nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const auto s = std::string{text};
  char *end = nullptr;
  const auto v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error{ErrorKind::ParseError, "not a number: '" + s + "'"};
  }
  return v;
}

auto parse_camera_file(std::string_view text) -> CameraSet {
  const auto doc = parse_json(text);
  const auto root = Node{doc, ""};
  root.allow({"format_version", "convention", "cameras"});
  check_version(root);

  auto convention = TranslationConvention::WorldOffset;
  if (root.has("convention")) {
    const auto c = root.string("convention");
    if (c == "camera-center") {
      convention = TranslationConvention::CameraCenter;
    } else if (c != "world-offset") {
      throw parse_error("convention", "expected world-offset or camera-center, got '" + c + "'");
    }
  }

  auto set = CameraSet{};
  const auto &cams = root.array("cameras");
  auto ids = std::set<int>{};
  for (size_t i = 0; i < cams.size(); ++i) {
    const auto n = Node{cams[i], "cameras[" + std::to_string(i) + "]"};
    n.allow({"id", "width", "height", "K", "R", "T", "z_near", "z_far"});
    auto cam = CameraParams{};
    cam.id = n.int32("id");
    const auto where = n.path() + " (camera id " + std::to_string(cam.id) + ")";
    if (!ids.insert(cam.id).second) {
      throw parse_error(where, "duplicate camera id");
    }
    cam.width = n.int32("width");
    cam.height = n.int32("height");

    const auto K = n.reals<9>("K");
    if (K[3] != 0.0 || K[6] != 0.0 || K[7] != 0.0 || K[8] != 1.0) {
      throw parse_error(where + ".K", "K must be upper triangular with K[2][2] = 1");
    }
    cam.intr = {K[0], K[4], K[2], K[5], K[1]};

    const auto R = n.reals<9>("R");
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        cam.extr.R(r, c) = R[static_cast<size_t>(3 * r + c)];
      }
    }
    const auto T = n.reals<3>("T");
    const Vec3 t{T[0], T[1], T[2]};
    cam.extr.T = convention == TranslationConvention::WorldOffset ? t : Vec3{-cam.extr.R * t};

    const auto range = DepthRange{n.real("z_near"), n.real("z_far")};
    if (!(range.z_near > 0.0) || !(range.z_near < range.z_far)) {
      throw parse_error(where, "depth range must satisfy 0 < z_near < z_far");
    }
    try {
      validate(cam);
    } catch (const Error &e) {
      throw parse_error(where, e.what());
    }
    set.cameras.push_back(cam);
    set.depth_ranges.push_back(range);
  }
  return set;
}

auto format_camera_file(const CameraSet &set, TranslationConvention convention) -> std::string {
  if (set.cameras.size() != set.depth_ranges.size()) {
    throw Error{ErrorKind::InvalidArgument, "one depth range per camera is required"};
  }
  auto cams = json::array();
  for (size_t i = 0; i < set.cameras.size(); ++i) {
    const auto &cam = set.cameras[i];
    const auto K = cam.intr.matrix();
    auto k = json::array();
    auto r = json::array();
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) {
        k.push_back(K(row, col));
        r.push_back(cam.extr.R(row, col));
      }
    }
    const Vec3 t = convention == TranslationConvention::WorldOffset ? cam.extr.T : cam.center();
    cams.push_back({{"id", cam.id},
                    {"width", cam.width},
                    {"height", cam.height},
                    {"K", k},
                    {"R", r},
                    {"T", vec3_json(t)},
                    {"z_near", set.depth_ranges[i].z_near},
                    {"z_far", set.depth_ranges[i].z_far}});
  }
  const auto doc = json{{"format_version", kFormatVersion},
                        {"convention", std::string{to_string(convention)}},
                        {"cameras", cams}};
  return doc.dump(2) + "\n";
}

auto parse_circular_file(std::string_view text) -> std::pair<RectifiedRig, DepthRange> {
  const auto doc = parse_json(text);
  const auto root = Node{doc, ""};
  root.allow({"format_version", "shared", "cameras"});
  check_version(root);

  const auto shared = root.object("shared");
  shared.allow({"f_x", "f_y_common", "o_y", "r", "x_cen", "z_cen", "camera_height", "width",
                "height", "z_near", "z_far", "ox_policy"});
  auto rig = RectifiedRig{};
  rig.circle = {shared.real("x_cen"), shared.real("z_cen"), shared.real("r")};
  rig.common_fy = shared.real("f_y_common");
  rig.camera_height = shared.real("camera_height");
  try {
    rig.ox_policy = parse_ox_policy(shared.string("ox_policy"));
  } catch (const Error &e) {
    throw parse_error(shared.child_path("ox_policy"), e.what());
  }
  const auto fx = shared.real("f_x");
  const auto oy = shared.real("o_y");
  const auto width = shared.int32("width");
  const auto height = shared.int32("height");
  const auto range = DepthRange{shared.real("z_near"), shared.real("z_far")};
  if (!(fx > 0.0) || !(rig.circle.r > 0.0) || !(rig.common_fy > 0.0)) {
    throw parse_error("shared", "f_x, f_y_common and r must be positive");
  }

  const auto &cams = root.array("cameras");
  for (size_t i = 0; i < cams.size(); ++i) {
    const auto n = Node{cams[i], "cameras[" + std::to_string(i) + "]"};
    n.allow({"id", "o_x", "alpha"});
    auto c = CircularCameraParams{};
    c.id = n.int32("id");
    c.fx = fx;
    c.ox = n.real("o_x");
    c.oy = oy;
    c.alpha = n.real("alpha");
    c.r = rig.circle.r;
    c.width = width;
    c.height = height;
    rig.cameras.push_back(c);
    rig.full_params.push_back(circular_to_full(c, rig.circle, rig.common_fy, rig.camera_height));
  }
  rig.ox_target = {rig.circle.x_cen, rig.camera_height, rig.circle.z_cen};
  return {rig, range};
}

auto format_circular_file(const RectifiedRig &rig, const DepthRange &range) -> std::string {
  if (rig.cameras.empty()) {
    throw Error{ErrorKind::InvalidArgument, "rectified rig has no cameras"};
  }
  const auto &first = rig.cameras.front();
  for (const auto &c : rig.cameras) {
    if (c.fx != first.fx || c.oy != first.oy || c.r != first.r || c.width != first.width ||
        c.height != first.height) {
      throw Error{ErrorKind::InvalidArgument,
                  "circular file needs shared f_x, o_y, r and image size across cameras"};
    }
  }
  auto cams = json::array();
  for (const auto &c : rig.cameras) {
    cams.push_back({{"id", c.id}, {"o_x", c.ox}, {"alpha", c.alpha}});
  }
  const auto shared = json{{"f_x", first.fx},
                           {"f_y_common", rig.common_fy},
                           {"o_y", first.oy},
                           {"r", rig.circle.r},
                           {"x_cen", rig.circle.x_cen},
                           {"z_cen", rig.circle.z_cen},
                           {"camera_height", rig.camera_height},
                           {"width", first.width},
                           {"height", first.height},
                           {"z_near", range.z_near},
                           {"z_far", range.z_far},
                           {"ox_policy", std::string{to_string(rig.ox_policy)}}};
  const auto doc =
      json{{"format_version", kFormatVersion}, {"shared", shared}, {"cameras", cams}};
  return doc.dump(2) + "\n";
}

auto parse_rig_spec(std::string_view text) -> RigSpec {
  const auto doc = parse_json(text);
  return rig_spec_from(Node{doc, ""});
}

auto format_rig_spec(const RigSpec &spec) -> std::string { return rig_spec_json(spec).dump(2) + "\n"; }

auto parse_scene_spec(std::string_view text) -> SceneSpec {
  const auto doc = parse_json(text);
  return scene_spec_from(Node{doc, ""});
}

auto format_scene_spec(const SceneSpec &spec) -> std::string {
  return scene_spec_json(spec).dump(2) + "\n";
}

auto parse_experiment_config(std::string_view text, const std::filesystem::path &base_dir)
    -> ExperimentConfig {
  const auto doc = parse_json(text);
  const auto root = Node{doc, ""};
  root.allow({"sequence", "rig", "scene", "files", "pairs", "predictors", "ox_policy",
              "fill_holes"});
  auto config = ExperimentConfig{};
  if (root.has("sequence")) {
    config.sequence = root.string("sequence");
  }
  if (root.has("rig")) {
    config.rig = rig_spec_from(root.object("rig"));
  }
  if (root.has("scene")) {
    config.scene = scene_spec_from(root.object("scene"));
  }
  if (root.has("files")) {
    const auto f = root.object("files");
    f.allow({"cameras", "rectified", "circular", "views", "frame"});
    auto src = FileSource{};
    src.cameras = base_dir / f.string("cameras");
    if (f.has("rectified")) {
      src.rectified = base_dir / f.string("rectified");
    }
    if (f.has("circular")) {
      src.circular = base_dir / f.string("circular");
    }
    if (f.has("frame")) {
      src.frame = f.int32("frame");
    }
    const auto &views = f.array("views");
    for (size_t i = 0; i < views.size(); ++i) {
      const auto v = Node{views[i], f.child_path("views") + "[" + std::to_string(i) + "]"};
      v.allow({"id", "texture", "depth"});
      src.views.push_back({v.int32("id"), base_dir / v.string("texture"), base_dir / v.string("depth")});
    }
    config.files = src;
  }
  if (!config.files && !config.rig) {
    throw parse_error("", "config needs either 'files' or 'rig'");
  }
  if (root.has("pairs")) {
    const auto &pairs = root.array("pairs");
    for (size_t i = 0; i < pairs.size(); ++i) {
      const auto &p = pairs[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
          !p[1].is_number_integer()) {
        throw parse_error("pairs[" + std::to_string(i) + "]", "expected [index, index]");
      }
      config.pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
  }
  if (root.has("predictors")) {
    config.predictors.clear();
    const auto &preds = root.array("predictors");
    for (size_t i = 0; i < preds.size(); ++i) {
      if (!preds[i].is_string()) {
        throw parse_error("predictors[" + std::to_string(i) + "]", "expected a string");
      }
      try {
        config.predictors.push_back(parse_predictor(preds[i].get<std::string>()));
      } catch (const Error &e) {
        throw parse_error("predictors[" + std::to_string(i) + "]", e.what());
      }
    }
  }
  if (root.has("ox_policy")) {
    try {
      config.ox_policy = parse_ox_policy(root.string("ox_policy"));
    } catch (const Error &e) {
      throw parse_error("ox_policy", e.what());
    }
  }
  if (root.has("fill_holes")) {
    config.fill_holes = root.boolean("fill_holes");
  }
  return config;
}

auto format_experiment_config(const ExperimentConfig &config) -> std::string {
  auto doc = json{{"sequence", config.sequence}};
  if (config.rig) {
    doc["rig"] = rig_spec_json(*config.rig);
  }
  if (config.scene) {
    doc["scene"] = scene_spec_json(*config.scene);
  }
  if (config.files) {
    const auto &f = *config.files;
    auto views = json::array();
    for (const auto &v : f.views) {
      views.push_back({{"id", v.id}, {"texture", v.texture.string()}, {"depth", v.depth.string()}});
    }
    doc["files"] = {{"cameras", f.cameras.string()}, {"views", views}, {"frame", f.frame}};
    if (f.rectified) {
      doc["files"]["rectified"] = f.rectified->string();
    }
    if (f.circular) {
      doc["files"]["circular"] = f.circular->string();
    }
  }
  auto pairs = json::array();
  for (const auto &[a, b] : config.pairs) {
    pairs.push_back({a, b});
  }
  doc["pairs"] = pairs;
  auto preds = json::array();
  for (const auto p : config.predictors) {
    preds.push_back(std::string{to_string(p)});
  }
  doc["predictors"] = preds;
  doc["ox_policy"] = std::string{to_string(config.ox_policy)};
  doc["fill_holes"] = config.fill_holes;
  return doc.dump(2) + "\n";
}

auto read_text(const std::filesystem::path &path) -> std::string {
  auto in = std::ifstream{path, std::ios::binary};
  if (!in) {
    throw Error{ErrorKind::InvalidArgument, "cannot open " + path.string()};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path &path, std::string_view text) {
  auto out = std::ofstream{path, std::ios::binary};
  if (!out) {
    throw Error{ErrorKind::InvalidArgument, "cannot write " + path.string()};
  }
  out << text;
}

auto texture_frame_bytes(int width, int height) -> std::size_t {
  const auto w = static_cast<std::size_t>(width);
  const auto h = static_cast<std::size_t>(height);
  return w * h + 2 * (w / 2) * (h / 2);
}

auto depth_frame_bytes(int width, int height) -> std::size_t {
  return 2 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

auto read_texture_file(const std::filesystem::path &path, int width, int height)
    -> std::vector<TextureFrame> {
  check_dims(width, height);
  const auto frame_bytes = texture_frame_bytes(width, height);
  check_frame_multiple(path, byte_size(path), frame_bytes);
  const auto bytes = read_bytes(path);
  check_frame_multiple(path, bytes.size(), frame_bytes);

  auto frames = std::vector<TextureFrame>{};
  auto pos = bytes.begin();
  const auto read_plane = [&](Plane8 &plane) {
    std::copy_n(pos, plane.size(), plane.data().begin());
    pos += static_cast<std::ptrdiff_t>(plane.size());
  };
  for (std::size_t f = 0; f < bytes.size() / frame_bytes; ++f) {
    auto frame = TextureFrame{Plane8{width, height}, Plane8{width / 2, height / 2},
                              Plane8{width / 2, height / 2}};
    read_plane(frame.y);
    read_plane(frame.u);
    read_plane(frame.v);
    frames.push_back(std::move(frame));
  }
  return frames;
}

void write_texture_file(const std::filesystem::path &path, const std::vector<TextureFrame> &frames) {
  auto out = std::ofstream{path, std::ios::binary};
  if (!out) {
    throw Error{ErrorKind::InvalidArgument, "cannot write " + path.string()};
  }
  for (const auto &f : frames) {
    for (const auto *plane : {&f.y, &f.u, &f.v}) {
      out.write(reinterpret_cast<const char *>(plane->data().data()),
                static_cast<std::streamsize>(plane->size()));
    }
  }
}

auto read_depth_file(const std::filesystem::path &path, int width, int height)
    -> std::vector<Plane16> {
  check_dims(width, height);
  const auto frame_bytes = depth_frame_bytes(width, height);
  check_frame_multiple(path, byte_size(path), frame_bytes);
  const auto bytes = read_bytes(path);
  check_frame_multiple(path, bytes.size(), frame_bytes);

  auto frames = std::vector<Plane16>{};
  for (std::size_t f = 0; f < bytes.size() / frame_bytes; ++f) {
    auto plane = Plane16{width, height};
    const auto *p = bytes.data() + f * frame_bytes;
    for (std::size_t i = 0; i < plane.size(); ++i) {
      plane.data()[i] = static_cast<std::uint16_t>(p[2 * i] | (p[2 * i + 1] << 8U));
    }
    frames.push_back(std::move(plane));
  }
  return frames;
}

void write_depth_file(const std::filesystem::path &path, const std::vector<Plane16> &frames) {
  auto out = std::ofstream{path, std::ios::binary};
  if (!out) {
    throw Error{ErrorKind::InvalidArgument, "cannot write " + path.string()};
  }
  for (const auto &plane : frames) {
    auto buf = std::vector<char>(2 * plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) {
      buf[2 * i] = static_cast<char>(plane.data()[i] & 0xFFU);
      buf[2 * i + 1] = static_cast<char>(plane.data()[i] >> 8U);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

auto load_view_frame(const std::filesystem::path &texture, const std::filesystem::path &depth,
                     int width, int height, int frame_index, const DepthRange &range) -> ViewFrame {
  auto tex = read_texture_file(texture, width, height);
  auto dep = read_depth_file(depth, width, height);
  if (frame_index < 0 || static_cast<std::size_t>(frame_index) >= tex.size() ||
      static_cast<std::size_t>(frame_index) >= dep.size()) {
    throw Error{ErrorKind::InvalidArgument, "frame " + std::to_string(frame_index) +
                                                " not present in " + texture.string() + " / " +
                                                depth.string()};
  }
  auto frame = ViewFrame{};
  frame.luma = std::move(tex[static_cast<std::size_t>(frame_index)].y);
  frame.chroma_u = std::move(tex[static_cast<std::size_t>(frame_index)].u);
  frame.chroma_v = std::move(tex[static_cast<std::size_t>(frame_index)].v);
  frame.depth = std::move(dep[static_cast<std::size_t>(frame_index)]);
  frame.z_near = range.z_near;
  frame.z_far = range.z_far;
  validate(frame);
  return frame;
}

void save_view_frame(const ViewFrame &frame, const std::filesystem::path &texture,
                     const std::filesystem::path &depth) {
  validate(frame);
  write_texture_file(texture, {TextureFrame{frame.luma, frame.chroma_u, frame.chroma_v}});
  write_depth_file(depth, {frame.depth});
}

void write_report_csv(std::ostream &out, const ExperimentReport &report) {
  out << "# " << report.note << "\n";
  out << kCsvHeader << "\n";
  for (const auto &r : report.records) {
    out << r.sequence << ',' << r.pair << ',' << to_string(r.predictor) << ','
        << format_real(r.sse) << ',' << format_real(r.psnr_db) << ','
        << format_real(r.hole_fraction) << ',' << format_real(r.ns_per_point) << "\n";
  }
}

auto parse_report_csv(std::string_view text) -> std::vector<PredictionRecord> {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kCsvHeader) {
    throw Error{ErrorKind::ParseError, "report CSV must start with the header '" +
                                           std::string{kCsvHeader} + "'"};
  }
  auto records = std::vector<PredictionRecord>{};
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 7) {
      throw Error{ErrorKind::ParseError,
                  "report line " + std::to_string(i + 1) + ": expected 7 columns"};
    }
    auto r = PredictionRecord{};
    r.sequence = cells[0];
    r.pair = cells[1];
    r.predictor = parse_predictor(cells[2]);
    r.sse = parse_real(cells[3]);
    r.psnr_db = parse_real(cells[4]);
    r.hole_fraction = parse_real(cells[5]);
    r.ns_per_point = parse_real(cells[6]);
    records.push_back(r);
  }
  return records;
}

auto format_report_json(const ExperimentReport &report) -> std::string {
  auto records = json::array();
  for (const auto &r : report.records) {
    records.push_back({{"sequence", r.sequence},
                       {"pair", r.pair},
                       {"predictor", std::string{to_string(r.predictor)}},
                       {"sse", real_json(r.sse)},
                       {"pixel_count", r.pixel_count},
                       {"psnr_db", real_json(r.psnr_db)},
                       {"hole_fraction", real_json(r.hole_fraction)},
                       {"ns_per_point", real_json(r.ns_per_point)}});
  }
  auto config = json{};
  if (!report.config_json.empty()) {
    config = parse_json(report.config_json);
  }
  const auto doc = json{{"note", report.note}, {"config", config}, {"records", records}};
  return doc.dump(2) + "\n";
}

auto parse_report_json(std::string_view text) -> ExperimentReport {
  const auto doc = parse_json(text);
  const auto root = Node{doc, ""};
  root.allow({"note", "config", "records"});
  auto report = ExperimentReport{};
  report.note = root.string("note");
  if (!root.raw("config").is_null()) {
    report.config_json = root.raw("config").dump(2) + "\n";
  }
  const auto &records = root.array("records");
  for (size_t i = 0; i < records.size(); ++i) {
    const auto n = Node{records[i], "records[" + std::to_string(i) + "]"};
    n.allow({"sequence", "pair", "predictor", "sse", "pixel_count", "psnr_db", "hole_fraction",
             "ns_per_point"});
    auto r = PredictionRecord{};
    r.sequence = n.string("sequence");
    r.pair = n.string("pair");
    r.predictor = parse_predictor(n.string("predictor"));
    r.sse = real_from_json(n.raw("sse"), n.child_path("sse"));
    r.pixel_count = n.integer("pixel_count");
    r.psnr_db = real_from_json(n.raw("psnr_db"), n.child_path("psnr_db"));
    r.hole_fraction = real_from_json(n.raw("hole_fraction"), n.child_path("hole_fraction"));
    r.ns_per_point = real_from_json(n.raw("ns_per_point"), n.child_path("ns_per_point"));
    report.records.push_back(r);
  }
  return report;
}

auto parse_rd_curve(std::string_view text) -> RdCurve {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != "bitrate,psnr") {
    throw Error{ErrorKind::ParseError, "rate-distortion CSV must start with 'bitrate,psnr'"};
  }
  auto curve = RdCurve{};
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 2) {
      throw Error{ErrorKind::ParseError,
                  "rate-distortion line " + std::to_string(i + 1) + ": expected 2 columns"};
    }
    curve.points.push_back({parse_real(cells[0]), parse_real(cells[1])});
  }
  validate(curve);
  return curve;
}

void write_benchmark_csv(std::ostream &out, const BenchmarkRecord &r) {
  out << "n_points,repetitions,circular_ns,full_ns,full_precomputed_ns,ratio,precomputed_ratio,"
         "reduction_percent,reference_ratio,reference_reduction_percent\n";
  out << r.n_points << ',' << r.repetitions << ',' << format_real(r.circular_ns) << ','
      << format_real(r.full_ns) << ',' << format_real(r.full_precomputed_ns) << ','
      << format_real(r.ratio) << ',' << format_real(r.precomputed_ratio) << ','
      << format_real(r.reduction_percent) << ',' << format_real(kReferenceSpeedup) << ','
      << format_real(kReferenceReductionPercent) << "\n";
}

} // namespace circrect::io
