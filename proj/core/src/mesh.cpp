#include "simpl/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "simpl/errors.hpp"

namespace simpl {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string context(const std::string& name, std::size_t line_no) {
  return name + ":" + std::to_string(line_no) + ": ";
}

double parse_coord(std::string_view token, const std::string& ctx) {
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw MeshFormatError(ctx + "invalid coordinate '" + std::string(token) + "'");
  }
  return value;
}

// OBJ face tokens look like `i`, `i/t`, `i//n` or `i/t/n`; only `i` matters.
long parse_face_index(std::string_view token, const std::string& ctx) {
  const auto slash = token.find('/');
  const std::string_view head = token.substr(0, slash);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
  if (ec != std::errc{} || ptr != head.data() + head.size() || value == 0) {
    throw MeshFormatError(ctx + "invalid face index '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

Box2 Mesh::plan_bounds() const {
  Box2 b{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
         std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Vec3& v : vertices) {
    b.min_x = std::min(b.min_x, v.x);
    b.min_y = std::min(b.min_y, v.y);
    b.max_x = std::max(b.max_x, v.x);
    b.max_y = std::max(b.max_y, v.y);
  }
  return b;
}

Mesh parse_obj(std::string_view text, std::string name, std::vector<std::string>* warnings) {
  Mesh mesh;
  mesh.name = std::move(name);
  // Faces are resolved after all vertices are read; OBJ allows either order
  // but negative (relative) indices refer to vertices seen so far.
  struct PendingFace {
    std::vector<long> indices;
    std::size_t line_no;
  };
  std::vector<PendingFace> faces;
  std::vector<std::string> skipped;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::string ctx = context(mesh.name, line_no);
    if (tokens[0] == "v") {
      if (tokens.size() < 4) {
        throw MeshFormatError(ctx + "vertex record needs three coordinates");
      }
      mesh.vertices.push_back({parse_coord(tokens[1], ctx), parse_coord(tokens[2], ctx),
                               parse_coord(tokens[3], ctx)});
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) {
        throw MeshFormatError(ctx + "face record needs at least three vertices");
      }
      PendingFace face{{}, line_no};
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        long idx = parse_face_index(tokens[i], ctx);
        if (idx < 0) idx = static_cast<long>(mesh.vertices.size()) + idx + 1;
        face.indices.push_back(idx);
      }
      faces.push_back(std::move(face));
    } else if (std::find(skipped.begin(), skipped.end(), tokens[0]) == skipped.end()) {
      skipped.emplace_back(tokens[0]);
    }
    if (end == text.size()) break;
  }

  for (const auto& face : faces) {
    for (long idx : face.indices) {
      if (idx < 1 || idx > static_cast<long>(mesh.vertices.size())) {
        throw MeshIndexError(context(mesh.name, face.line_no) + "face references vertex " +
                             std::to_string(idx) + " but only " +
                             std::to_string(mesh.vertices.size()) + " vertices exist");
      }
    }
    for (std::size_t k = 1; k + 1 < face.indices.size(); ++k) {
      mesh.triangles.push_back({static_cast<std::uint32_t>(face.indices[0] - 1),
                                static_cast<std::uint32_t>(face.indices[k] - 1),
                                static_cast<std::uint32_t>(face.indices[k + 1] - 1)});
    }
  }
  if (mesh.triangles.empty()) {
    throw MeshFormatError(mesh.name + ": mesh contains no faces");
  }

  double min_z = std::numeric_limits<double>::max();
  for (const Vec3& v : mesh.vertices) min_z = std::min(min_z, v.z);
  for (Vec3& v : mesh.vertices) v.z -= min_z;

  if (warnings != nullptr) {
    for (const auto& record : skipped) {
      warnings->push_back(mesh.name + ": ignored unsupported OBJ record type '" + record + "'");
    }
  }
  return mesh;
}

Mesh load_mesh(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open mesh file '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_obj(text.str(), path.string(), warnings);
}

PlacementTransform::PlacementTransform(const Mesh& mesh, const Pose& pose)
    : position_(pose.position), scale_(pose.scale) {
  const Box2 plan = mesh.plan_bounds();
  pivot_ = {0.5 * (plan.min_x + plan.max_x), 0.5 * (plan.min_y + plan.max_y)};
  const double h = deg_to_rad(pose.heading_deg);
  cos_ = std::cos(h);
  sin_ = std::sin(h);
}

Vec3 PlacementTransform::apply(const Vec3& p) const {
  const double sx = (p.x - pivot_.x) * scale_.x;
  const double sy = (p.y - pivot_.y) * scale_.y;
  return {position_.x + cos_ * sx - sin_ * sy, position_.y + sin_ * sx + cos_ * sy, p.z * scale_.z};
}

Vec3 transform_point(const Mesh& mesh, const Pose& pose, const Vec3& p) {
  return PlacementTransform(mesh, pose).apply(p);
}

Footprint footprint_extent(const Mesh& mesh, const Pose& pose) {
  const Box2 plan = mesh.plan_bounds();
  const double h = deg_to_rad(pose.heading_deg);
  const double c = std::cos(h);
  const double s = std::sin(h);
  const double cx = 0.5 * (plan.min_x + plan.max_x);
  const double cy = 0.5 * (plan.min_y + plan.max_y);

  double min_x = std::numeric_limits<double>::max();
  double min_y = std::numeric_limits<double>::max();
  double max_x = std::numeric_limits<double>::lowest();
  double max_y = std::numeric_limits<double>::lowest();
  for (const Vec3& v : mesh.vertices) {
    const double sx = (v.x - cx) * pose.scale.x;
    const double sy = (v.y - cy) * pose.scale.y;
    const double wx = c * sx - s * sy;
    const double wy = s * sx + c * sy;
    min_x = std::min(min_x, wx);
    max_x = std::max(max_x, wx);
    min_y = std::min(min_y, wy);
    max_y = std::max(max_y, wy);
  }

  Footprint fp;
  fp.extent_x = max_x - min_x;
  fp.extent_y = max_y - min_y;
  fp.rect.center = pose.position;
  fp.rect.axis = {c, s};
  fp.rect.half_length = 0.5 * plan.width() * pose.scale.x;
  fp.rect.half_width = 0.5 * plan.height() * pose.scale.y;
  return fp;
}

Vec3 size_to_scale(const Mesh& mesh, const SizePx& target, double gsd) {
  if (!(target.length > 0.0 && target.width > 0.0)) {
    throw ValidationError("target size components must be > 0");
  }
  const Box2 plan = mesh.plan_bounds();
  const double model_length = plan.width();
  const double model_width = plan.height();
  if (!(model_length > 0.0) || !(model_width > 0.0)) {
    throw ValidationError("mesh '" + mesh.name + "' has a degenerate (zero-extent) footprint");
  }
  const double sx = target.length * gsd / model_length;
  const double sy = target.width * gsd / model_width;
  return {sx, sy, std::sqrt(sx * sy)};
}

}  // namespace simpl
