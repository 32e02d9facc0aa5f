#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "simpl/errors.hpp"
#include "simpl/scene.hpp"

namespace simpl {
namespace {

DesignConfig box_config(std::uint64_t seed) {
  DesignConfig c = test::airliner_config(seed);
  c.mesh_paths = {"box.obj", "slab.obj"};
  c.size_mean = {60, 30};
  c.size_std = 8;
  return c;
}

std::shared_ptr<const std::vector<Mesh>> box_meshes() {
  return std::make_shared<const std::vector<Mesh>>(
      std::vector<Mesh>{test::box_mesh(20, 10, 4), test::box_mesh(12, 12, 1, "slab")});
}

std::shared_ptr<const RasterImage> ground(int side, double gsd) {
  return std::make_shared<const RasterImage>(test::flat_background(side, side, 128, gsd, 1));
}

void expect_valid_layout(const Scene& s) {
  const Box2 tile{0, 0, s.width_m(), s.height_m()};
  for (std::size_t i = 0; i < s.instances.size(); ++i) {
    EXPECT_TRUE(contains(tile, s.instances[i].world_footprint)) << i;
    for (std::size_t j = i + 1; j < s.instances.size(); ++j) {
      EXPECT_FALSE(intersects(s.instances[i].world_footprint, s.instances[j].world_footprint))
          << i << " vs " << j;
    }
  }
}

TEST(TargetInstanceCount, Rounds) {
  EXPECT_EQ(target_instance_count(120, 1.0), 120u);
  EXPECT_EQ(target_instance_count(120, 0.25), 30u);
  EXPECT_EQ(target_instance_count(120, 0.9998), 120u);
  EXPECT_EQ(target_instance_count(120, 0.0), 0u);
}

TEST(BuildScene, SquareKilometre) {
  const Scene s = build_scene(box_config(1), 0, box_meshes(), ground(3333, 0.3));
  EXPECT_EQ(s.instances.size(), 120u);
  expect_valid_layout(s);
}

TEST(BuildScene, QuarterSquareKilometre) {
  const Scene s = build_scene(box_config(2), 0, box_meshes(), ground(1667, 0.3));
  EXPECT_EQ(s.instances.size(), 30u);
  expect_valid_layout(s);
}

TEST(BuildScene, InfeasiblePlacementFails) {
  DesignConfig c = box_config(3);
  c.size_mean = {200 / 0.3, 20 / 0.3};
  c.size_std = 0;
  c.density = 1000;
  try {
    build_scene(c, 0, box_meshes(), ground(334, 0.3));
    FAIL() << "expected a generation error";
  } catch (const GenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("placed 0 of"), std::string::npos) << e.what();
  }
}

TEST(BuildSceneProperty, Deterministic) {
  const DesignConfig c = box_config(4);
  const Scene a = build_scene(c, 5, box_meshes(), ground(1200, 0.3));
  const Scene b = build_scene(c, 5, box_meshes(), ground(1200, 0.3));
  ASSERT_EQ(a.instances.size(), b.instances.size());
  EXPECT_EQ(a.solar, b.solar);
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    EXPECT_EQ(a.instances[i].props, b.instances[i].props);
    EXPECT_EQ(a.instances[i].pose.position, b.instances[i].pose.position);
    EXPECT_EQ(a.instances[i].pose.scale, b.instances[i].pose.scale);
  }
  const Scene other = build_scene(c, 6, box_meshes(), ground(1200, 0.3));
  EXPECT_FALSE(other.instances.at(0).pose.position == a.instances.at(0).pose.position);
}

TEST(BuildSceneProperty, LayoutInvariantsAcrossSeeds) {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    DesignConfig c = box_config(seed);
    c.density = 400;  // crowded, to exercise rejection
    const Scene s = build_scene(c, seed, box_meshes(), ground(1000, 0.3));
    EXPECT_EQ(s.instances.size(), target_instance_count(c.density, s.area_km2()));
    expect_valid_layout(s);
    for (const auto& inst : s.instances) {
      const Footprint f = footprint_extent((*s.meshes)[inst.mesh_ref], inst.pose);
      EXPECT_NEAR(f.rect.center.x, inst.world_footprint.center.x, 1e-9);
      EXPECT_NEAR(f.rect.center.y, inst.world_footprint.center.y, 1e-9);
      EXPECT_EQ(inst.mesh_ref, inst.props.mesh_choice);
    }
  }
}

TEST(BuildScene, RejectsMismatchedMeshList) {
  DesignConfig c = box_config(1);
  c.mesh_paths = {"only_one.obj"};
  EXPECT_THROW(build_scene(c, 0, box_meshes(), ground(500, 0.3)), ValidationError);
}

TEST(ProjectedBox, MatchesFootprintBounds) {
  const Scene s = build_scene(box_config(7), 0, box_meshes(), ground(1000, 0.3));
  for (const auto& inst : s.instances) {
    const Box2 px = projected_box_px(s, inst);
    const Box2 m = inst.world_footprint.bounds();
    EXPECT_NEAR(px.min_x, m.min_x / s.gsd, 1e-6);
    EXPECT_NEAR(px.max_y, m.max_y / s.gsd, 1e-6);
  }
}

}  // namespace
}  // namespace simpl
