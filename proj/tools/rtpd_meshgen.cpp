// rtpd-meshgen: writes the procedural test meshes as OBJ or ASCII PLY.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "rtpd/shapes.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate closed test meshes"};

  std::string shape;
  std::string out;
  int subdivisions = 3;
  int grid = 1;
  double radius = 1.0;
  std::uint64_t seed = 7;

  app.add_option("shape", shape, "Mesh kind")->required()->check(CLI::IsMember({"icosphere", "box", "blob", "tetra"}));
  app.add_option("-o,--out", out, "Output path (.obj or .ply)")->required();
  app.add_option("--subdiv", subdivisions, "Subdivision level (icosphere, blob, tetra)")->check(CLI::Range(0, 9));
  app.add_option("--grid", grid, "Quads per box face edge")->check(CLI::Range(1, 4096));
  app.add_option("--radius", radius, "Icosphere radius")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Blob jitter seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "rtpd-meshgen: usage error: " << e.what() << '\n';
    return 1;
  }

  try {
    rtpd::TriangleMesh mesh;
    if (shape == "icosphere") {
      mesh = rtpd::shapes::icosphere(subdivisions, radius);
    } else if (shape == "box") {
      mesh = rtpd::shapes::box(grid);
    } else if (shape == "blob") {
      mesh = rtpd::shapes::blob(subdivisions, seed);
    } else {
      mesh = rtpd::shapes::tetrahedron();
      for (int i = 0; i < subdivisions; ++i) mesh = rtpd::shapes::subdivide(mesh);
    }
    rtpd::save_mesh(out, mesh);
  } catch (const std::exception& e) {
    std::cerr << "rtpd-meshgen: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
