#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dfh {

using Vec3 = Eigen::Vector3d;

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
};

// Facet neighbours. plus is the cell whose canonical face normal points
// outward; on boundary faces the single cell sits in plus regardless.
struct FaceAdjacency {
  int plus = -1, plus_local = -1;
  int minus = -1, minus_local = -1;
  bool boundary() const { return minus < 0; }
};

// Local entity tables for a tet with vertices 0..3 in ascending global order.
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
inline constexpr std::array<std::array<int, 3>, 4> kLocalFaces{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
// local edges of each local face, ordered as (v1v2, v0v2, v0v1) of the face,
// i.e. in the order of the boundary terms [j,k] - [i,k] + [i,j]
inline constexpr std::array<std::array<int, 3>, 4> kFaceEdges{{{3, 1, 0}, {4, 2, 0}, {5, 2, 1}, {5, 4, 3}}};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> cells;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<int, 2>> edges;

  std::vector<std::array<int, 4>> cell_faces;
  std::vector<std::array<int, 6>> cell_edges;
  std::vector<std::array<int, 3>> face_edges;
  // parity of the cell-local vertex order against the canonical one
  std::vector<std::array<int, 4>> cell_face_sign;
  std::vector<std::array<int, 6>> cell_edge_sign;
  // boundary-operator sign of each edge in its face
  std::vector<std::array<int, 3>> face_edge_sign;

  std::vector<double> volume;      // positive
  std::vector<int> orientation;    // sign of det(x1-x0, x2-x0, x3-x0)
  std::vector<double> diameter;    // h_T
  std::vector<double> area;
  // +1 if the canonical right-hand normal of local face i points out of cell T
  std::vector<std::array<int, 4>> face_outward;
  std::vector<FaceAdjacency> adjacency;

  int num_vertices() const { return int(vertices.size()); }
  int num_edges() const { return int(edges.size()); }
  int num_faces() const { return int(faces.size()); }
  int num_cells() const { return int(cells.size()); }
  int num_entities(int dim) const;
  int num_boundary_faces() const;
  bool is_boundary_face(int f) const { return adjacency[f].boundary(); }

  Vec3 face_center(int f) const;
  Vec3 face_normal(int f) const;  // unit, canonical right-hand
  // outward sign of the canonical normal for a boundary face
  int boundary_face_sign(int f) const;
  double max_diameter() const;

  void report(std::ostream& os) const;
};

Mesh build_structured_box(int n, const Box& box = Box{});

// Counts of a Kuhn-split n^3 box without building it: {V, E, F, C}.
std::array<long long, 4> structured_box_counts(long long n);

std::vector<FaceAdjacency> facet_adjacency(const Mesh& mesh);

struct BoundaryPartition {
  std::vector<int> gamma1_faces, gamma2_faces;
  // per-face tag: 0 interior, 1 or 2
  std::vector<int> face_tag;
  // closure membership, indexed [partition-1][entity]
  std::array<std::vector<char>, 2> vertex_in, edge_in, face_in;

  bool in_closure(int dim, int id, int gamma) const;
  // 0 if the entity lies on no boundary partition, otherwise 1 or 2 with
  // entities in both closures sent to `essential`
  int owner(int dim, int id, int essential) const;
};

using FacePredicate = std::function<bool(const Vec3&)>;

BoundaryPartition tag_boundary(const Mesh& mesh, const FacePredicate& gamma1);

// predicates by name: "lower" (x=0, y=0 or z=0 planes of the box), "all", "none"
FacePredicate gamma1_predicate(const std::string& name, const Box& box = Box{});

}  // namespace dfh
