#include "dfh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace dfh {

namespace {

// parity of the permutation sorting `v` ascending
template <std::size_t N>
int parity(std::array<int, N> v) {
  int s = 1;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      if (v[i] > v[j]) s = -s;
  return s;
}

template <std::size_t N>
std::array<int, N> sorted(std::array<int, N> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

int Mesh::num_entities(int dim) const {
  switch (dim) {
    case 0: return num_vertices();
    case 1: return num_edges();
    case 2: return num_faces();
    case 3: return num_cells();
  }
  throw std::invalid_argument("entity dimension out of range");
}

int Mesh::num_boundary_faces() const {
  int c = 0;
  for (const auto& a : adjacency) c += a.boundary();
  return c;
}

Vec3 Mesh::face_center(int f) const {
  const auto& v = faces[f];
  return (vertices[v[0]] + vertices[v[1]] + vertices[v[2]]) / 3.0;
}

Vec3 Mesh::face_normal(int f) const {
  const auto& v = faces[f];
  return (vertices[v[1]] - vertices[v[0]]).cross(vertices[v[2]] - vertices[v[0]]).normalized();
}

int Mesh::boundary_face_sign(int f) const {
  const auto& a = adjacency[f];
  return face_outward[a.plus][a.plus_local];
}

double Mesh::max_diameter() const { return *std::max_element(diameter.begin(), diameter.end()); }

void Mesh::report(std::ostream& os) const {
  os << "vertices " << num_vertices() << "\nedges " << num_edges() << "\nfaces " << num_faces()
     << " (boundary " << num_boundary_faces() << ")\ncells " << num_cells() << "\nh " << max_diameter() << "\n";
}

std::array<long long, 4> structured_box_counts(long long n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  long long V = (n + 1) * (n + 1) * (n + 1);
  long long E = 3 * n * (n + 1) * (n + 1) + 3 * n * n * (n + 1) + n * n * n;
  long long F = 6 * n * n * (n + 1) + 6 * n * n * n;
  long long C = 6 * n * n * n;
  return {V, E, F, C};
}

Mesh build_structured_box(int n, const Box& box) {
  if (n < 1) throw std::invalid_argument("build_structured_box: n must be >= 1");
  const Vec3 ext = box.hi - box.lo;
  if (!(ext.minCoeff() > 0)) throw std::invalid_argument("build_structured_box: degenerate box");

  Mesh m;
  const int np = n + 1;
  auto vid = [np](int i, int j, int k) { return i + np * (j + np * k); };
  m.vertices.resize(std::size_t(np) * np * np);
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        m.vertices[vid(i, j, k)] = box.lo + Vec3(ext.x() * i / n, ext.y() * j / n, ext.z() * k / n);

  // six monotone paths from the min corner to the max corner
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          int c[3] = {i, j, k};
          std::array<int, 4> t;
          t[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            t[s + 1] = vid(c[0], c[1], c[2]);
          }
          m.cells.push_back(sorted(t));
        }

  const long long V = m.num_vertices();
  std::unordered_map<long long, int> edge_id, face_id;
  const int C = m.num_cells();
  m.cell_edges.resize(C);
  m.cell_faces.resize(C);
  m.cell_edge_sign.resize(C);
  m.cell_face_sign.resize(C);
  m.volume.resize(C);
  m.orientation.resize(C);
  m.diameter.resize(C);
  m.face_outward.resize(C);

  for (int t = 0; t < C; ++t) {
    const auto& cv = m.cells[t];
    for (int e = 0; e < 6; ++e) {
      std::array<int, 2> loc{cv[kLocalEdges[e][0]], cv[kLocalEdges[e][1]]};
      auto key = sorted(loc);
      long long h = key[0] * V + key[1];
      auto [it, fresh] = edge_id.try_emplace(h, m.num_edges());
      if (fresh) m.edges.push_back(key);
      m.cell_edges[t][e] = it->second;
      m.cell_edge_sign[t][e] = parity(loc);
    }
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> loc{cv[kLocalFaces[f][0]], cv[kLocalFaces[f][1]], cv[kLocalFaces[f][2]]};
      auto key = sorted(loc);
      long long h = (key[0] * V + key[1]) * V + key[2];
      auto [it, fresh] = face_id.try_emplace(h, m.num_faces());
      if (fresh) {
        m.faces.push_back(key);
        std::array<int, 3> fe;
        std::array<int, 3> fs;
        const std::array<std::array<int, 2>, 3> sub{{{key[1], key[2]}, {key[0], key[2]}, {key[0], key[1]}}};
        const int bsign[3] = {1, -1, 1};
        for (int s = 0; s < 3; ++s) {
          fe[s] = edge_id.at(sub[s][0] * V + sub[s][1]);
          fs[s] = bsign[s];
        }
        m.face_edges.push_back(fe);
        m.face_edge_sign.push_back(fs);
      }
      m.cell_faces[t][f] = it->second;
      m.cell_face_sign[t][f] = parity(loc);
    }

    const Vec3& x0 = m.vertices[cv[0]];
    Eigen::Matrix3d J;
    J.col(0) = m.vertices[cv[1]] - x0;
    J.col(1) = m.vertices[cv[2]] - x0;
    J.col(2) = m.vertices[cv[3]] - x0;
    double det = J.determinant();
    if (!(std::abs(det) > 0)) throw std::runtime_error("build_structured_box: degenerate cell");
    m.orientation[t] = det > 0 ? 1 : -1;
    m.volume[t] = std::abs(det) / 6.0;
    double h = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) h = std::max(h, (m.vertices[cv[a]] - m.vertices[cv[b]]).norm());
    m.diameter[t] = h;
    for (int f = 0; f < 4; ++f) {
      const auto& lf = kLocalFaces[f];
      const Vec3& a = m.vertices[cv[lf[0]]];
      Vec3 nrm = (m.vertices[cv[lf[1]]] - a).cross(m.vertices[cv[lf[2]]] - a);
      const Vec3& opp = m.vertices[cv[3 - f]];
      m.face_outward[t][f] = nrm.dot(a - opp) > 0 ? 1 : -1;
    }
  }

  m.area.resize(m.num_faces());
  for (int f = 0; f < m.num_faces(); ++f) {
    const auto& v = m.faces[f];
    m.area[f] = 0.5 * (m.vertices[v[1]] - m.vertices[v[0]]).cross(m.vertices[v[2]] - m.vertices[v[0]]).norm();
  }
  m.adjacency = facet_adjacency(m);
  return m;
}

std::vector<FaceAdjacency> facet_adjacency(const Mesh& mesh) {
  std::vector<FaceAdjacency> adj(mesh.num_faces());
  std::vector<int> count(mesh.num_faces(), 0);
  for (int t = 0; t < mesh.num_cells(); ++t)
    for (int i = 0; i < 4; ++i) {
      int f = mesh.cell_faces[t][i];
      auto& a = adj[f];
      switch (count[f]++) {
        case 0: a.plus = t; a.plus_local = i; break;
        case 1: a.minus = t; a.minus_local = i; break;
        default: throw std::runtime_error("facet_adjacency: face " + std::to_string(f) + " has more than two cells");
      }
    }
  for (auto& a : adj) {
    if (a.minus >= 0 && mesh.face_outward[a.plus][a.plus_local] < 0) {
      std::swap(a.plus, a.minus);
      std::swap(a.plus_local, a.minus_local);
    }
  }
  return adj;
}

bool BoundaryPartition::in_closure(int dim, int id, int gamma) const {
  const auto& tab = dim == 0 ? vertex_in : dim == 1 ? edge_in : face_in;
  return tab[gamma - 1][id] != 0;
}

int BoundaryPartition::owner(int dim, int id, int essential) const {
  bool a = in_closure(dim, id, 1), b = in_closure(dim, id, 2);
  if (a && b) return essential;
  return a ? 1 : b ? 2 : 0;
}

BoundaryPartition tag_boundary(const Mesh& mesh, const FacePredicate& gamma1) {
  BoundaryPartition bp;
  bp.face_tag.assign(mesh.num_faces(), 0);
  for (int g = 0; g < 2; ++g) {
    bp.vertex_in[g].assign(mesh.num_vertices(), 0);
    bp.edge_in[g].assign(mesh.num_edges(), 0);
    bp.face_in[g].assign(mesh.num_faces(), 0);
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (!mesh.is_boundary_face(f)) continue;
    int g = gamma1(mesh.face_center(f)) ? 1 : 2;
    bp.face_tag[f] = g;
    (g == 1 ? bp.gamma1_faces : bp.gamma2_faces).push_back(f);
    bp.face_in[g - 1][f] = 1;
    for (int v : mesh.faces[f]) bp.vertex_in[g - 1][v] = 1;
    for (int e : mesh.face_edges[f]) bp.edge_in[g - 1][e] = 1;
  }
  return bp;
}

FacePredicate gamma1_predicate(const std::string& name, const Box& box) {
  if (name == "all") return [](const Vec3&) { return true; };
  if (name == "none") return [](const Vec3&) { return false; };
  if (name == "lower") {
    double tol = 1e-10 * (box.hi - box.lo).maxCoeff();
    return [box, tol](const Vec3& c) {
      for (int d = 0; d < 3; ++d)
        if (std::abs(c[d] - box.lo[d]) < tol) return true;
      return false;
    };
  }
  throw std::invalid_argument("unknown gamma1 predicate '" + name + "'");
}

}  // namespace dfh
