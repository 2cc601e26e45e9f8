// Copyright 2026 The FunGrasp Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fungrasp/object.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fungrasp/error.h"

namespace fungrasp {

ObjectModel MakeObjectModel(std::string name, Eigen::Matrix3Xd points,
                            Eigen::Matrix3Xd normals) {
  if (points.cols() < kMinObjectPoints) {
    throw InputError("object '" + name + "': " + std::to_string(points.cols()) +
                     " points, at least " + std::to_string(kMinObjectPoints) +
                     " required");
  }
  if (!points.allFinite()) {
    throw InputError("object '" + name + "': non-finite point coordinates");
  }
  ObjectModel obj;
  obj.name = std::move(name);
  if (normals.cols() == 0) {
    normals = EstimateNormals(points);
    obj.normals_estimated = true;
  }
  if (normals.cols() != points.cols()) {
    throw InputError("object '" + obj.name + "': normal count mismatch");
  }
  if (!normals.allFinite()) {
    throw InputError("object '" + obj.name + "': non-finite normals");
  }
  for (Eigen::Index i = 0; i < normals.cols(); ++i) {
    const double n = normals.col(i).norm();
    if (n < 1e-12) {
      throw InputError("object '" + obj.name + "': zero normal at point " +
                       std::to_string(i));
    }
    normals.col(i) /= n;
  }
  const double min_z = points.row(2).minCoeff();
  points.row(2).array() -= min_z;
  obj.points = std::move(points);
  obj.normals = std::move(normals);
  obj.centroid = obj.points.rowwise().mean();
  obj.bb_min = obj.points.rowwise().minCoeff();
  obj.bb_max = obj.points.rowwise().maxCoeff();
  obj.bb_edges = obj.bb_max - obj.bb_min;
  obj.obj_bb = obj.bb_edges.maxCoeff();
  return obj;
}

Eigen::Matrix3Xd EstimateNormals(const Eigen::Matrix3Xd& points, int k) {
  const Eigen::Index n = points.cols();
  const Vec3 centroid = points.rowwise().mean();
  Eigen::Matrix3Xd normals(3, n);
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<size_t>(n));
  const int kk = static_cast<int>(std::min<Eigen::Index>(k, n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      dist[static_cast<size_t>(j)] = {(points.col(j) - points.col(i)).squaredNorm(), j};
    }
    std::partial_sort(dist.begin(), dist.begin() + kk + 1, dist.end());
    Vec3 mean = Vec3::Zero();
    for (int m = 0; m <= kk; ++m) mean += points.col(dist[static_cast<size_t>(m)].second);
    mean /= (kk + 1);
    Mat3 cov = Mat3::Zero();
    for (int m = 0; m <= kk; ++m) {
      const Vec3 d = points.col(dist[static_cast<size_t>(m)].second) - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
    Vec3 normal = solver.eigenvectors().col(0);
    if (normal.dot(points.col(i) - centroid) < 0.0) normal = -normal;
    normals.col(i) = normal;
  }
  return normals;
}

ObjectModel LoadObject(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  const std::string ctx = path.string();
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw InputError(ctx + ": not a PLY file");

  struct Element {
    std::string name;
    long count = 0;
    std::vector<std::string> props;
  };
  std::vector<Element> elements;
  int line_no = 1;
  bool ascii = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      ascii = fmt == "ascii";
    } else if (tok == "element") {
      Element e;
      ls >> e.name >> e.count;
      if (!ls || e.count < 0) {
        throw InputError(ctx + ":" + std::to_string(line_no) + ": bad element line");
      }
      elements.push_back(e);
    } else if (tok == "property") {
      if (elements.empty()) {
        throw InputError(ctx + ":" + std::to_string(line_no) +
                         ": property before element");
      }
      std::string type, name;
      ls >> type;
      if (type == "list") {
        std::string a, b;
        ls >> a >> b >> name;
      } else {
        ls >> name;
      }
      elements.back().props.push_back(name);
    } else if (tok == "end_header") {
      break;
    }
  }
  if (!ascii) throw InputError(ctx + ": only ASCII PLY is supported");

  Eigen::Matrix3Xd points, normals;
  bool found_vertex = false;
  for (const Element& e : elements) {
    if (e.name != "vertex") {
      for (long i = 0; i < e.count; ++i) {
        std::getline(in, line);
        ++line_no;
      }
      continue;
    }
    found_vertex = true;
    auto find = [&](const std::string& p) {
      auto it = std::find(e.props.begin(), e.props.end(), p);
      return it == e.props.end() ? -1 : static_cast<int>(it - e.props.begin());
    };
    const int ix = find("x"), iy = find("y"), iz = find("z");
    const int inx = find("nx"), iny = find("ny"), inz = find("nz");
    if (ix < 0 || iy < 0 || iz < 0) {
      throw InputError(ctx + ": vertex element lacks x/y/z properties");
    }
    const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;
    points.resize(3, e.count);
    if (has_normals) normals.resize(3, e.count);
    std::vector<double> values(e.props.size());
    for (long i = 0; i < e.count; ++i) {
      if (!std::getline(in, line)) {
        throw InputError(ctx + ": unexpected end of file in vertex " +
                         std::to_string(i));
      }
      ++line_no;
      std::istringstream ls(line);
      for (size_t p = 0; p < values.size(); ++p) {
        std::string tok;
        if (!(ls >> tok)) {
          throw InputError(ctx + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(values.size()) + " values");
        }
        try {
          values[p] = std::stod(tok);
        } catch (const std::exception&) {
          throw InputError(ctx + ":" + std::to_string(line_no) +
                           ": bad number '" + tok + "' for property '" +
                           e.props[p] + "'");
        }
        if (!std::isfinite(values[p])) {
          throw InputError(ctx + ":" + std::to_string(line_no) +
                           ": non-finite value for property '" + e.props[p] + "'");
        }
      }
      points.col(i) = Vec3(values[static_cast<size_t>(ix)], values[static_cast<size_t>(iy)],
                           values[static_cast<size_t>(iz)]);
      if (has_normals) {
        normals.col(i) = Vec3(values[static_cast<size_t>(inx)], values[static_cast<size_t>(iny)],
                              values[static_cast<size_t>(inz)]);
      }
    }
    break;
  }
  if (!found_vertex) throw InputError(ctx + ": no vertex element");
  return MakeObjectModel(path.stem().string(), std::move(points), std::move(normals));
}

void SaveObjectPly(const ObjectModel& obj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << "ply\nformat ascii 1.0\ncomment " << obj.name << "\nelement vertex "
      << obj.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n"
         "property double nx\nproperty double ny\nproperty double nz\n"
         "end_header\n";
  out.precision(17);
  for (int i = 0; i < obj.size(); ++i) {
    const auto p = obj.points.col(i);
    const auto n = obj.normals.col(i);
    out << p[0] << ' ' << p[1] << ' ' << p[2] << ' ' << n[0] << ' ' << n[1]
        << ' ' << n[2] << '\n';
  }
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

std::vector<ObjectModel> LoadObjectDir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InputError("object directory '" + dir.string() + "' does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ply") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw InputError("object directory '" + dir.string() + "' has no .ply files");
  }
  std::vector<ObjectModel> out;
  for (const auto& f : files) out.push_back(LoadObject(f));
  return out;
}

ObjectModel ScaleObject(const ObjectModel& obj, double scale) {
  ObjectModel out = obj;
  out.points *= scale;
  out.centroid *= scale;
  out.bb_min *= scale;
  out.bb_max *= scale;
  out.bb_edges *= scale;
  out.obj_bb *= scale;
  return out;
}

AffordanceDistribution ComputeAffordance(const ObjectModel& obj,
                                         const AffordanceParams& params) {
  AffordanceDistribution dist;
  dist.params = params;
  dist.weights = VecX::Zero(obj.size());
  int eligible = 0;
  for (int i = 0; i < obj.size(); ++i) {
    const Vec3 p = obj.points.col(i);
    if (p.z() < params.h_min) continue;
    ++eligible;
    const Vec3 n = obj.normals.col(i);
    Vec3 outward(p.x() - obj.centroid.x(), p.y() - obj.centroid.y(), 0.0);
    const double len = outward.norm();
    outward = len > 1e-12 ? Vec3(outward / len) : Vec3::Zero();
    const double score = params.up_weight * n.z() +
                         (1.0 - params.up_weight) * n.dot(outward);
    dist.weights[i] = score > 0.0 ? std::pow(score, params.beta) : 0.0;
  }
  if (eligible == 0) {
    throw InputError("object '" + obj.name + "': every point lies below h_min = " +
                     std::to_string(params.h_min) + " m");
  }
  const double total = dist.weights.sum();
  if (!(total > 0.0)) {
    dist.uniform_fallback = true;
    for (int i = 0; i < obj.size(); ++i) {
      dist.weights[i] = obj.points(2, i) >= params.h_min ? 1.0 / eligible : 0.0;
    }
  } else {
    dist.weights /= total;
  }
  return dist;
}

AffordanceSample SampleAffordance(const AffordanceDistribution& dist,
                                  const ObjectModel& obj, Rng& rng) {
  const double u = Uniform01(rng);
  double acc = 0.0;
  int last_positive = 0;
  for (Eigen::Index i = 0; i < dist.weights.size(); ++i) {
    if (dist.weights[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += dist.weights[i];
    if (u < acc) return {static_cast<int>(i), obj.points.col(i)};
  }
  // Rounding left u above the accumulated mass.
  return {last_positive, obj.points.col(last_positive)};
}

std::vector<int> FarthestPointSample(const Eigen::Matrix3Xd& points, int count,
                                     std::uint64_t seed) {
  const int n = static_cast<int>(points.cols());
  if (count > n) {
    throw std::invalid_argument("farthest point sampling: requested " +
                                std::to_string(count) + " of " +
                                std::to_string(n) + " points");
  }
  std::vector<int> out;
  if (count <= 0) return out;
  out.reserve(static_cast<size_t>(count));
  std::vector<double> min_d(static_cast<size_t>(n),
                            std::numeric_limits<double>::infinity());
  int current = static_cast<int>(SplitMix64(seed) % static_cast<std::uint64_t>(n));
  for (int m = 0; m < count; ++m) {
    out.push_back(current);
    min_d[static_cast<size_t>(current)] = -1.0;
    int next = -1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      double& d = min_d[static_cast<size_t>(i)];
      if (d < 0.0) continue;
      d = std::min(d, (points.col(i) - points.col(current)).squaredNorm());
      if (d > best) {
        best = d;
        next = i;
      }
    }
    if (next < 0) break;
    current = next;
  }
  return out;
}

namespace {

struct CloudBuilder {
  std::vector<Vec3> p, n;

  void Add(const Vec3& point, const Vec3& normal) {
    p.push_back(point);
    n.push_back(normal.normalized());
  }

  // Keeps points for which `keep` holds.
  void Filter(const std::function<bool(const Vec3&)>& keep, size_t begin) {
    std::vector<Vec3> p2(p.begin(), p.begin() + static_cast<long>(begin));
    std::vector<Vec3> n2(n.begin(), n.begin() + static_cast<long>(begin));
    for (size_t i = begin; i < p.size(); ++i) {
      if (keep(p[i])) {
        p2.push_back(p[i]);
        n2.push_back(n[i]);
      }
    }
    p.swap(p2);
    n.swap(n2);
  }

  ObjectModel Build(const std::string& name) const {
    Eigen::Matrix3Xd pts(3, static_cast<Eigen::Index>(p.size()));
    Eigen::Matrix3Xd nrm(3, static_cast<Eigen::Index>(n.size()));
    for (size_t i = 0; i < p.size(); ++i) {
      pts.col(static_cast<Eigen::Index>(i)) = p[i];
      nrm.col(static_cast<Eigen::Index>(i)) = n[i];
    }
    return MakeObjectModel(name, std::move(pts), std::move(nrm));
  }
};

int Cells(double extent, double spacing) {
  return std::max(2, static_cast<int>(std::ceil(extent / spacing)));
}

// Axis-aligned box surface with cell-centred samples.
void AddBox(CloudBuilder& b, const Vec3& lo, const Vec3& hi, double spacing) {
  const Vec3 size = hi - lo;
  for (int axis = 0; axis < 3; ++axis) {
    const int u_axis = (axis + 1) % 3, v_axis = (axis + 2) % 3;
    const int nu = Cells(size[u_axis], spacing), nv = Cells(size[v_axis], spacing);
    for (int side = 0; side < 2; ++side) {
      Vec3 normal = Vec3::Zero();
      normal[axis] = side == 0 ? -1.0 : 1.0;
      for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
          Vec3 p;
          p[axis] = side == 0 ? lo[axis] : hi[axis];
          p[u_axis] = lo[u_axis] + (i + 0.5) / nu * size[u_axis];
          p[v_axis] = lo[v_axis] + (j + 0.5) / nv * size[v_axis];
          b.Add(p, normal);
        }
      }
    }
  }
}

void AddCylinder(CloudBuilder& b, const Vec3& base, double radius,
                 double height, double spacing) {
  const int rings = Cells(height, spacing);
  const int around = Cells(2.0 * M_PI * radius, spacing);
  for (int i = 0; i < rings; ++i) {
    const double z = (i + 0.5) / rings * height;
    for (int k = 0; k < around; ++k) {
      const double a = 2.0 * M_PI * (k + (i % 2) * 0.5) / around;
      const Vec3 n(std::cos(a), std::sin(a), 0.0);
      b.Add(base + radius * n + Vec3(0, 0, z), n);
    }
  }
  const int caps = Cells(radius, spacing);
  for (int side = 0; side < 2; ++side) {
    const Vec3 n(0, 0, side == 0 ? -1.0 : 1.0);
    const double z = side == 0 ? 0.0 : height;
    for (int j = 0; j < caps; ++j) {
      const double r = (j + 0.5) / caps * radius;
      const int count = Cells(2.0 * M_PI * r, spacing);
      for (int k = 0; k < count; ++k) {
        const double a = 2.0 * M_PI * k / count;
        b.Add(base + Vec3(r * std::cos(a), r * std::sin(a), z), n);
      }
    }
  }
}

bool StrictlyInsideBox(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  constexpr double kEps = 1e-9;
  return (p.array() > lo.array() + kEps).all() && (p.array() < hi.array() - kEps).all();
}

}  // namespace

ObjectModel MakeBox(const std::string& name, const Vec3& size, double spacing) {
  CloudBuilder b;
  AddBox(b, Vec3(-size.x() / 2, -size.y() / 2, 0.0),
         Vec3(size.x() / 2, size.y() / 2, size.z()), spacing);
  return b.Build(name);
}

ObjectModel MakeCylinder(const std::string& name, double radius, double height,
                         double spacing) {
  CloudBuilder b;
  AddCylinder(b, Vec3::Zero(), radius, height, spacing);
  return b.Build(name);
}

ObjectModel MakeSphere(const std::string& name, double radius, int count) {
  CloudBuilder b;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(1.0 - z * z);
    const Vec3 n(r * std::cos(golden * i), r * std::sin(golden * i), z);
    b.Add(Vec3(0, 0, radius) + radius * n, n);
  }
  return b.Build(name);
}

ObjectModel MakeLShape(const std::string& name, double spacing) {
  const Vec3 a_lo(-0.06, -0.02, 0.0), a_hi(0.06, 0.02, 0.03);
  const Vec3 b_lo(0.02, -0.02, 0.0), b_hi(0.06, 0.02, 0.11);
  CloudBuilder b;
  AddBox(b, a_lo, a_hi, spacing);
  b.Filter([&](const Vec3& p) { return !StrictlyInsideBox(p, b_lo, b_hi); }, 0);
  const size_t mark = b.p.size();
  AddBox(b, b_lo, b_hi, spacing);
  b.Filter([&](const Vec3& p) { return !StrictlyInsideBox(p, a_lo, a_hi); }, mark);
  return b.Build(name);
}

ObjectModel MakeMug(const std::string& name, double spacing) {
  const double body_r = 0.035, body_h = 0.09;
  const Vec3 handle_c(body_r + 0.012, 0.0, 0.045);
  const double major = 0.022, minor = 0.007;
  CloudBuilder b;
  AddCylinder(b, Vec3::Zero(), body_r, body_h, spacing);
  b.Filter(
      [&](const Vec3& p) {
        const Vec3 d = p - handle_c;
        const double ring = std::hypot(d.x(), d.z()) - major;
        return std::hypot(ring, d.y()) > minor;
      },
      0);
  const size_t mark = b.p.size();
  const int nu = Cells(2.0 * M_PI * major, spacing * 0.8);
  const int nv = Cells(2.0 * M_PI * minor, spacing * 0.8);
  for (int i = 0; i < nu; ++i) {
    const double u = 2.0 * M_PI * i / nu;
    const Vec3 radial(std::cos(u), 0.0, std::sin(u));
    for (int j = 0; j < nv; ++j) {
      const double v = 2.0 * M_PI * j / nv;
      const Vec3 n = std::cos(v) * radial + std::sin(v) * Vec3::UnitY();
      b.Add(handle_c + major * radial + minor * n, n);
    }
  }
  b.Filter([&](const Vec3& p) { return std::hypot(p.x(), p.y()) > body_r; }, mark);
  return b.Build(name);
}

std::vector<ObjectModel> MakeToySuite() {
  constexpr double kSpacing = 0.006;
  std::vector<ObjectModel> suite;
  suite.push_back(MakeBox("box", Vec3(0.05, 0.05, 0.10), kSpacing));
  suite.push_back(MakeCylinder("cylinder", 0.03, 0.12, kSpacing));
  suite.push_back(MakeSphere("sphere", 0.035, 500));
  suite.push_back(MakeLShape("l_shape", kSpacing));
  suite.push_back(MakeMug("mug", kSpacing));
  return suite;
}

}  // namespace fungrasp
