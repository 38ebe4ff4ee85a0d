#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "affdim/attractor.hpp"
#include "affdim/error.hpp"
#include "affdim/gallery.hpp"
#include "affdim/linalg.hpp"
#include "affdim/pressure.hpp"
#include "affdim/structure.hpp"

namespace py = pybind11;
using namespace affdim;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a two-dimensional array");
  const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
  return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

MatrixTuple to_tuple(const std::vector<Array>& maps) {
  std::vector<Matrix> ms;
  ms.reserve(maps.size());
  for (const auto& a : maps) ms.push_back(to_matrix(a));
  return MatrixTuple(std::move(ms));
}

py::dict bracket(const DimensionBracket& b) {
  py::dict d;
  d["lower"] = b.lower;
  d["upper"] = b.upper;
  d["level"] = b.level;
  d["tolerance"] = b.tolerance;
  d["iterations"] = b.iterations;
  d["certified_upper"] = b.certified_upper;
  d["label"] = b.label;
  return d;
}

py::dict certificate(const CertificateReport& r) {
  py::dict d;
  d["property"] = r.property;
  d["verdict"] = std::string(verdict_name(r.verdict));
  d["note"] = r.note;
  if (r.witness.word) d["word"] = r.witness.word->str();
  if (!r.witness.subspace.empty()) d["subspace"] = to_array(r.witness.subspace);
  py::list checks;
  for (const auto& c : r.checks) checks.append(py::make_tuple(c.name, c.passed, c.value, c.relation, c.threshold));
  d["checks"] = checks;
  return d;
}

PressureOptions options(std::size_t shards) {
  PressureOptions o;
  o.shards = shards == 0 ? default_shard_count() : shards;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Affinity dimension, projected pressure and certificates for affine iterated function systems.";

  auto base = py::register_exception<Error>(m, "AffdimError", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<NumericalError>(m, "NumericalError", base);
  py::register_exception<ResourceError>(m, "ResourceError", base);
  py::register_exception<PreconditionError>(m, "PreconditionError", base);
  py::register_exception<EstimationError>(m, "EstimationError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);

  m.def("singular_values", [](const Array& a) { return singular_values(to_matrix(a)).values; }, py::arg("matrix"));
  m.def("kronecker", [](const Array& a, const Array& b) { return to_array(kronecker(to_matrix(a), to_matrix(b))); });
  m.def("exterior_power", [](const Array& a, std::size_t k) { return to_array(exterior_power(to_matrix(a), k)); },
        py::arg("matrix"), py::arg("k"));

  m.def(
      "affinity_dimension",
      [](const std::vector<Array>& maps, std::size_t level, double tol, std::size_t shards) {
        return bracket(affinity_dimension(to_tuple(maps), level, tol, options(shards)));
      },
      py::arg("maps"), py::arg("level") = 8, py::arg("tol") = 1e-4, py::arg("shards") = 0);
  m.def(
      "projected_exponent",
      [](const std::vector<Array>& maps, const Array& q, std::size_t level, double tol, std::size_t shards) {
        const ProjectedExponent e = projected_exponent(to_tuple(maps), to_matrix(q), level, tol, options(shards));
        py::dict d;
        d["empirical"] = bracket(e.empirical);
        d["unprojected"] = bracket(e.unprojected);
        d["crude_bound"] = e.crude_bound;
        d["projection_rank"] = e.projection_rank;
        return d;
      },
      py::arg("maps"), py::arg("projection"), py::arg("level") = 8, py::arg("tol") = 1e-4, py::arg("shards") = 0);
  m.def(
      "level_pressure",
      [](const std::vector<Array>& maps, double s, std::size_t level, std::optional<Array> q) {
        std::optional<Matrix> proj;
        if (q) proj = to_matrix(*q);
        const PressureEstimate p = level_pressure(to_tuple(maps), s, level, proj);
        return py::make_tuple(p.value, p.envelope, p.level_values);
      },
      py::arg("maps"), py::arg("s"), py::arg("level"), py::arg("projection") = py::none());

  m.def(
      "proximality_check",
      [](const std::vector<Array>& maps, std::size_t k, std::size_t max_len) {
        return certificate(proximality_check(to_tuple(maps), k, max_len));
      },
      py::arg("maps"), py::arg("k"), py::arg("max_len") = 4);
  m.def(
      "irreducibility_check",
      [](const std::vector<Array>& maps, std::size_t k, std::uint64_t seed) {
        return certificate(irreducibility_check(to_tuple(maps), k, 8, seed));
      },
      py::arg("maps"), py::arg("k"), py::arg("seed") = 0x5EED);
  m.def("tensor_certificate", [](const Array& a, const Array& b) {
    return certificate(tensor_strong_irreducibility_certificate(to_matrix(a), to_matrix(b)));
  });
  m.def("admissible_pair", [] { return py::make_tuple(to_array(admissible_a()), to_array(admissible_b())); });

  m.def(
      "sample_attractor",
      [](const std::vector<Array>& maps, const std::vector<Vector>& translations, std::uint64_t count,
         std::uint64_t seed) {
        const PointCloud cloud = sample_attractor(AffineIFS(to_tuple(maps), translations), ChaosMode{count, seed});
        Array out({cloud.size(), cloud.dimension()});
        std::copy(cloud.coords().begin(), cloud.coords().end(), out.mutable_data());
        return out;
      },
      py::arg("maps"), py::arg("translations"), py::arg("count") = 100000, py::arg("seed") = 0x5EED);
  m.def(
      "box_count",
      [](const Array& points, int finest) {
        const Matrix p = to_matrix(points);
        const BoxCountReport r = box_count(PointCloud(p.cols(), std::vector<double>(p.data().begin(), p.data().end())),
                                           finest);
        py::dict d;
        d["slope"] = r.slope;
        d["intercept"] = r.intercept;
        d["r_squared"] = r.r_squared;
        d["levels"] = r.levels;
        d["counts"] = r.counts;
        return d;
      },
      py::arg("points"), py::arg("finest") = 10);
}
