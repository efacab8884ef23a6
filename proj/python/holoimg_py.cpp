#include "holoimg/config.hpp"
#include "holoimg/errors.hpp"
#include "holoimg/experiment.hpp"
#include "holoimg/forward.hpp"
#include "holoimg/imaging.hpp"
#include "holoimg/moments.hpp"
#include "holoimg/recovery.hpp"
#include "holoimg/scene.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace holoimg;

namespace {

// Image values as an (nx, nz) array: axis 0 is cross-range, axis 1 is range.
RMatrix as_grid(const ImageMap& img) {
  const auto nx = static_cast<Eigen::Index>(img.window.nx());
  const auto nz = static_cast<Eigen::Index>(img.window.nz());
  RMatrix out(nx, nz);
  for (Eigen::Index ix = 0; ix < nx; ++ix) {
    for (Eigen::Index iz = 0; iz < nz; ++iz) out(ix, iz) = img.values(ix * nz + iz);
  }
  return out;
}

ImageMap from_grid(const ImageWindow& iw, const RMatrix& values, const std::string& name) {
  if (static_cast<std::size_t>(values.rows()) != iw.nx() ||
      static_cast<std::size_t>(values.cols()) != iw.nz()) {
    throw ValidationError("image array must have shape (nx, nz)");
  }
  RVector v(static_cast<Eigen::Index>(iw.size()));
  for (Eigen::Index ix = 0; ix < values.rows(); ++ix) {
    for (Eigen::Index iz = 0; iz < values.cols(); ++iz) v(ix * values.cols() + iz) = values(ix, iz);
  }
  return ImageMap(iw, v, name);
}

py::dict peak_dict(const Peak& p) {
  py::dict d;
  d["ix"] = p.ix;
  d["iz"] = p.iz;
  d["x"] = p.position.x();
  d["z"] = p.position.y();
  d["value"] = p.value;
  return d;
}

py::dict pipeline_dict(const PipelineResult& r) {
  py::dict out;
  py::dict images;
  for (const auto& f : r.images) {
    py::dict d;
    d["image"] = as_grid(f.image);
    py::list peaks;
    for (const auto& p : f.peaks) peaks.append(peak_dict(p));
    d["peaks"] = peaks;
    py::list matches;
    for (const auto& m : f.matches) {
      py::dict md;
      md["scatterer"] = m.scatterer;
      md["true_x"] = m.truth.x();
      md["true_z"] = m.truth.y();
      md["peak_x"] = m.peak.position.x();
      md["peak_z"] = m.peak.position.y();
      md["distance"] = m.distance;
      md["fwhm_cross_range"] = m.fwhm.cross_range;
      md["fwhm_range"] = m.fwhm.range;
      matches.append(md);
    }
    d["matches"] = matches;
    images[py::str(f.image.functional)] = d;
  }
  out["images"] = images;
  out["measurements"] = r.recovery.measurements;
  out["mr_error"] = r.recovery.mr_error ? py::cast(*r.recovery.mr_error) : py::none();
  out["response_error"] =
      r.recovery.response_error ? py::cast(*r.recovery.response_error) : py::none();
  out["x_d"] = r.x_d;
  out["omega_d"] = r.omega_d;
  out["seconds"] = r.seconds;
  return out;
}

}  // namespace

PYBIND11_MODULE(holoimg, m) {
  m.doc() = "Array imaging from intensity-only measurements";

  // Translators registered later are tried first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "IndexError", PyExc_IndexError);

  m.def("linear_index", &linear_index, py::arg("s"), py::arg("l"), py::arg("n"),
        "1-based composite index s + (l - 1) n");
  m.def("split_index", &split_index, py::arg("i"), py::arg("n"));
  m.def("polarization_inner", &polarization_inner, py::arg("n_sum"), py::arg("n_x"),
        py::arg("n_y"), py::arg("n_mix"));

  py::class_<ArrayGeometry>(m, "ArrayGeometry")
      .def_static("equispaced", &ArrayGeometry::equispaced, py::arg("aperture"), py::arg("count"),
                  py::arg("center") = Point2::Zero())
      .def("size", &ArrayGeometry::size)
      .def("aperture", &ArrayGeometry::aperture)
      .def("colocated", &ArrayGeometry::colocated)
      .def("sources", &ArrayGeometry::sources);

  py::class_<FrequencyGrid>(m, "FrequencyGrid")
      .def_static(
          "equispaced_thz",
          [](double fmin, double fmax, std::size_t count, double f0) {
            return FrequencyGrid::equispaced_thz(fmin, fmax, count, f0);
          },
          py::arg("f_min"), py::arg("f_max"), py::arg("count"), py::arg("f0") = 600.0)
      .def("size", &FrequencyGrid::size)
      .def("omegas", &FrequencyGrid::omegas)
      .def("bandwidth", &FrequencyGrid::bandwidth);

  py::class_<ImageWindow>(m, "ImageWindow")
      .def_static("centered", &ImageWindow::centered, py::arg("center"), py::arg("extent"),
                  py::arg("pixel"))
      .def("shape", [](const ImageWindow& w) { return py::make_tuple(w.nx(), w.nz()); })
      .def("point", [](const ImageWindow& w, std::size_t ix, std::size_t iz) {
        return w.point(w.index(ix, iz));
      });

  py::class_<Medium>(m, "Medium").def_static("homogeneous", &Medium::homogeneous,
                                              py::arg("c0") = kReferenceSpeed);

  m.def(
      "response",
      [](const std::vector<std::tuple<double, double, Complex>>& scatterers,
         const ArrayGeometry& g, const FrequencyGrid& f, const Medium& medium) {
        std::vector<Scatterer> s;
        for (const auto& [x, z, a] : scatterers) s.push_back({Point2(x, z), a});
        return response_multi(Scene(s), g, medium, f).matrix();
      },
      py::arg("scatterers"), py::arg("geometry"), py::arg("frequencies"),
      py::arg("medium") = Medium::homogeneous(),
      "Multifrequency response [P(w_1) ... P(w_S)] for (x, z, reflectivity) scatterers");

  m.def(
      "recover_mr",
      [](const CVector& row, std::size_t n, std::size_t s, bool ordered,
         std::optional<double> snr_db, std::uint64_t seed) {
        SimulatedOracle o(row, 1, snr_db, seed);
        CountingOracle counter(o);
        const auto r = recover_Mr(counter, n, s, ordered);
        return py::make_tuple(r.m, counter.count());
      },
      py::arg("row"), py::arg("n"), py::arg("s"), py::arg("ordered") = false,
      py::arg("snr_db") = py::none(), py::arg("seed") = 0,
      "Recovers M_r from simulated intensities of one response row; returns (M_r, measurements)");

  m.def(
      "recover_full_m",
      [](const std::vector<CMatrix>& mr, std::size_t n, std::size_t s, bool colocated) {
        return recover_full_M(mr, n, s, colocated);
      },
      py::arg("mr"), py::arg("n"), py::arg("s"), py::arg("colocated") = true);

  m.def(
      "mask",
      [](const ArrayGeometry& g, const FrequencyGrid& f, double x_d, double omega_d) {
        return build_mask(g, f, x_d, omega_d).dense();
      },
      py::arg("geometry"), py::arg("frequencies"), py::arg("x_d"), py::arg("omega_d"));

  m.def(
      "image_interf",
      [](const CMatrix& mr, const ArrayGeometry& g, const FrequencyGrid& f, const ImageWindow& iw,
         std::size_t receiver) {
        return as_grid(image_interf(mr, model_matrix_g0r(g, f, iw, receiver), iw));
      },
      py::arg("mr"), py::arg("geometry"), py::arg("frequencies"), py::arg("window"),
      py::arg("receiver"));

  m.def(
      "image_srint",
      [](const CMatrix& mr, const ArrayGeometry& g, const FrequencyGrid& f, const ImageWindow& iw,
         std::size_t receiver, double x_d, double omega_d) {
        return as_grid(image_srint(mr, build_mask(g, f, x_d, omega_d),
                                   model_matrix_g0r(g, f, iw, receiver), iw));
      },
      py::arg("mr"), py::arg("geometry"), py::arg("frequencies"), py::arg("window"),
      py::arg("receiver"), py::arg("x_d"), py::arg("omega_d"));

  m.def(
      "image_km",
      [](const CMatrix& p, const ArrayGeometry& g, const FrequencyGrid& f, const ImageWindow& iw) {
        return as_grid(image_km(MultiFreqResponse(p, g.size(), f), g, iw));
      },
      py::arg("response"), py::arg("geometry"), py::arg("frequencies"), py::arg("window"));

  m.def(
      "peaks",
      [](const RMatrix& values, const ImageWindow& iw, double threshold, double separation) {
        py::list out;
        for (const auto& p : extract_peaks(from_grid(iw, values, "km"), threshold, separation)) {
          out.append(peak_dict(p));
        }
        return out;
      },
      py::arg("image"), py::arg("window"), py::arg("threshold") = 0.3,
      py::arg("separation") = 3.0);

  m.def(
      "fwhm",
      [](const RMatrix& values, const ImageWindow& iw, std::size_t ix, std::size_t iz) {
        const auto r = resolution_metrics(from_grid(iw, values, "km"), iw.index(ix, iz));
        return py::make_tuple(r.cross_range, r.range);
      },
      py::arg("image"), py::arg("window"), py::arg("ix"), py::arg("iz"),
      "(cross-range, range) full widths at half maximum through pixel (ix, iz)");

  m.def("preset_names", &preset_names);
  m.def(
      "preset_config",
      [](const std::string& name, bool full) {
        return serialize_experiment_config(make_preset(name, full).config);
      },
      py::arg("name"), py::arg("full") = false, "Preset configuration as a JSON string");
  m.def(
      "validate_config",
      [](const std::string& text) {
        return serialize_experiment_config(parse_experiment_config(text));
      },
      py::arg("text"), "Parses a JSON configuration and returns its canonical form");

  m.def(
      "run_experiment",
      [](const std::string& config_json, std::uint64_t realization, const std::string& route) {
        const auto cfg = parse_experiment_config(config_json);
        PipelineResult r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(cfg, realization, parse_data_route(route));
        }
        return pipeline_dict(r);
      },
      py::arg("config"), py::arg("realization") = 0, py::arg("route") = "intensities",
      "Runs the imaging pipeline for a JSON configuration");

  m.def(
      "moments",
      [](double epsilon, double corr_len, std::size_t realizations, std::uint64_t seed) {
        MomentConfig c;
        c.epsilon = epsilon;
        c.corr_len = corr_len;
        c.realizations = realizations;
        c.seed = seed;
        MomentReport r;
        {
          py::gil_scoped_release release;
          r = run_moments(c);
        }
        py::list rows;
        for (const auto& row : r.rows) {
          py::dict d;
          d["quantity"] = row.quantity;
          d["theory"] = row.theory;
          d["estimate"] = row.estimate;
          d["stderr"] = row.stderr_;
          d["n"] = row.n;
          d["z"] = row.z;
          rows.append(d);
        }
        return rows;
      },
      py::arg("epsilon") = 0.2, py::arg("corr_len") = 100.0, py::arg("realizations") = 200,
      py::arg("seed") = 1);
}
