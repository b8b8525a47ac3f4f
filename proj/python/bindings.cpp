#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "turbstab/config.hpp"
#include "turbstab/flow_io.hpp"
#include "turbstab/metrics.hpp"
#include "turbstab/pgm.hpp"
#include "turbstab/version.hpp"

namespace py = pybind11;
using namespace turbstab;

namespace {

Image array_to_image(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array (height, width)");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  Image img(w, h);
  std::copy(a.data(), a.data() + img.size(), img.data.begin());
  return img;
}

py::array_t<double> image_to_array(const Image& img) {
  py::array_t<double> out({img.height, img.width});
  std::copy(img.data.begin(), img.data.end(), out.mutable_data());
  return out;
}

FlowField arrays_to_flow(const py::array_t<double, py::array::c_style | py::array::forcecast>& dx,
                         const py::array_t<double, py::array::c_style | py::array::forcecast>& dy) {
  if (dx.ndim() != 2 || dy.ndim() != 2 || dx.shape(0) != dy.shape(0) || dx.shape(1) != dy.shape(1))
    throw std::invalid_argument("expected two equal 2-D arrays (height, width)");
  FlowField f(static_cast<int>(dx.shape(1)), static_cast<int>(dx.shape(0)));
  std::copy(dx.data(), dx.data() + f.size(), f.dx.begin());
  std::copy(dy.data(), dy.data() + f.size(), f.dy.begin());
  return f;
}

py::array_t<double> array_2d(int width, int height, const std::vector<double>& values) {
  py::array_t<double> out({height, width});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

FrameSequence list_to_frames(const std::vector<py::array_t<double>>& arrays) {
  FrameSequence frames;
  frames.reserve(arrays.size());
  for (const auto& a : arrays) frames.push_back(array_to_image(a));
  return frames;
}

}  // namespace

PYBIND11_MODULE(_turbstab, m) {
  m.doc() = "Atmospheric-turbulence stabilization: warp operators, optical flow, "
            "split-Bregman regularizers and the alternating-optimization stabilizer.";
  m.attr("__version__") = kVersion;

  py::class_<Image>(m, "Image")
      .def(py::init(&array_to_image), py::arg("array"))
      .def_readonly("width", &Image::width)
      .def_readonly("height", &Image::height)
      .def("to_numpy", &image_to_array)
      .def("__repr__", [](const Image& img) {
        return "Image(" + std::to_string(img.width) + "x" + std::to_string(img.height) + ")";
      });

  py::class_<FlowField>(m, "FlowField")
      .def(py::init(&arrays_to_flow), py::arg("dx"), py::arg("dy"))
      .def_readonly("width", &FlowField::width)
      .def_readonly("height", &FlowField::height)
      .def("dx_numpy", [](const FlowField& f) { return array_2d(f.width, f.height, f.dx); })
      .def("dy_numpy", [](const FlowField& f) { return array_2d(f.width, f.height, f.dy); });

  py::class_<FlowParams>(m, "FlowParams")
      .def(py::init<>())
      .def_readwrite("window_radius", &FlowParams::window_radius)
      .def_readwrite("pyramid_levels", &FlowParams::pyramid_levels)
      .def_readwrite("iterations_per_level", &FlowParams::iterations_per_level)
      .def_readwrite("min_eigen_threshold", &FlowParams::min_eigen_threshold);

  py::enum_<RegKind>(m, "RegKind")
      .value("tv", RegKind::tv)
      .value("nltv", RegKind::nltv)
      .value("frame", RegKind::frame);

  py::class_<TvParams>(m, "TvParams")
      .def(py::init<>())
      .def_readwrite("inner_iterations", &TvParams::inner_iterations)
      .def_readwrite("bregman_penalty", &TvParams::bregman_penalty);

  py::class_<NltvParams>(m, "NltvParams")
      .def(py::init<>())
      .def_readwrite("patch_radius", &NltvParams::patch_radius)
      .def_readwrite("search_radius", &NltvParams::search_radius)
      .def_readwrite("similarity_scale", &NltvParams::similarity_scale)
      .def_readwrite("neighbors_kept", &NltvParams::neighbors_kept)
      .def_readwrite("inner_iterations", &NltvParams::inner_iterations)
      .def_readwrite("bregman_penalty", &NltvParams::bregman_penalty);

  py::class_<FrameParams>(m, "FrameParams")
      .def(py::init<>())
      .def_readwrite("levels", &FrameParams::levels)
      .def_readwrite("inner_iterations", &FrameParams::inner_iterations)
      .def_readwrite("bregman_penalty", &FrameParams::bregman_penalty);

  py::class_<RegularizerSpec>(m, "RegularizerSpec")
      .def(py::init<>())
      .def_readwrite("kind", &RegularizerSpec::kind)
      .def_readwrite("tv", &RegularizerSpec::tv)
      .def_readwrite("nltv", &RegularizerSpec::nltv)
      .def_readwrite("frame", &RegularizerSpec::frame);

  py::class_<NlWeights>(m, "NlWeights")
      .def_property_readonly("edge_count", &NlWeights::edge_count);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("frames", &SimConfig::frames)
      .def_readwrite("deform_amplitude", &SimConfig::deform_amplitude)
      .def_readwrite("correlation_length", &SimConfig::correlation_length)
      .def_readwrite("blur_sigma", &SimConfig::blur_sigma)
      .def_readwrite("noise_sigma", &SimConfig::noise_sigma)
      .def_readwrite("seed", &SimConfig::seed);

  py::class_<StabilizerConfig>(m, "StabilizerConfig")
      .def(py::init<>())
      .def_readwrite("delta", &StabilizerConfig::delta)
      .def_readwrite("lambda_", &StabilizerConfig::lambda)
      .def_readwrite("outer_iterations", &StabilizerConfig::outer_iterations)
      .def_readwrite("inner_iterations", &StabilizerConfig::inner_iterations)
      .def_readwrite("fidelity_tolerance", &StabilizerConfig::fidelity_tolerance)
      .def_readwrite("flow", &StabilizerConfig::flow)
      .def_readwrite("regularizer", &StabilizerConfig::regularizer)
      .def_readwrite("threads", &StabilizerConfig::threads);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("outer", &TraceRow::outer)
      .def_readonly("inner", &TraceRow::inner)
      .def_readonly("fidelity", &TraceRow::fidelity)
      .def_readonly("objective", &TraceRow::objective);

  py::class_<PhaseTimes>(m, "PhaseTimes")
      .def_readonly("flow_seconds", &PhaseTimes::flow_seconds)
      .def_readonly("gradient_seconds", &PhaseTimes::gradient_seconds)
      .def_readonly("prox_seconds", &PhaseTimes::prox_seconds)
      .def_readonly("addback_seconds", &PhaseTimes::addback_seconds);

  py::class_<StabilizerReport>(m, "StabilizerReport")
      .def_property_readonly("u", [](const StabilizerReport& r) { return image_to_array(r.u); })
      .def_readonly("outer_fidelity", &StabilizerReport::outer_fidelity)
      .def_readonly("trace", &StabilizerReport::trace)
      .def_readonly("flows", &StabilizerReport::flows)
      .def_readonly("times", &StabilizerReport::times);

  // image core
  m.def("load_pgm", [](const std::string& p) { return image_to_array(load_pgm(p)); }, py::arg("path"));
  m.def("save_pgm",
        [](const py::array_t<double>& a, const std::string& p, int maxval) {
          save_pgm(array_to_image(a), p, maxval);
        },
        py::arg("image"), py::arg("path"), py::arg("maxval") = 255);
  m.def("bilinear_sample",
        [](const py::array_t<double>& a, double x, double y) {
          return bilinear_sample(array_to_image(a), x, y);
        },
        py::arg("image"), py::arg("x"), py::arg("y"));
  m.def("warp_apply",
        [](const py::array_t<double>& u, const FlowField& f) {
          return image_to_array(warp_apply(array_to_image(u), f));
        },
        py::arg("u"), py::arg("flow"));
  m.def("warp_adjoint",
        [](const py::array_t<double>& r, const FlowField& f) {
          return image_to_array(warp_adjoint(array_to_image(r), f));
        },
        py::arg("r"), py::arg("flow"));
  m.def("gradient",
        [](const py::array_t<double>& u) {
          const VectorField g = gradient(array_to_image(u));
          return py::make_tuple(array_2d(g.width, g.height, g.px),
                                array_2d(g.width, g.height, g.py));
        },
        py::arg("u"), "Forward-difference gradient; returns (px, py).");

  // optical flow
  m.def("estimate_flow",
        [](const py::array_t<double>& ref, const py::array_t<double>& target,
           const FlowParams& params) {
          return estimate_flow(array_to_image(ref), array_to_image(target), params);
        },
        py::arg("reference"), py::arg("target"), py::arg("params") = FlowParams{});
  m.def("downsample2",
        [](const py::array_t<double>& u) { return image_to_array(downsample2(array_to_image(u))); },
        py::arg("image"));
  m.def("save_flow_txt", [](const FlowField& f, const std::string& p) { save_flow_txt(f, p); },
        py::arg("flow"), py::arg("path"));
  m.def("load_flow_txt", [](const std::string& p) { return load_flow_txt(p); }, py::arg("path"));

  // regularizers
  m.def("prox",
        [](const RegularizerSpec& spec, const py::array_t<double>& v, double mu) {
          return image_to_array(prox(spec, array_to_image(v), mu));
        },
        py::arg("spec"), py::arg("v"), py::arg("mu"));
  m.def("tv_prox",
        [](const py::array_t<double>& v, double mu, int iters, double rho) {
          return image_to_array(tv_prox(array_to_image(v), mu, iters, rho));
        },
        py::arg("v"), py::arg("mu"), py::arg("inner_iterations") = 10, py::arg("rho") = 0.0);
  m.def("frame_prox",
        [](const py::array_t<double>& v, double mu, int levels, int iters, double rho) {
          return image_to_array(frame_prox(array_to_image(v), mu, levels, iters, rho));
        },
        py::arg("v"), py::arg("mu"), py::arg("levels") = 2, py::arg("inner_iterations") = 10,
        py::arg("rho") = 0.0);
  m.def("compute_nl_weights",
        [](const py::array_t<double>& v, const NltvParams& params) {
          return compute_nl_weights(array_to_image(v), params);
        },
        py::arg("v"), py::arg("params") = NltvParams{});
  m.def("nltv_prox",
        [](const py::array_t<double>& v, const NlWeights& w, double mu, int iters, double rho) {
          return image_to_array(nltv_prox(array_to_image(v), w, mu, iters, rho));
        },
        py::arg("v"), py::arg("weights"), py::arg("mu"), py::arg("inner_iterations") = 5,
        py::arg("rho") = 0.0);

  // simulator
  m.def("gaussian_blur",
        [](const py::array_t<double>& u, double sigma) {
          return image_to_array(gaussian_blur(array_to_image(u), sigma));
        },
        py::arg("image"), py::arg("sigma"));
  m.def("degrade",
        [](const py::array_t<double>& truth, const SimConfig& cfg) {
          DegradeResult r = degrade(array_to_image(truth), cfg);
          std::vector<py::array_t<double>> frames;
          frames.reserve(r.frames.size());
          for (const Image& f : r.frames) frames.push_back(image_to_array(f));
          return py::make_tuple(frames, r.fields);
        },
        py::arg("truth"), py::arg("config"), "Returns (frames, ground_truth_flows).");

  // stabilizer
  m.def("temporal_average",
        [](const std::vector<py::array_t<double>>& frames) {
          return image_to_array(temporal_average(list_to_frames(frames)));
        },
        py::arg("frames"));
  m.def("stabilize",
        [](const std::vector<py::array_t<double>>& frames, const StabilizerConfig& cfg) {
          return stabilize(list_to_frames(frames), cfg);
        },
        py::arg("frames"), py::arg("config") = StabilizerConfig{});

  // metrics
  m.def("rmse",
        [](const py::array_t<double>& a, const py::array_t<double>& b) {
          return rmse(array_to_image(a), array_to_image(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("psnr",
        [](const py::array_t<double>& a, const py::array_t<double>& b) {
          return psnr(array_to_image(a), array_to_image(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("fidelity",
        [](const py::array_t<double>& u, const std::vector<py::array_t<double>>& frames,
           const std::vector<FlowField>& flows) {
          return fidelity(array_to_image(u), list_to_frames(frames), flows);
        },
        py::arg("u"), py::arg("frames"), py::arg("flows"));
  m.def("flow_epe", &flow_epe, py::arg("estimated"), py::arg("truth"));
}
