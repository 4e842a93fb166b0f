#include <circrect/camera_model.hpp>
#include <circrect/circle_fit.hpp>
#include <circrect/circular_projection.hpp>
#include <circrect/dibr_warp.hpp>
#include <circrect/error.hpp>
#include <circrect/eval_harness.hpp>
#include <circrect/io.hpp>
#include <circrect/rectify.hpp>
#include <circrect/scene_synth.hpp>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

namespace py = pybind11;
using namespace circrect;

namespace {

template <typename T> auto to_array(const Plane<T> &p) -> py::array_t<T> {
  py::array_t<T> out({p.height(), p.width()});
  std::memcpy(out.mutable_data(), p.data().data(), p.data().size() * sizeof(T));
  return out;
}

template <typename T> auto from_array(const py::array_t<T, py::array::c_style | py::array::forcecast> &a) -> Plane<T> {
  if (a.ndim() != 2) {
    throw Error{ErrorKind::InvalidArgument, "plane must be two-dimensional"};
  }
  Plane<T> p{static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0))};
  std::memcpy(p.data().data(), a.data(), p.data().size() * sizeof(T));
  return p;
}

auto to_points(const std::vector<std::pair<double, double>> &xz) -> std::vector<GroundPoint> {
  auto pts = std::vector<GroundPoint>{};
  pts.reserve(xz.size());
  for (const auto &[x, z] : xz) {
    pts.push_back({x, z});
  }
  return pts;
}

auto to_curve(const std::vector<std::pair<double, double>> &pts) -> RdCurve {
  auto c = RdCurve{};
  for (const auto &[rate, psnr] : pts) {
    c.points.push_back({rate, psnr});
  }
  return c;
}

} // namespace

PYBIND11_MODULE(_circrect, m) {
  m.doc() = "Circular rectification and circular inter-view projection";

  // held for the lifetime of the interpreter
  static PyObject *error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const Error &e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = std::string{to_string(e.kind())};
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  // --- camera model ---------------------------------------------------------
  py::class_<Intrinsics>(m, "Intrinsics")
      .def(py::init<>())
      .def(py::init([](double fx, double fy, double ox, double oy, double skew) {
             return Intrinsics{fx, fy, ox, oy, skew};
           }),
           py::arg("fx"), py::arg("fy"), py::arg("ox"), py::arg("oy"), py::arg("skew") = 0.0)
      .def_readwrite("fx", &Intrinsics::fx)
      .def_readwrite("fy", &Intrinsics::fy)
      .def_readwrite("ox", &Intrinsics::ox)
      .def_readwrite("oy", &Intrinsics::oy)
      .def_readwrite("skew", &Intrinsics::skew)
      .def("matrix", &Intrinsics::matrix);

  py::class_<CameraParams>(m, "CameraParams")
      .def(py::init<>())
      .def_readwrite("id", &CameraParams::id)
      .def_readwrite("intr", &CameraParams::intr)
      .def_readwrite("width", &CameraParams::width)
      .def_readwrite("height", &CameraParams::height)
      .def_property(
          "R", [](const CameraParams &c) { return c.extr.R; },
          [](CameraParams &c, const Mat3 &R) { c.extr.R = R; })
      .def_property(
          "T", [](const CameraParams &c) { return c.extr.T; },
          [](CameraParams &c, const Vec3 &T) { c.extr.T = T; })
      .def("center", &CameraParams::center)
      .def("optical_axis", &CameraParams::optical_axis);

  m.def("validate_camera", [](const CameraParams &c) { validate(c); });
  m.def("projection_matrix", [](const CameraParams &c) { return build_projection(c).matrix(); });
  m.def("relative_projection", &relative_projection);
  m.def(
      "project_point",
      [](const CameraParams &src, const CameraParams &dst, double x, double y, double z) {
        const auto p = project_point(src, dst, {x, y, z});
        return py::make_tuple(p.x, p.y, p.z);
      },
      py::arg("src"), py::arg("dst"), py::arg("x"), py::arg("y"), py::arg("z"));
  m.def("unproject", [](const CameraParams &c, double x, double y, double z) {
    return unproject(c, {x, y, z});
  });
  m.def("project_world", [](const CameraParams &c, const Vec3 &w) {
    const auto p = project_world(c, w);
    return py::make_tuple(p.x, p.y, p.z);
  });

  // --- circle fit -----------------------------------------------------------
  py::class_<Circle>(m, "Circle")
      .def(py::init<>())
      .def(py::init([](double x, double z, double r) { return Circle{x, z, r}; }), py::arg("x_cen"),
           py::arg("z_cen"), py::arg("r"))
      .def_readwrite("x_cen", &Circle::x_cen)
      .def_readwrite("z_cen", &Circle::z_cen)
      .def_readwrite("r", &Circle::r);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("circle", &FitResult::circle)
      .def_readonly("residual", &FitResult::residual)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("per_camera_distance", &FitResult::per_camera_distance);

  m.def(
      "fit_circle", [](const std::vector<std::pair<double, double>> &xz) { return fit_circle(to_points(xz)); },
      py::arg("points"), "Geometric least-squares circle through (x, z) ground positions.");

  // --- rectify --------------------------------------------------------------
  py::class_<CircularCameraParams>(m, "CircularCameraParams")
      .def(py::init<>())
      .def_readwrite("id", &CircularCameraParams::id)
      .def_readwrite("fx", &CircularCameraParams::fx)
      .def_readwrite("ox", &CircularCameraParams::ox)
      .def_readwrite("oy", &CircularCameraParams::oy)
      .def_readwrite("alpha", &CircularCameraParams::alpha)
      .def_readwrite("r", &CircularCameraParams::r)
      .def_readwrite("width", &CircularCameraParams::width)
      .def_readwrite("height", &CircularCameraParams::height);

  py::class_<RectifiedRig>(m, "RectifiedRig")
      .def_readonly("circle", &RectifiedRig::circle)
      .def_readonly("cameras", &RectifiedRig::cameras)
      .def_readonly("full_params", &RectifiedRig::full_params)
      .def_readonly("common_fy", &RectifiedRig::common_fy)
      .def_readonly("camera_height", &RectifiedRig::camera_height)
      .def_property_readonly("ox_policy", [](const RectifiedRig &r) { return std::string{to_string(r.ox_policy)}; });

  m.def(
      "rectify_rig",
      [](const std::vector<CameraParams> &rig, const std::string &policy) {
        return rectify_rig(rig, parse_ox_policy(policy));
      },
      py::arg("cameras"), py::arg("ox_policy") = "convergence");
  m.def("circular_to_full", &circular_to_full, py::arg("camera"), py::arg("circle"),
        py::arg("common_fy"), py::arg("camera_height"));
  m.def("rectified_rotation", &rectified_rotation);

  // --- circular projection -------------------------------------------------
  m.def(
      "project_circular",
      [](const CircularCameraParams &a, const CircularCameraParams &b, double x, double y, double z) {
        const auto p = project_circular(CircularPair{a, b}, {x, y, z});
        return py::make_tuple(p.x, p.y, p.z);
      },
      py::arg("a"), py::arg("b"), py::arg("x"), py::arg("y"), py::arg("z"));
  m.def(
      "project_circular_grid",
      [](const CircularCameraParams &a, const CircularCameraParams &b,
         const py::array_t<double, py::array::c_style | py::array::forcecast> &depth) {
        if (depth.ndim() != 2) {
          throw Error{ErrorKind::InvalidArgument, "depth must be two-dimensional"};
        }
        const auto h = static_cast<int>(depth.shape(0));
        const auto w = static_cast<int>(depth.shape(1));
        const auto res = project_circular_grid(
            CircularPair{a, b}, std::span<const double>{depth.data(), static_cast<size_t>(depth.size())}, w, h);
        py::array_t<double> xyz({h, w, 3});
        py::array_t<bool> valid({h, w});
        auto *out = xyz.mutable_data();
        auto *ok = valid.mutable_data();
        for (size_t i = 0; i < res.points.size(); ++i) {
          out[3 * i] = res.points[i].x;
          out[3 * i + 1] = res.points[i].y;
          out[3 * i + 2] = res.points[i].z;
          ok[i] = res.valid[i] != 0;
        }
        return py::make_tuple(xyz, valid);
      },
      py::arg("a"), py::arg("b"), py::arg("depth"),
      "Project every pixel of a depth map; returns (H x W x 3 array, H x W validity).");

  // --- scenes and warping ---------------------------------------------------
  py::class_<RigSpec>(m, "RigSpec")
      .def(py::init<>())
      .def_readwrite("n_cameras", &RigSpec::n_cameras)
      .def_readwrite("radius", &RigSpec::radius)
      .def_readwrite("x_cen", &RigSpec::x_cen)
      .def_readwrite("z_cen", &RigSpec::z_cen)
      .def_readwrite("camera_height", &RigSpec::camera_height)
      .def_readwrite("arc_span", &RigSpec::arc_span)
      .def_readwrite("arc_center", &RigSpec::arc_center)
      .def_readwrite("position_noise", &RigSpec::position_noise)
      .def_readwrite("rotation_noise", &RigSpec::rotation_noise)
      .def_readwrite("seed", &RigSpec::seed)
      .def_readwrite("intrinsics", &RigSpec::intrinsics)
      .def_readwrite("image_width", &RigSpec::image_width)
      .def_readwrite("image_height", &RigSpec::image_height);

  m.def("synth_rig", &synth_rig);

  py::class_<SceneSpec>(m, "SceneSpec")
      .def_readwrite("z_near", &SceneSpec::z_near)
      .def_readwrite("z_far", &SceneSpec::z_far)
      .def_readwrite("background_depth", &SceneSpec::background_depth)
      .def_readwrite("background_luma", &SceneSpec::background_luma)
      .def("to_json", [](const SceneSpec &s) { return io::format_scene_spec(s); })
      .def_static("from_json", [](const std::string &t) { return io::parse_scene_spec(t); });
  m.def("default_scene", &default_scene);

  py::class_<ViewFrame>(m, "ViewFrame")
      .def_property_readonly("luma", [](const ViewFrame &f) { return to_array(f.luma); })
      .def_property_readonly("chroma_u", [](const ViewFrame &f) { return to_array(f.chroma_u); })
      .def_property_readonly("chroma_v", [](const ViewFrame &f) { return to_array(f.chroma_v); })
      .def_property_readonly("depth", [](const ViewFrame &f) { return to_array(f.depth); })
      .def_readonly("z_near", &ViewFrame::z_near)
      .def_readonly("z_far", &ViewFrame::z_far)
      .def(py::self == py::self)
      .def_static(
          "from_planes",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> &y,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> &u,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> &v,
             const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast> &d, double zn,
             double zf) {
            auto f = ViewFrame{from_array(y), from_array(u), from_array(v), from_array(d), zn, zf};
            validate(f);
            return f;
          },
          py::arg("luma"), py::arg("chroma_u"), py::arg("chroma_v"), py::arg("depth"), py::arg("z_near"),
          py::arg("z_far"));

  py::class_<WarpedFrame>(m, "WarpedFrame")
      .def_readonly("frame", &WarpedFrame::frame)
      .def_property_readonly("mask", [](const WarpedFrame &w) { return to_array(w.mask); })
      .def_readonly("hole_fraction", &WarpedFrame::hole_fraction)
      .def_readonly("degenerate_count", &WarpedFrame::degenerate_count);

  m.def("render", &render, py::arg("scene"), py::arg("camera"));
  m.def("warp_view", &warp_view, py::arg("src"), py::arg("cam_src"), py::arg("cam_dst"));
  m.def("fill_holes", &fill_holes);
  m.def("depth_sample_to_z", &depth_sample_to_z);
  m.def("z_to_depth_sample", &z_to_depth_sample);

  // --- evaluation -----------------------------------------------------------
  m.def("psnr_from_sse", &psnr_from_sse);
  m.def(
      "bd_rate",
      [](const std::vector<std::pair<double, double>> &anchor, const std::vector<std::pair<double, double>> &test) {
        return bd_rate(to_curve(anchor), to_curve(test));
      },
      py::arg("anchor"), py::arg("test"), "Bjontegaard delta rate in percent from (kbps, dB) points.");

  py::class_<BenchmarkRecord>(m, "BenchmarkRecord")
      .def_readonly("n_points", &BenchmarkRecord::n_points)
      .def_readonly("repetitions", &BenchmarkRecord::repetitions)
      .def_readonly("circular_ns", &BenchmarkRecord::circular_ns)
      .def_readonly("full_ns", &BenchmarkRecord::full_ns)
      .def_readonly("full_precomputed_ns", &BenchmarkRecord::full_precomputed_ns)
      .def_readonly("ratio", &BenchmarkRecord::ratio)
      .def_readonly("precomputed_ratio", &BenchmarkRecord::precomputed_ratio)
      .def_readonly("reduction_percent", &BenchmarkRecord::reduction_percent);

  m.def(
      "benchmark_projection",
      [](const RectifiedRig &rig, int a, int b, std::size_t n, int reps, std::uint64_t seed) {
        return benchmark_projection(rig.cameras.at(size_t(a)), rig.cameras.at(size_t(b)), rig.circle,
                                    rig.common_fy, rig.camera_height, n, reps, seed);
      },
      py::arg("rig"), py::arg("a"), py::arg("b"), py::arg("n_points"), py::arg("repetitions"),
      py::arg("seed") = 1);

  m.def(
      "run_experiment",
      [](const std::string &config_json, const std::string &base_dir) {
        const auto report = run_experiment(io::parse_experiment_config(config_json, base_dir));
        auto rows = py::list{};
        for (const auto &r : report.records) {
          auto row = py::dict{};
          row["sequence"] = r.sequence;
          row["pair"] = r.pair;
          row["predictor"] = std::string{to_string(r.predictor)};
          row["sse"] = r.sse;
          row["pixel_count"] = r.pixel_count;
          row["psnr_db"] = r.psnr_db;
          row["hole_fraction"] = r.hole_fraction;
          row["ns_per_point"] = r.ns_per_point;
          rows.append(row);
        }
        return rows;
      },
      py::arg("config_json"), py::arg("base_dir") = ".",
      "Run the prediction experiment from a JSON config; returns one dict per record.");

  // --- files ----------------------------------------------------------------
  m.def(
      "load_cameras", [](const std::string &text) { return io::parse_camera_file(text).cameras; },
      py::arg("text"));
  m.def(
      "format_cameras",
      [](const std::vector<CameraParams> &cams, double z_near, double z_far) {
        auto set = io::CameraSet{cams, {}};
        set.depth_ranges.assign(cams.size(), {z_near, z_far});
        return io::format_camera_file(set);
      },
      py::arg("cameras"), py::arg("z_near") = 1.0, py::arg("z_far") = 100.0);
}
