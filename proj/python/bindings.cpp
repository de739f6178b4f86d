// Python surface: the main operations (spectra, schedules, mixtures, room
// simulation, model inference) plus the batch commands behind the CLI.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mvn/driver.hpp"
#include "mvn/errors.hpp"

namespace py = pybind11;
using namespace mvn;

namespace {

FrameSpec make_spec(int window, int hop, const std::string& kind) {
  FrameSpec spec;
  spec.window = window;
  spec.hop = hop;
  if (kind == "hann")
    spec.kind = WindowKind::Hann;
  else if (kind == "rect")
    spec.kind = WindowKind::Rect;
  else
    throw ConfigError("window kind must be hann or rect, got '" + kind + "'");
  return spec;
}

py::array_t<double> matrix_to_array(const Matrix& m) {
  py::array_t<double> out({m.rows, m.cols});
  std::copy(m.d.begin(), m.d.end(), out.mutable_data());
  return out;
}

py::array_t<double> grid_to_array(const SpectraGrid& g) {
  py::array_t<double> out({g.channels(), g.frames(), g.bins()});
  double* dst = out.mutable_data();
  for (const auto& slab : g.ch) {
    std::copy(slab.d.begin(), slab.d.end(), dst);
    dst += slab.size();
  }
  return out;
}

SpectraGrid grid_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 3) throw ShapeError("grid must be a (K, T, F) array");
  SpectraGrid g;
  const double* src = a.data();
  for (py::ssize_t k = 0; k < a.shape(0); ++k) {
    Matrix slab(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2)));
    std::copy(src, src + slab.size(), slab.d.begin());
    src += slab.size();
    g.ch.push_back(std::move(slab));
  }
  return g;
}

Waveform waveform_from_array(
    py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 1) throw ShapeError("samples must be a 1-D array");
  Waveform w;
  w.samples.assign(a.data(), a.data() + a.shape(0));
  return w;
}

RunConfig config_from_text(const std::string& text) {
  return RunConfig::from_text(text, "<python>");
}

// checkpoint + fusion rule bundled for inference from python
class Model {
 public:
  explicit Model(const std::string& path) {
    Checkpoint c = load_checkpoint(path);
    params_ = backbone_from_checkpoint(c);
    kind_ = model_kind_from_checkpoint(c);
  }

  std::string kind() const { return model_name(kind_); }
  int hidden() const { return params_.hidden; }

  py::tuple predict_grid(
      py::array_t<double, py::array::c_style | py::array::forcecast> grid) {
    FramePrediction pred = predict(grid_from_array(grid), params_, kind_);
    py::array_t<int> labels(static_cast<py::ssize_t>(pred.labels.size()));
    std::copy(pred.labels.begin(), pred.labels.end(), labels.mutable_data());
    return py::make_tuple(matrix_to_array(pred.probs), labels);
  }

 private:
  BackboneParams params_;
  ModelKind kind_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "multi-channel frame classification workbench";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "WorkbenchError");

  m.def(
      "stft_mag",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> samples, int window,
         int hop, const std::string& kind) {
        return matrix_to_array(
            magnitude(stft(waveform_from_array(samples), make_spec(window, hop, kind))));
      },
      py::arg("samples"), py::arg("window") = 1024, py::arg("hop") = 512,
      py::arg("window_kind") = "hann",
      "magnitude spectrogram (T, F) of a 16 kHz signal");

  m.def(
      "snr_schedule",
      [](const std::string& scheme, int k) {
        return snr_schedule(scheme_from_name(scheme), k).values_db;
      },
      py::arg("scheme"), py::arg("k"),
      "per-channel SNR values for 'decreasing', 'increasing' or 'training_grid'");

  m.def(
      "make_example",
      [](uint64_t seed, int k, const std::string& scheme, uint64_t bank_seed,
         int speech_clips, int noise_clips, bool per_frame_shuffle) {
        ClipBank speech = synth_bank(ClipKind::Speech, mix_seed(bank_seed, 1), speech_clips);
        ClipBank noise = synth_bank(ClipKind::Noise, mix_seed(bank_seed, 2), noise_clips);
        Rng rng(seed);
        MixtureRecipe r = draw_recipe(rng, speech, noise,
                                      snr_schedule(scheme_from_name(scheme), k),
                                      per_frame_shuffle, 0);
        LabeledExample ex = realize(r, speech, noise, FrameSpec{});
        py::array_t<int> labels(static_cast<py::ssize_t>(ex.labels.size()));
        for (size_t i = 0; i < ex.labels.size(); ++i)
          labels.mutable_data()[i] = ex.labels[i];
        py::dict out;
        out["grid"] = grid_to_array(ex.grid);
        out["labels"] = labels;
        out["recipe"] = recipe_to_line(ex.recipe);
        return out;
      },
      py::arg("seed"), py::arg("k") = 4, py::arg("scheme") = "training_grid",
      py::arg("bank_seed") = 7, py::arg("speech_clips") = 16, py::arg("noise_clips") = 16,
      py::arg("per_frame_shuffle") = true,
      "one synthetic multi-channel labeled example");

  m.def(
      "sample_scene",
      [](uint64_t seed, int mics) {
        Rng rng(seed);
        return serialize_scene(scene_sample(rng, mics));
      },
      py::arg("seed"), py::arg("mics") = 4, "sampled room scene, serialized as text");

  m.def(
      "image_sources",
      [](const std::string& scene_text, double sx, double sy) {
        RoomScene scene = parse_scene(scene_text);
        auto images = image_sources(scene, {sx, sy});
        py::array_t<double> out({static_cast<py::ssize_t>(images.size()), py::ssize_t(4)});
        double* d = out.mutable_data();
        for (const auto& img : images) {
          *d++ = img.pos.x;
          *d++ = img.pos.y;
          *d++ = img.order;
          *d++ = img.amplitude;
        }
        return out;
      },
      py::arg("scene_text"), py::arg("source_x"), py::arg("source_y"),
      "mirror images (x, y, order, amplitude) for a source position");

  m.def(
      "rir",
      [](const std::string& scene_text, double sx, double sy, double mx, double my) {
        RoomScene scene = parse_scene(scene_text);
        Rir r = rir(scene, {sx, sy}, {mx, my});
        py::array_t<double> out(static_cast<py::ssize_t>(r.taps.size()));
        std::copy(r.taps.begin(), r.taps.end(), out.mutable_data());
        return out;
      },
      py::arg("scene_text"), py::arg("source_x"), py::arg("source_y"), py::arg("mic_x"),
      py::arg("mic_y"), "impulse response taps at 16 kHz");

  py::class_<Model>(m, "Model")
      .def(py::init<const std::string&>(), py::arg("checkpoint_path"))
      .def_property_readonly("kind", &Model::kind)
      .def_property_readonly("hidden", &Model::hidden)
      .def("predict", &Model::predict_grid, py::arg("grid"),
           "returns (probs[T, 2], labels[T]) for a (K, T, F) grid");

  m.def(
      "gen_data",
      [](const std::string& config_text, const std::string& out_dir) {
        cmd::gen_data(config_from_text(config_text), out_dir);
      },
      py::arg("config_text"), py::arg("out_dir"));
  m.def(
      "simulate",
      [](const std::string& config_text, const std::string& out_dir) {
        cmd::simulate(config_from_text(config_text), out_dir);
      },
      py::arg("config_text"), py::arg("out_dir"));
  m.def(
      "train",
      [](const std::string& config_text, const std::string& out_dir) {
        cmd::train_run(config_from_text(config_text), out_dir);
      },
      py::arg("config_text"), py::arg("out_dir"));
  m.def(
      "evaluate",
      [](const std::string& config_text, const std::vector<std::string>& checkpoints,
         const std::string& out_dir) {
        cmd::eval_run(config_from_text(config_text), checkpoints, out_dir);
      },
      py::arg("config_text"), py::arg("checkpoints"), py::arg("out_dir"));
  m.def(
      "plot",
      [](const std::vector<std::string>& csv_paths, const std::string& out_dir) {
        return cmd::plot(csv_paths, out_dir);
      },
      py::arg("csv_paths"), py::arg("out_dir"));
  m.def("default_config", []() { return RunConfig::defaults().serialize(); },
        "canonical configuration text with every key at its default");
}
