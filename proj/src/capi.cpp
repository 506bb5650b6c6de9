#include "voxkit.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxkit/datagen.hpp"
#include "voxkit/frame.hpp"
#include "voxkit/fusion.hpp"
#include "voxkit/losses.hpp"
#include "voxkit/mesh.hpp"
#include "voxkit/metrics.hpp"
#include "voxkit/png_io.hpp"
#include "voxkit/refine.hpp"
#include "voxkit/render.hpp"
#include "voxkit/scan_io.hpp"
#include "voxkit/synth.hpp"
#include "voxkit/volume.hpp"

struct vxk_scan {
  std::vector<voxkit::RgbdFrame> frames;
};

struct vxk_volume {
  voxkit::TsdfVolume vol;
};

struct vxk_mesh {
  voxkit::ColoredMesh mesh;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
vxk_status guarded(Fn&& fn) {
  try {
    fn();
    return VXK_OK;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return VXK_ERROR_INVALID_ARGUMENT;
  } catch (const std::ios_base::failure& e) {
    set_error(e.what());
    return VXK_ERROR_IO;
  } catch (const std::exception& e) {
    set_error(e.what());
    return VXK_ERROR_RUNTIME;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

extern "C" {

const char* vxk_version(void) { return "0.1.0"; }

const char* vxk_last_error(void) { return g_last_error.c_str(); }

/* ---- scans ---------------------------------------------------------- */

vxk_status vxk_scan_load(const char* dir, vxk_scan** out) {
  return guarded([&] {
    require(dir && out, "vxk_scan_load: null argument");
    auto scan = std::make_unique<vxk_scan>();
    scan->frames = voxkit::load_scan(dir);
    require(!scan->frames.empty(), "vxk_scan_load: scan has no frames");
    *out = scan.release();
  });
}

void vxk_scan_free(vxk_scan* scan) { delete scan; }

int vxk_scan_frame_count(const vxk_scan* scan) {
  return scan ? static_cast<int>(scan->frames.size()) : 0;
}

int vxk_scan_frame_id(const vxk_scan* scan, int index) {
  if (!scan || index < 0 || index >= static_cast<int>(scan->frames.size()))
    return -1;
  return scan->frames[static_cast<size_t>(index)].frame_id;
}

vxk_status vxk_scan_select(const vxk_scan* scan, const int* indices, int count,
                           vxk_scan** out) {
  return guarded([&] {
    require(scan && indices && out && count > 0,
            "vxk_scan_select: null or empty argument");
    auto sub = std::make_unique<vxk_scan>();
    for (int i = 0; i < count; ++i) {
      require(indices[i] >= 0 &&
                  indices[i] < static_cast<int>(scan->frames.size()),
              "vxk_scan_select: index out of range");
      sub->frames.push_back(scan->frames[static_cast<size_t>(indices[i])]);
    }
    *out = sub.release();
  });
}

vxk_status vxk_synth_scene(const char* shape, double size, int n_views,
                           uint64_t seed, int width, int height,
                           const char* out_dir) {
  return guarded([&] {
    require(shape && out_dir, "vxk_synth_scene: null argument");
    voxkit::SynthSceneSpec spec;
    spec.shape = voxkit::synth_shape_from_name(shape);
    spec.size = size;
    spec.n_views = n_views;
    spec.seed = seed;
    if (width > 0) spec.width = width;
    if (height > 0) spec.height = height;
    voxkit::synth_scene(spec, out_dir);
  });
}

/* ---- volumes --------------------------------------------------------- */

vxk_status vxk_volume_load(const char* path, vxk_volume** out) {
  return guarded([&] {
    require(path && out, "vxk_volume_load: null argument");
    auto vol = std::make_unique<vxk_volume>();
    vol->vol = voxkit::TsdfVolume::load(path);
    *out = vol.release();
  });
}

vxk_status vxk_volume_save(const vxk_volume* vol, const char* path) {
  return guarded([&] {
    require(vol && path, "vxk_volume_save: null argument");
    vol->vol.save(path);
  });
}

void vxk_volume_free(vxk_volume* vol) { delete vol; }

void vxk_volume_dims(const vxk_volume* vol, int dims[3]) {
  for (int i = 0; i < 3; ++i) dims[i] = vol ? vol->vol.dims()[i] : 0;
}

double vxk_volume_voxel_size(const vxk_volume* vol) {
  return vol ? vol->vol.voxel_size() : 0.0;
}

double vxk_volume_truncation(const vxk_volume* vol) {
  return vol ? vol->vol.truncation() : 0.0;
}

void vxk_volume_origin(const vxk_volume* vol, double origin[3]) {
  for (int i = 0; i < 3; ++i) origin[i] = vol ? vol->vol.origin()[i] : 0.0;
}

vxk_status vxk_fuse_scan(const vxk_scan* scan, double voxel_size,
                         double truncation, int threads, vxk_volume** out) {
  return guarded([&] {
    require(scan && out, "vxk_fuse_scan: null argument");
    require(voxel_size > 0.0, "vxk_fuse_scan: voxel_size must be > 0");
    if (truncation <= 0.0) truncation = 3.0 * voxel_size;
    const voxkit::GridSpec spec =
        voxkit::fit_grid(scan->frames, voxel_size, truncation);
    auto vol = std::make_unique<vxk_volume>();
    vol->vol = voxkit::fuse_scan(scan->frames, spec, threads);
    *out = vol.release();
  });
}

/* ---- rendering ------------------------------------------------------- */

vxk_status vxk_render_frame_pngs(const vxk_volume* vol, const vxk_scan* scan,
                                 int frame_index, const char* depth_png,
                                 const char* normal_png, const char* color_png,
                                 int threads) {
  return guarded([&] {
    require(vol && scan, "vxk_render_frame_pngs: null argument");
    require(frame_index >= 0 &&
                frame_index < static_cast<int>(scan->frames.size()),
            "vxk_render_frame_pngs: frame index out of range");
    const voxkit::CameraView& view =
        scan->frames[static_cast<size_t>(frame_index)].view;
    const voxkit::RenderedViews rv = voxkit::render(vol->vol, view, threads);
    const int w = view.width, h = view.height;

    if (depth_png) {
      voxkit::ImageU16 img(w, h, 1, 0);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (rv.valid(x, y))
            img(x, y) = static_cast<std::uint16_t>(std::clamp(
                std::lround(rv.depth(x, y) * 1000.0), 0l, 65535l));
      voxkit::write_png_gray16(img, depth_png);
    }
    if (normal_png) {
      voxkit::ImageU8 img(w, h, 3, 0);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (rv.valid(x, y))
            for (int c = 0; c < 3; ++c)
              img(x, y, c) = static_cast<std::uint8_t>(std::clamp(
                  std::lround((rv.normal(x, y, c) + 1.0) * 0.5 * 255.0), 0l,
                  255l));
      voxkit::write_png_rgb8(img, normal_png);
    }
    if (color_png) {
      voxkit::ImageU8 img(w, h, 3, 0);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (rv.valid(x, y))
            for (int c = 0; c < 3; ++c)
              img(x, y, c) = static_cast<std::uint8_t>(std::clamp(
                  std::lround(rv.color(x, y, c) * 255.0), 0l, 255l));
      voxkit::write_png_rgb8(img, color_png);
    }
  });
}

/* ---- self-supervised data generation --------------------------------- */

vxk_status vxk_make_pair(const vxk_scan* scan, double keep_fraction,
                         uint64_t seed, double voxel_size, double truncation,
                         int threads, vxk_volume** input_out,
                         vxk_volume** target_out, int* input_frame_ids,
                         int* n_input_frames) {
  return guarded([&] {
    require(scan && input_out && target_out, "vxk_make_pair: null argument");
    require(voxel_size > 0.0, "vxk_make_pair: voxel_size must be > 0");
    if (truncation <= 0.0) truncation = 3.0 * voxel_size;
    const voxkit::GridSpec spec =
        voxkit::fit_grid(scan->frames, voxel_size, truncation);
    voxkit::ScanPair pair =
        voxkit::make_pair(scan->frames, keep_fraction, seed, spec, threads);
    if (input_frame_ids) {
      for (size_t i = 0; i < pair.input_frame_ids.size(); ++i)
        input_frame_ids[i] = pair.input_frame_ids[i];
    }
    if (n_input_frames)
      *n_input_frames = static_cast<int>(pair.input_frame_ids.size());
    auto input = std::make_unique<vxk_volume>();
    auto target = std::make_unique<vxk_volume>();
    input->vol = std::move(pair.input_vol);
    target->vol = std::move(pair.target_vol);
    *input_out = input.release();
    *target_out = target.release();
  });
}

vxk_status vxk_sample_chunks(const vxk_scan* scan, const vxk_volume* input,
                             const vxk_volume* target, int stride_x,
                             int stride_y, int stride_z, int max_frames,
                             const char* out_dir, const char* manifest_path,
                             int* n_chunks_out) {
  return guarded([&] {
    require(input && target && out_dir && manifest_path,
            "vxk_sample_chunks: null argument");
    voxkit::ScanPair pair;
    pair.input_vol = input->vol;
    pair.target_vol = target->vol;
    if (max_frames <= 0) max_frames = voxkit::kChunkMaxFrames;
    const std::span<const voxkit::RgbdFrame> frames =
        scan ? std::span<const voxkit::RgbdFrame>(scan->frames)
             : std::span<const voxkit::RgbdFrame>();
    const std::vector<voxkit::ChunkSample> chunks = voxkit::sample_chunks(
        pair, voxkit::Vec3i(stride_x, stride_y, stride_z), frames, max_frames);

    std::filesystem::create_directories(out_dir);
    std::ofstream manifest(manifest_path);
    if (!manifest)
      throw std::runtime_error(std::string("cannot write manifest: ") +
                               manifest_path);
    char name[64];
    for (size_t i = 0; i < chunks.size(); ++i) {
      const voxkit::ChunkSample& c = chunks[i];
      std::snprintf(name, sizeof(name), "chunk-%04zu", i);
      const std::string input_path =
          std::string(out_dir) + "/" + name + ".input.tsdf";
      const std::string target_path =
          std::string(out_dir) + "/" + name + ".target.tsdf";
      c.input_chunk.save(input_path);
      c.target_chunk.save(target_path);
      nlohmann::json rec;
      rec["chunk_id"] = i;
      rec["origin_voxel"] = {c.origin_voxel.x(), c.origin_voxel.y(),
                             c.origin_voxel.z()};
      rec["occupancy"] = c.occupancy;
      rec["frames"] = c.frame_ids;
      rec["input_path"] = input_path;
      rec["target_path"] = target_path;
      manifest << rec.dump() << "\n";
    }
    if (n_chunks_out) *n_chunks_out = static_cast<int>(chunks.size());
  });
}

/* ---- refinement ------------------------------------------------------ */

void vxk_refine_config_defaults(vxk_refine_config* cfg) {
  if (!cfg) return;
  const voxkit::RefineConfig d;
  cfg->iterations = d.iterations;
  cfg->lr_tsdf = d.lr_tsdf;
  cfg->lr_color = d.lr_color;
  cfg->w_g = d.w_g;
  cfg->adam_beta1 = d.adam_beta1;
  cfg->adam_beta2 = d.adam_beta2;
  cfg->adam_eps = d.adam_eps;
  cfg->views_per_step = d.views_per_step;
  cfg->seed = d.seed;
  cfg->threads = d.threads;
}

vxk_status vxk_refine(const vxk_volume* init, const vxk_scan* frames,
                      const vxk_volume* target, const vxk_refine_config* cfg,
                      const char* history_csv, vxk_volume** out) {
  return guarded([&] {
    require(init && frames && target && cfg && out,
            "vxk_refine: null argument");
    voxkit::RefineConfig rc;
    rc.iterations = cfg->iterations;
    rc.lr_tsdf = cfg->lr_tsdf;
    rc.lr_color = cfg->lr_color;
    rc.w_g = cfg->w_g;
    rc.adam_beta1 = cfg->adam_beta1;
    rc.adam_beta2 = cfg->adam_beta2;
    rc.adam_eps = cfg->adam_eps;
    rc.views_per_step = cfg->views_per_step;
    rc.seed = cfg->seed;
    rc.threads = cfg->threads;
    voxkit::RefineResult result =
        voxkit::refine_volume(init->vol, frames->frames, target->vol, rc);
    if (history_csv) {
      std::ofstream os(history_csv);
      if (!os)
        throw std::runtime_error(std::string("cannot write history: ") +
                                 history_csv);
      os << "iter,l_depth,l_color,l_geo3d,total\n";
      os.precision(12);
      for (size_t i = 0; i < result.history.size(); ++i) {
        const voxkit::LossReport& r = result.history[i];
        os << i << "," << r.l_depth << "," << r.l_color << "," << r.l_geo3d
           << "," << r.total << "\n";
      }
    }
    auto vol = std::make_unique<vxk_volume>();
    vol->vol = std::move(result.volume);
    *out = vol.release();
  });
}

/* ---- meshing --------------------------------------------------------- */

vxk_status vxk_marching_cubes(const vxk_volume* vol, double iso,
                              vxk_mesh** out) {
  return guarded([&] {
    require(vol && out, "vxk_marching_cubes: null argument");
    auto mesh = std::make_unique<vxk_mesh>();
    mesh->mesh = voxkit::marching_cubes(vol->vol, iso);
    *out = mesh.release();
  });
}

void vxk_mesh_free(vxk_mesh* mesh) { delete mesh; }

long vxk_mesh_vertex_count(const vxk_mesh* mesh) {
  return mesh ? static_cast<long>(mesh->mesh.vertices.size()) : 0;
}

long vxk_mesh_triangle_count(const vxk_mesh* mesh) {
  return mesh ? static_cast<long>(mesh->mesh.triangles.size()) : 0;
}

vxk_status vxk_mesh_save_ply(const vxk_mesh* mesh, const char* path) {
  return guarded([&] {
    require(mesh && path, "vxk_mesh_save_ply: null argument");
    voxkit::save_ply(mesh->mesh, path);
  });
}

vxk_status vxk_mesh_load_ply(const char* path, vxk_mesh** out) {
  return guarded([&] {
    require(path && out, "vxk_mesh_load_ply: null argument");
    auto mesh = std::make_unique<vxk_mesh>();
    mesh->mesh = voxkit::load_ply(path);
    *out = mesh.release();
  });
}

/* ---- losses and metrics ---------------------------------------------- */

vxk_status vxk_eval_loss(const vxk_volume* pred, const vxk_volume* target,
                         const vxk_scan* views, double w_g, int threads,
                         vxk_loss_report* out) {
  return guarded([&] {
    require(pred && target && views && out, "vxk_eval_loss: null argument");
    const voxkit::LossReport r = voxkit::reconstruction_loss(
        pred->vol, target->vol, views->frames, w_g, nullptr, threads);
    out->l_depth = r.l_depth;
    out->l_color = r.l_color;
    out->l_geo3d = r.l_geo3d;
    out->total = r.total;
    out->n_valid_pixels = r.n_valid_pixels;
    out->n_valid_voxels = r.n_valid_voxels;
  });
}

vxk_status vxk_eval_ssim(const vxk_volume* pred, const vxk_scan* views,
                         int threads, double* out) {
  return guarded([&] {
    require(pred && views && out, "vxk_eval_ssim: null argument");
    require(!views->frames.empty(), "vxk_eval_ssim: no views");
    double acc = 0.0;
    for (const voxkit::RgbdFrame& frame : views->frames) {
      const voxkit::RenderedViews rv =
          voxkit::render(pred->vol, frame.view, threads);
      voxkit::ImageF rendered = frame.color;  // invalid pixels keep the target
      for (int y = 0; y < frame.view.height; ++y)
        for (int x = 0; x < frame.view.width; ++x)
          if (rv.valid(x, y))
            for (int c = 0; c < 3; ++c)
              rendered(x, y, c) = rv.color(x, y, c);
      acc += voxkit::ssim(rendered, frame.color);
    }
    *out = acc / static_cast<double>(views->frames.size());
  });
}

vxk_status vxk_eval_iou_recall(const vxk_mesh* pred, const vxk_mesh* target,
                               double voxel_size, const vxk_volume* ignore,
                               double* iou, double* recall) {
  return guarded([&] {
    require(pred && target && iou && recall,
            "vxk_eval_iou_recall: null argument");
    const voxkit::IouRecall r = voxkit::voxel_iou_recall(
        pred->mesh, target->mesh, voxel_size, ignore ? &ignore->vol : nullptr);
    *iou = r.iou;
    *recall = r.recall;
  });
}

vxk_status vxk_eval_chamfer(const vxk_mesh* pred, const vxk_mesh* target,
                            int n_samples, uint64_t seed, double* out) {
  return guarded([&] {
    require(pred && target && out, "vxk_eval_chamfer: null argument");
    if (n_samples <= 0) n_samples = 30000;
    *out = voxkit::chamfer(pred->mesh, target->mesh, n_samples, seed);
  });
}

} /* extern "C" */
