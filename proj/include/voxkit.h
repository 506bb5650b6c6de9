/* voxkit C API: colored TSDF fusion, differentiable raycasting, scene
 * refinement, meshing, and evaluation behind opaque handles.
 *
 * All functions returning vxk_status yield VXK_OK (0) on success; on failure
 * they return a nonzero code and vxk_last_error() describes the problem for
 * the calling thread. Out-parameters are only written on success. Handles
 * are released with the matching *_free function.
 */
#ifndef VOXKIT_H
#define VOXKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VXK_API __declspec(dllexport)
#else
#define VXK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vxk_status {
  VXK_OK = 0,
  VXK_ERROR_INVALID_ARGUMENT = 1,
  VXK_ERROR_IO = 2,
  VXK_ERROR_RUNTIME = 3
} vxk_status;

typedef struct vxk_scan vxk_scan;     /* list of registered RGB-D frames */
typedef struct vxk_volume vxk_volume; /* colored TSDF voxel grid */
typedef struct vxk_mesh vxk_mesh;     /* colored triangle mesh */

VXK_API const char* vxk_version(void);
VXK_API const char* vxk_last_error(void);

/* ---- scans ---------------------------------------------------------- */

VXK_API vxk_status vxk_scan_load(const char* dir, vxk_scan** out);
VXK_API void vxk_scan_free(vxk_scan* scan);
VXK_API int vxk_scan_frame_count(const vxk_scan* scan);
VXK_API int vxk_scan_frame_id(const vxk_scan* scan, int index);

/* Subset of frames by positional index (not frame id). */
VXK_API vxk_status vxk_scan_select(const vxk_scan* scan, const int* indices,
                                   int count, vxk_scan** out);

/* Writes an analytic scene ("sphere", "box", "room") as a scan directory.
 * size <= 0 selects the shape default. */
VXK_API vxk_status vxk_synth_scene(const char* shape, double size, int n_views,
                                   uint64_t seed, int width, int height,
                                   const char* out_dir);

/* ---- volumes --------------------------------------------------------- */

VXK_API vxk_status vxk_volume_load(const char* path, vxk_volume** out);
VXK_API vxk_status vxk_volume_save(const vxk_volume* vol, const char* path);
VXK_API void vxk_volume_free(vxk_volume* vol);
VXK_API void vxk_volume_dims(const vxk_volume* vol, int dims[3]);
VXK_API double vxk_volume_voxel_size(const vxk_volume* vol);
VXK_API double vxk_volume_truncation(const vxk_volume* vol);
VXK_API void vxk_volume_origin(const vxk_volume* vol, double origin[3]);

/* Volumetric fusion of all frames on an automatically fitted grid. */
VXK_API vxk_status vxk_fuse_scan(const vxk_scan* scan, double voxel_size,
                                 double truncation, int threads,
                                 vxk_volume** out);

/* ---- rendering ------------------------------------------------------- */

/* Raycasts the volume from the view of scan frame `frame_index` and writes
 * depth (16-bit PNG, millimeters, 0 = invalid), normals (8-bit PNG, channels
 * mapped (n+1)/2), and color (8-bit PNG). Any output path may be NULL to
 * skip that image. */
VXK_API vxk_status vxk_render_frame_pngs(const vxk_volume* vol,
                                         const vxk_scan* scan, int frame_index,
                                         const char* depth_png,
                                         const char* normal_png,
                                         const char* color_png, int threads);

/* ---- self-supervised data generation --------------------------------- */

/* Fuses an input volume from ceil(keep_fraction * K) seeded frames and a
 * target volume from all frames, on the same grid. `input_frame_ids` (caller
 * array of at least vxk_scan_frame_count entries, may be NULL) receives the
 * chosen frame ids; *n_input_frames their number. */
VXK_API vxk_status vxk_make_pair(const vxk_scan* scan, double keep_fraction,
                                 uint64_t seed, double voxel_size,
                                 double truncation, int threads,
                                 vxk_volume** input_out,
                                 vxk_volume** target_out, int* input_frame_ids,
                                 int* n_input_frames);

/* Slides a 64x64x128 window at the given stride, keeps windows with at least
 * 0.5% near-surface occupancy in the input volume, associates up to
 * `max_frames` frames per chunk by overlap, writes chunk-NNNN.input.tsdf /
 * chunk-NNNN.target.tsdf under out_dir plus one JSON line per chunk into
 * manifest_path. */
VXK_API vxk_status vxk_sample_chunks(const vxk_scan* scan,
                                     const vxk_volume* input,
                                     const vxk_volume* target, int stride_x,
                                     int stride_y, int stride_z,
                                     int max_frames, const char* out_dir,
                                     const char* manifest_path,
                                     int* n_chunks_out);

/* ---- refinement ------------------------------------------------------ */

typedef struct vxk_refine_config {
  int iterations;
  double lr_tsdf;  /* < 0 selects 0.1 * voxel_size */
  double lr_color;
  double w_g;
  double adam_beta1;
  double adam_beta2;
  double adam_eps;
  int views_per_step;
  uint64_t seed;
  int threads;
} vxk_refine_config;

VXK_API void vxk_refine_config_defaults(vxk_refine_config* cfg);

/* Optimizes the volume's distance and color fields against the scan frames
 * by Adam through the differentiable renderer. history_csv (optional) gets
 * one "iter,l_depth,l_color,l_geo3d,total" row per iteration. */
VXK_API vxk_status vxk_refine(const vxk_volume* init, const vxk_scan* frames,
                              const vxk_volume* target,
                              const vxk_refine_config* cfg,
                              const char* history_csv, vxk_volume** out);

/* ---- meshing --------------------------------------------------------- */

VXK_API vxk_status vxk_marching_cubes(const vxk_volume* vol, double iso,
                                      vxk_mesh** out);
VXK_API void vxk_mesh_free(vxk_mesh* mesh);
VXK_API long vxk_mesh_vertex_count(const vxk_mesh* mesh);
VXK_API long vxk_mesh_triangle_count(const vxk_mesh* mesh);
VXK_API vxk_status vxk_mesh_save_ply(const vxk_mesh* mesh, const char* path);
VXK_API vxk_status vxk_mesh_load_ply(const char* path, vxk_mesh** out);

/* ---- losses and metrics ---------------------------------------------- */

typedef struct vxk_loss_report {
  double l_depth;
  double l_color;
  double l_geo3d;
  double total;
  long long n_valid_pixels;
  long long n_valid_voxels;
} vxk_loss_report;

/* Masked reconstruction loss of `pred` rendered at every scan view plus the
 * 3D term against `target`. */
VXK_API vxk_status vxk_eval_loss(const vxk_volume* pred,
                                 const vxk_volume* target,
                                 const vxk_scan* views, double w_g,
                                 int threads, vxk_loss_report* out);

/* Mean SSIM between the volume's rendered color and each frame's color;
 * pixels the render leaves invalid are filled from the frame. */
VXK_API vxk_status vxk_eval_ssim(const vxk_volume* pred, const vxk_scan* views,
                                 int threads, double* out);

/* Voxelized-mesh IoU/recall; voxels unobserved in `ignore` (optional) are
 * excluded from all counts. */
VXK_API vxk_status vxk_eval_iou_recall(const vxk_mesh* pred,
                                       const vxk_mesh* target,
                                       double voxel_size,
                                       const vxk_volume* ignore, double* iou,
                                       double* recall);

/* Symmetric Chamfer distance over n seeded surface samples per mesh. */
VXK_API vxk_status vxk_eval_chamfer(const vxk_mesh* pred,
                                    const vxk_mesh* target, int n_samples,
                                    uint64_t seed, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VOXKIT_H */
