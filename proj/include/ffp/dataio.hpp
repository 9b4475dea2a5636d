#pragma once

// Matrix files, grayscale frame stacks and JSON reports.
//
// FFPM binary layout (all integers and floats little-endian):
//   offset 0   "FFPM"            magic
//   offset 4   u8                version (1)
//   offset 5   u64               rows
//   offset 13  u64               cols
//   offset 21  f64[rows * cols]  entries, row-major
//
// CSV: one matrix row per line, comma-separated, 17 significant digits.

#include "ffp/linalg.hpp"
#include "ffp/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ffp {

inline constexpr std::uint8_t kFfpmVersion = 1;

void write_ffpm(const std::filesystem::path &path, const Matrix &m);
Matrix read_ffpm(const std::filesystem::path &path);
Matrix parse_ffpm(const std::vector<unsigned char> &bytes);

void write_csv(const std::filesystem::path &path, const Matrix &m);
Matrix read_csv(const std::filesystem::path &path);
Matrix parse_csv(const std::string &text);

/// Dispatches on extension: ".csv" is CSV, anything else is FFPM.
void write_matrix(const std::filesystem::path &path, const Matrix &m);
/// Sniffs the FFPM magic; otherwise parses as CSV.
Matrix read_matrix(const std::filesystem::path &path);

struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels; // row-major
};

GrayImage read_pgm(const std::filesystem::path &path);
void write_pgm(const std::filesystem::path &path, const GrayImage &img);

/// Frames as columns of a d x n matrix. Each frame is vectorized column-major:
/// pixel (r, c) lands at row c * frame_height + r.
struct FrameStack {
  Matrix matrix;
  int frame_height = 0;
  int frame_width = 0;
  std::vector<std::string> frame_names;
};

/// Loads every *.pgm file in `dir` in lexicographic order, keeping every
/// `downsample`-th pixel along each axis.
FrameStack load_frame_stack(const std::filesystem::path &dir, int downsample = 1);

/// Inverse of the frame vectorization. Values are rounded and clamped to
/// [0, 255]; returns how many pixels needed clamping (a warning is printed
/// to stderr when nonzero).
int write_frame(const Eigen::Ref<const Vector> &column, int frame_height, int frame_width,
                const std::filesystem::path &path);

nlohmann::json to_json(const SolverConfig &cfg);
nlohmann::json to_json(const SolveReport &report);
void write_json(const std::filesystem::path &path, const nlohmann::json &j);
nlohmann::json read_json(const std::filesystem::path &path);

} // namespace ffp
