#include "ffp/dataio.hpp"

#include "ffp/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;

namespace ffp {

namespace {

constexpr char kMagic[4] = {'F', 'F', 'P', 'M'};
constexpr std::size_t kHeaderSize = 4 + 1 + 8 + 8;

void put_u64(std::vector<unsigned char> &out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint64_t get_u64(const unsigned char *p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

std::vector<unsigned char> slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const fs::path &path, const char *data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(data, static_cast<std::streamsize>(size));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// PGM header tokens are whitespace separated and may be interleaved with
// '#' comments running to end of line.
class PgmHeaderReader {
public:
  explicit PgmHeaderReader(const std::vector<unsigned char> &bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string tok;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) tok += static_cast<char>(bytes_[pos_++]);
    if (tok.empty()) throw FormatError("truncated PGM header", pos_);
    return tok;
  }

  int integer() {
    const std::size_t at = pos_;
    const std::string tok = token();
    int v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || v <= 0)
      throw FormatError("bad PGM header field '" + tok + "'", at);
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      throw FormatError("missing separator before PGM raster", pos_);
    return pos_ + 1;
  }

private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char> &bytes_;
  std::size_t pos_ = 0;
};

std::string lower_extension(const fs::path &p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

} // namespace

// --- FFPM -------------------------------------------------------------------

void write_ffpm(const fs::path &path, const Matrix &m) {
  std::vector<unsigned char> out;
  out.reserve(kHeaderSize + 8 * static_cast<std::size_t>(m.size()));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kFfpmVersion);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_u64(out, std::bit_cast<std::uint64_t>(m(i, j)));
  dump(path, reinterpret_cast<const char *>(out.data()), out.size());
}

Matrix parse_ffpm(const std::vector<unsigned char> &bytes) {
  if (bytes.empty()) throw FormatError("empty FFPM file", 0);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("bad magic, expected 'FFPM'", 0);
  if (bytes.size() < 5) throw FormatError("truncated header", bytes.size());
  if (bytes[4] != kFfpmVersion)
    throw FormatError("unsupported FFPM version " + std::to_string(bytes[4]), 4);
  if (bytes.size() < kHeaderSize) throw FormatError("truncated header", bytes.size());
  const std::uint64_t rows = get_u64(bytes.data() + 5);
  const std::uint64_t cols = get_u64(bytes.data() + 13);

  constexpr auto kMaxIndex = static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max());
  if (rows > kMaxIndex || cols > kMaxIndex || (cols != 0 && rows > kMaxIndex / 8 / cols))
    throw FormatError("dimension overflow (" + std::to_string(rows) + " x " +
                          std::to_string(cols) + ")",
                      5);
  const std::uint64_t payload = rows * cols * 8;
  const std::uint64_t available = bytes.size() - kHeaderSize;
  if (available < payload)
    throw FormatError("truncated payload: expected " + std::to_string(payload) +
                          " bytes, found " + std::to_string(available),
                      bytes.size());
  if (available > payload) throw FormatError("trailing bytes after payload", kHeaderSize + payload);

  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const unsigned char *p = bytes.data() + kHeaderSize;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j, p += 8) m(i, j) = std::bit_cast<double>(get_u64(p));
  return m;
}

Matrix read_ffpm(const fs::path &path) { return parse_ffpm(slurp(path)); }

// --- CSV --------------------------------------------------------------------

void write_csv(const fs::path &path, const Matrix &m) {
  std::ostringstream os;
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      const auto res = std::to_chars(buf, buf + sizeof buf, m(i, j), std::chars_format::general, 17);
      os.write(buf, res.ptr - buf);
    }
    os << '\n';
  }
  const std::string text = os.str();
  dump(path, text.data(), text.size());
}

Matrix parse_csv(const std::string &text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    const std::string_view line = trim(std::string_view(text).substr(line_start, line_end - line_start));
    if (!line.empty()) {
      std::vector<double> row;
      std::size_t cell_start = 0;
      while (true) {
        std::size_t comma = line.find(',', cell_start);
        const std::string_view cell =
            trim(line.substr(cell_start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - cell_start));
        double v = 0.0;
        const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (cell.empty() || ec != std::errc() || p != cell.data() + cell.size())
          throw FormatError("row " + std::to_string(rows.size() + 1) + ", column " +
                                std::to_string(row.size() + 1) + ": non-numeric cell '" +
                                std::string(cell) + "'",
                            static_cast<std::size_t>(cell.data() - text.data()));
        row.push_back(v);
        if (comma == std::string_view::npos) break;
        cell_start = comma + 1;
      }
      if (!rows.empty() && row.size() != rows.front().size())
        throw FormatError("row " + std::to_string(rows.size() + 1) + " has " +
                              std::to_string(row.size()) + " cells, expected " +
                              std::to_string(rows.front().size()),
                          line_start);
      rows.push_back(std::move(row));
    }
    line_start = line_end + 1;
  }
  if (rows.empty()) throw FormatError("empty CSV matrix", 0);

  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

Matrix read_csv(const fs::path &path) {
  const auto bytes = slurp(path);
  return parse_csv(std::string(bytes.begin(), bytes.end()));
}

void write_matrix(const fs::path &path, const Matrix &m) {
  if (lower_extension(path) == ".csv")
    write_csv(path, m);
  else
    write_ffpm(path, m);
}

Matrix read_matrix(const fs::path &path) {
  const auto bytes = slurp(path);
  if (bytes.empty()) throw FormatError("empty matrix file '" + path.string() + "'", 0);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return parse_ffpm(bytes);
  if (lower_extension(path) != ".csv") return parse_ffpm(bytes); // reports the bad magic
  return parse_csv(std::string(bytes.begin(), bytes.end()));
}

// --- PGM (P5) ---------------------------------------------------------------

GrayImage read_pgm(const fs::path &path) {
  const auto bytes = slurp(path);
  PgmHeaderReader header(bytes);
  if (header.token() != "P5") throw FormatError("'" + path.string() + "' is not a binary PGM (P5)", 0);
  GrayImage img;
  img.width = header.integer();
  img.height = header.integer();
  const int maxval = header.integer();
  if (maxval > 255) throw FormatError("only 8-bit PGM is supported (maxval " + std::to_string(maxval) + ")", 0);
  const std::size_t start = header.raster_start();
  const std::size_t count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  if (bytes.size() < start + count)
    throw FormatError("truncated PGM raster in '" + path.string() + "'", bytes.size());
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                    bytes.begin() + static_cast<std::ptrdiff_t>(start + count));
  return img;
}

void write_pgm(const fs::path &path, const GrayImage &img) {
  if (img.height < 1 || img.width < 1 ||
      img.pixels.size() != static_cast<std::size_t>(img.height) * static_cast<std::size_t>(img.width))
    throw InvalidArgument("write_pgm: pixel count does not match dimensions");
  std::string data = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  data.append(img.pixels.begin(), img.pixels.end());
  dump(path, data.data(), data.size());
}

FrameStack load_frame_stack(const fs::path &dir, int downsample) {
  if (downsample < 1) throw InvalidArgument("load_frame_stack: downsample factor must be >= 1");
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");

  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && lower_extension(entry.path()) == ".pgm")
      files.push_back(entry.path());
  if (files.empty()) throw InvalidInput("no .pgm frames in '" + dir.string() + "'");
  std::sort(files.begin(), files.end(),
            [](const fs::path &a, const fs::path &b) { return a.filename().string() < b.filename().string(); });

  FrameStack stack;
  int src_h = 0, src_w = 0;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const GrayImage img = read_pgm(files[f]);
    if (f == 0) {
      src_h = img.height;
      src_w = img.width;
      stack.frame_height = (src_h + downsample - 1) / downsample;
      stack.frame_width = (src_w + downsample - 1) / downsample;
      stack.matrix.resize(static_cast<Eigen::Index>(stack.frame_height) * stack.frame_width,
                          static_cast<Eigen::Index>(files.size()));
    } else if (img.height != src_h || img.width != src_w) {
      throw InvalidInput("frame '" + files[f].filename().string() + "' is " +
                         std::to_string(img.width) + "x" + std::to_string(img.height) +
                         ", expected " + std::to_string(src_w) + "x" + std::to_string(src_h));
    }
    for (int c = 0; c < stack.frame_width; ++c)
      for (int r = 0; r < stack.frame_height; ++r) {
        const std::size_t src = static_cast<std::size_t>(r * downsample) * src_w +
                                static_cast<std::size_t>(c * downsample);
        stack.matrix(static_cast<Eigen::Index>(c) * stack.frame_height + r,
                     static_cast<Eigen::Index>(f)) = img.pixels[src];
      }
    stack.frame_names.push_back(files[f].filename().string());
  }
  return stack;
}

int write_frame(const Eigen::Ref<const Vector> &column, int frame_height, int frame_width,
                const fs::path &path) {
  if (frame_height < 1 || frame_width < 1 ||
      column.size() != static_cast<Eigen::Index>(frame_height) * frame_width)
    throw InvalidArgument("write_frame: column length " + std::to_string(column.size()) +
                          " does not match " + std::to_string(frame_height) + "x" +
                          std::to_string(frame_width));
  GrayImage img;
  img.height = frame_height;
  img.width = frame_width;
  img.pixels.resize(static_cast<std::size_t>(frame_height) * frame_width);
  int clamped = 0;
  for (int c = 0; c < frame_width; ++c)
    for (int r = 0; r < frame_height; ++r) {
      double v = std::round(column(static_cast<Eigen::Index>(c) * frame_height + r));
      if (!(v >= 0.0 && v <= 255.0)) {
        ++clamped;
        v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 255.0);
      }
      img.pixels[static_cast<std::size_t>(r) * frame_width + c] = static_cast<std::uint8_t>(v);
    }
  write_pgm(path, img);
  if (clamped > 0)
    std::cerr << "warning: " << path.string() << ": " << clamped
              << " pixel(s) outside [0, 255] were clamped\n";
  return clamped;
}

// --- JSON -------------------------------------------------------------------

nlohmann::json to_json(const SolverConfig &cfg) {
  nlohmann::json j;
  j["k"] = cfg.k;
  j["lambda"] = cfg.lambda ? nlohmann::json(*cfg.lambda) : nlohmann::json(nullptr);
  j["rho0"] = cfg.rho0;
  j["kappa"] = cfg.kappa;
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  j["rho_cap"] = cfg.rho_cap;
  j["init"] = to_string(cfg.init);
  j["seed"] = cfg.seed;
  j["ignore_tol"] = cfg.ignore_tol;
  j["threads"] = cfg.threads;
  return j;
}

nlohmann::json to_json(const SolveReport &r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["svd_count"] = r.svd_count;
  j["svd_breakdown"] = {{"v_update", r.svd_count_v}, {"u_update", r.svd_count_u}, {"c_update", r.svd_count_c}};
  j["per_iter_residual"] = r.per_iter_residual;
  j["per_iter_orthonormality"] = r.per_iter_orthonormality;
  j["per_iter_rho"] = r.per_iter_rho;
  j["final_rank"] = r.final_rank;
  j["sparsity_ratio"] = r.sparsity_ratio;
  j["final_residual"] = r.final_residual;
  j["wall_time"] = r.wall_time;
  j["final_objective"] = r.final_objective;
  j["lambda"] = r.lambda;
  return j;
}

void write_json(const fs::path &path, const nlohmann::json &j) {
  const std::string text = j.dump(2) + "\n";
  dump(path, text.data(), text.size());
}

nlohmann::json read_json(const fs::path &path) {
  const auto bytes = slurp(path);
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
}

} // namespace ffp
