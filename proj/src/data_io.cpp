#include "s2an2/data_io.hpp"

#include <cerrno>
#include <numbers>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "s2an2/rng.hpp"

namespace s2an2 {

namespace {

constexpr char kFrameMagic[] = "S2AN2FRM 1\n";  // 11 bytes
constexpr std::size_t kFrameMagicLen = 11;
constexpr char kModelMagic[] = "S2AN2-MODEL 1";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + text.size();
}

bool parse_index(const std::string& text, std::size_t& out) {
  if (text.empty() || text[0] == '-') return false;
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + text.size() || errno == ERANGE) return false;
  out = static_cast<std::size_t>(v);
  return true;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line_no,
                          const std::string& message) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + message);
}

}  // namespace

TabularDataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) fail_at(path, line_no, "missing header row");
  strip_cr(line);
  const std::vector<std::string> header = split(line, ',');
  if (header.size() < 2) fail_at(path, line_no, "header needs at least one feature and 'label'");
  if (header.back() != "label") fail_at(path, line_no, "last column must be 'label'");

  TabularDataset data;
  data.n_features = header.size() - 1;
  data.feature_names.assign(header.begin(), header.end() - 1);

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != data.n_features + 1) {
      fail_at(path, line_no,
              "ragged row: expected " + std::to_string(data.n_features + 1) + " fields, got " +
                  std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < data.n_features; ++i) {
      double v = 0.0;
      if (!parse_double(fields[i], v) || !std::isfinite(v)) {
        fail_at(path, line_no, "column " + std::to_string(i + 1) + ": not a finite number");
      }
      data.features.push_back(v);
    }
    std::size_t label = 0;
    if (!parse_index(fields.back(), label)) {
      fail_at(path, line_no, "label must be a non-negative integer");
    }
    data.labels.push_back(label);
  }
  data.validate();
  return data;
}

void write_csv(const TabularDataset& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  for (std::size_t i = 0; i < data.n_features; ++i) {
    out << (data.feature_names.empty() ? "f" + std::to_string(i) : data.feature_names[i]) << ',';
  }
  out << "label\n";
  for (std::size_t row = 0; row < data.n(); ++row) {
    const std::span<const double> sample = data.sample(row);
    for (double v : sample) out << fmt(v) << ',';
    out << data.labels[row] << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

namespace {

void put_u32le(std::string& bytes, std::uint32_t v) {
  bytes.push_back(static_cast<char>(v & 0xff));
  bytes.push_back(static_cast<char>((v >> 8) & 0xff));
  bytes.push_back(static_cast<char>((v >> 16) & 0xff));
  bytes.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_movie_container(const FrameSequence& movie, const std::filesystem::path& path) {
  movie.validate();
  std::string bytes;
  bytes.reserve(kFrameMagicLen + 12 + 4 * movie.pixels.size());
  bytes.append(kFrameMagic, kFrameMagicLen);
  put_u32le(bytes, static_cast<std::uint32_t>(movie.n_frames));
  put_u32le(bytes, static_cast<std::uint32_t>(movie.height));
  put_u32le(bytes, static_cast<std::uint32_t>(movie.width));
  for (double v : movie.pixels) {
    const float f = static_cast<float>(v);
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof(bits));
    put_u32le(bytes, bits);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

FrameSequence read_movie_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kFrameMagicLen ||
      std::memcmp(bytes.data(), kFrameMagic, kFrameMagicLen) != 0) {
    throw std::runtime_error(path.string() + ": bad magic, not a frame container");
  }
  if (bytes.size() < kFrameMagicLen + 12) {
    throw std::runtime_error(path.string() + ": truncated header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + kFrameMagicLen;
  const std::uint32_t n_frames = get_u32le(p);
  const std::uint32_t height = get_u32le(p + 4);
  const std::uint32_t width = get_u32le(p + 8);
  if (n_frames == 0 || height == 0 || width == 0) {
    throw std::runtime_error(path.string() + ": zero dimension");
  }
  const std::uint64_t count =
      static_cast<std::uint64_t>(n_frames) * height * width;
  const std::uint64_t expected = kFrameMagicLen + 12 + 4 * count;
  if (bytes.size() != expected) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(expected) +
                             " bytes, got " + std::to_string(bytes.size()));
  }
  FrameSequence movie;
  movie.n_frames = n_frames;
  movie.height = height;
  movie.width = width;
  movie.pixels.resize(count);
  const unsigned char* q = p + 12;
  for (std::uint64_t i = 0; i < count; ++i, q += 4) {
    const std::uint32_t bits = get_u32le(q);
    float f = 0.0f;
    std::memcpy(&f, &bits, sizeof(f));
    movie.pixels[i] = static_cast<double>(f);
  }
  movie.validate();
  return movie;
}

MovieDataset read_movie_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw std::runtime_error(manifest_path.string() + ": cannot open");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) fail_at(manifest_path, line_no, "missing header row");
  strip_cr(line);
  if (line != "path,label") fail_at(manifest_path, line_no, "header must be 'path,label'");

  const std::filesystem::path base = manifest_path.parent_path();
  MovieDataset data;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos) fail_at(manifest_path, line_no, "missing label field");
    std::size_t label = 0;
    if (!parse_index(line.substr(comma + 1), label)) {
      fail_at(manifest_path, line_no, "label must be a non-negative integer");
    }
    const FrameSequence movie = read_movie_container(base / line.substr(0, comma));
    if (data.movies.empty()) {
      data.n_frames = movie.n_frames;
      data.height = movie.height;
      data.width = movie.width;
    } else if (movie.n_frames != data.n_frames || movie.height != data.height ||
               movie.width != data.width) {
      fail_at(manifest_path, line_no, "containers disagree on dimensions");
    }
    data.movies.push_back(movie);
    data.labels.push_back(label);
  }
  if (data.movies.empty()) throw std::runtime_error(manifest_path.string() + ": no entries");
  data.validate();
  return data;
}

std::filesystem::path write_movie_dataset(const MovieDataset& data,
                                          const std::filesystem::path& prefix) {
  data.validate();
  const std::filesystem::path manifest_path = prefix.string() + ".manifest.csv";
  std::ofstream manifest(manifest_path, std::ios::binary);
  if (!manifest) throw std::runtime_error(manifest_path.string() + ": cannot open for writing");
  manifest << "path,label\n";
  const std::string stem = prefix.filename().string();
  for (std::size_t i = 0; i < data.n(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "_%04zu.s2frm", i);
    const std::string filename = stem + name;
    write_movie_container(data.movies[i], prefix.parent_path() / filename);
    manifest << filename << ',' << data.labels[i] << '\n';
  }
  manifest.flush();
  if (!manifest) throw std::runtime_error(manifest_path.string() + ": write failed");
  return manifest_path;
}

namespace {

void write_network(std::ostream& out, const std::string& name, const UbpNetwork& net) {
  out << "network " << name << '\n';
  out << "layers";
  for (std::size_t s : net.spec.layer_sizes) out << ' ' << s;
  out << '\n';
  out << "hidden " << activation_name(net.spec.hidden_activation) << '\n';
  out << "output " << activation_name(net.spec.output_activation) << '\n';
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    out << "weights " << (l + 1) << '\n';
    const Matrix& w = net.weights[l];
    for (std::size_t r = 0; r < w.rows; ++r) {
      const double* row = w.row(r);
      for (std::size_t c = 0; c < w.cols; ++c) {
        out << (c == 0 ? "" : " ") << fmt(row[c]);
      }
      out << '\n';
    }
    out << "biases " << (l + 1) << '\n';
    for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
      out << (i == 0 ? "" : " ") << fmt(net.biases[l][i]);
    }
    out << '\n';
  }
}

void write_codes(std::ostream& out, std::size_t n_classes, std::size_t n_bits) {
  out << "codes\n";
  for (std::size_t k = 0; k < n_classes; ++k) {
    out << k;
    for (int bit : encode_class(k, n_bits)) out << ' ' << bit;
    out << '\n';
  }
}

void write_boundary(std::ostream& out, const std::vector<double>& boundary) {
  out << "boundary";
  for (double w : boundary) out << ' ' << fmt(w);
  out << '\n';
}

// Line-oriented reader with positional diagnostics.
class ModelReader {
 public:
  ModelReader(std::istream& in, std::filesystem::path path) : in_(in), path_(std::move(path)) {}

  std::string line() {
    std::string text;
    if (!std::getline(in_, text)) fail("unexpected end of file");
    ++line_no_;
    strip_cr(text);
    return text;
  }

  void expect(const std::string& exact) {
    const std::string got = line();
    if (got != exact) fail("expected '" + exact + "', got '" + got + "'");
  }

  // "keyword v1 v2 ..." -> the values
  std::vector<std::string> keyword_line(const std::string& keyword) {
    const std::string text = line();
    std::vector<std::string> fields = split(text, ' ');
    if (fields.empty() || fields.front() != keyword) {
      fail("expected '" + keyword + " ...', got '" + text + "'");
    }
    fields.erase(fields.begin());
    return fields;
  }

  std::size_t keyword_index(const std::string& keyword) {
    const std::vector<std::string> fields = keyword_line(keyword);
    std::size_t v = 0;
    if (fields.size() != 1 || !parse_index(fields[0], v)) {
      fail("expected one integer after '" + keyword + "'");
    }
    return v;
  }

  std::vector<double> values_line(std::size_t expected_count) {
    const std::string text = line();
    const std::vector<std::string> fields = split(text, ' ');
    if (fields.size() != expected_count) {
      fail("expected " + std::to_string(expected_count) + " values, got " +
           std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_double(fields[i], values[i]) || !std::isfinite(values[i])) {
        fail("value " + std::to_string(i + 1) + " is not a finite number");
      }
    }
    return values;
  }

  [[noreturn]] void fail(const std::string& message) { fail_at(path_, line_no_, message); }

 private:
  std::istream& in_;
  std::filesystem::path path_;
  std::size_t line_no_ = 0;
};

UbpNetwork read_network(ModelReader& reader, const std::string& expected_name) {
  const std::vector<std::string> name = reader.keyword_line("network");
  if (name.size() != 1 || name[0] != expected_name) {
    reader.fail("expected network '" + expected_name + "'");
  }
  UbpNetwork net;
  for (const std::string& field : reader.keyword_line("layers")) {
    std::size_t size = 0;
    if (!parse_index(field, size) || size == 0) reader.fail("bad layer size '" + field + "'");
    net.spec.layer_sizes.push_back(size);
  }
  if (net.spec.layer_sizes.size() < 2) reader.fail("network needs at least two layers");
  {
    const std::vector<std::string> fields = reader.keyword_line("hidden");
    if (fields.size() != 1) reader.fail("expected one activation name");
    net.spec.hidden_activation = activation_from_name(fields[0]);
  }
  {
    const std::vector<std::string> fields = reader.keyword_line("output");
    if (fields.size() != 1) reader.fail("expected one activation name");
    net.spec.output_activation = activation_from_name(fields[0]);
  }
  for (std::size_t l = 0; l + 1 < net.spec.layer_sizes.size(); ++l) {
    if (reader.keyword_index("weights") != l + 1) reader.fail("weights section out of order");
    Matrix w(net.spec.layer_sizes[l + 1], net.spec.layer_sizes[l]);
    for (std::size_t r = 0; r < w.rows; ++r) {
      const std::vector<double> row = reader.values_line(w.cols);
      std::copy(row.begin(), row.end(), w.row(r));
    }
    net.weights.push_back(std::move(w));
    if (reader.keyword_index("biases") != l + 1) reader.fail("biases section out of order");
    net.biases.push_back(reader.values_line(net.spec.layer_sizes[l + 1]));
  }
  net.validate();
  return net;
}

void read_codes(ModelReader& reader, std::size_t n_classes, std::size_t n_bits) {
  reader.expect("codes");
  for (std::size_t k = 0; k < n_classes; ++k) {
    const std::vector<double> values = reader.values_line(n_bits + 1);
    if (values[0] != static_cast<double>(k)) reader.fail("code rows out of order");
    const std::vector<int> expected = encode_class(k, n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
      if (values[i + 1] != static_cast<double>(expected[i])) {
        reader.fail("code for class " + std::to_string(k) + " is not the canonical encoding");
      }
    }
  }
}

std::vector<double> read_boundary(ModelReader& reader, std::size_t n_classes) {
  const std::vector<std::string> fields = reader.keyword_line("boundary");
  if (fields.size() != n_classes) reader.fail("boundary weight count mismatch");
  std::vector<double> boundary(n_classes);
  for (std::size_t i = 0; i < n_classes; ++i) {
    if (!parse_double(fields[i], boundary[i])) reader.fail("bad boundary weight");
    if (boundary[i] != 1.0) reader.fail("boundary weight must be exactly 1");
  }
  return boundary;
}

}  // namespace

void save_model(const S2an2Model& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << kModelMagic << '\n';
  out << "kind tabular\n";
  out << "classes " << model.spec.n_classes << '\n';
  out << "bits " << model.spec.n_bits() << '\n';
  out << "features " << model.spec.n_features << '\n';
  write_codes(out, model.spec.n_classes, model.spec.n_bits());
  write_boundary(out, model.boundary_weights);
  for (std::size_t j = 0; j < model.class_ubps.size(); ++j) {
    write_network(out, "class" + std::to_string(j), model.class_ubps[j]);
  }
  write_network(out, "integrator", model.integrator);
  out << "end\n";
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void save_model(const MovieModel& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << kModelMagic << '\n';
  out << "kind movie\n";
  out << "classes " << model.spec.n_classes << '\n';
  out << "bits " << model.spec.n_bits() << '\n';
  out << "frames " << model.spec.n_frames << '\n';
  out << "height " << model.spec.height << '\n';
  out << "width " << model.spec.width << '\n';
  write_codes(out, model.spec.n_classes, model.spec.n_bits());
  write_boundary(out, model.boundary_weights);
  for (std::size_t f = 0; f < model.frame_ubps.size(); ++f) {
    write_network(out, "frame" + std::to_string(f), model.frame_ubps[f]);
  }
  for (std::size_t k = 0; k < model.class_ubps.size(); ++k) {
    write_network(out, "class" + std::to_string(k), model.class_ubps[k]);
  }
  write_network(out, "integrator", model.integrator);
  out << "end\n";
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  ModelReader reader(in, path);
  {
    const std::string magic = reader.line();
    if (magic != kModelMagic) reader.fail("not an S2AN2 model or unsupported version");
  }
  const std::vector<std::string> kind = reader.keyword_line("kind");
  if (kind.size() != 1) reader.fail("bad kind line");

  const std::size_t n_classes = reader.keyword_index("classes");
  if (n_classes < 2) reader.fail("need at least 2 classes");
  const std::size_t n_bits = reader.keyword_index("bits");
  if (n_bits != class_code_bits(n_classes)) reader.fail("bit count disagrees with class count");

  if (kind[0] == "tabular") {
    const std::size_t n_features = reader.keyword_index("features");
    read_codes(reader, n_classes, n_bits);
    const std::vector<double> boundary = read_boundary(reader, n_classes);
    S2an2Model model;
    model.boundary_weights = boundary;
    for (std::size_t j = 0; j < n_classes; ++j) {
      model.class_ubps.push_back(read_network(reader, "class" + std::to_string(j)));
    }
    model.integrator = read_network(reader, "integrator");
    reader.expect("end");
    model.spec.n_features = n_features;
    model.spec.n_classes = n_classes;
    model.spec.class_ubp_spec = model.class_ubps.front().spec;
    model.spec.integrator_spec = model.integrator.spec;
    model.validate();
    return model;
  }
  if (kind[0] == "movie") {
    const std::size_t n_frames = reader.keyword_index("frames");
    const std::size_t height = reader.keyword_index("height");
    const std::size_t width = reader.keyword_index("width");
    read_codes(reader, n_classes, n_bits);
    const std::vector<double> boundary = read_boundary(reader, n_classes);
    MovieModel model;
    model.boundary_weights = boundary;
    for (std::size_t f = 0; f < n_frames; ++f) {
      model.frame_ubps.push_back(read_network(reader, "frame" + std::to_string(f)));
    }
    for (std::size_t k = 0; k < n_classes; ++k) {
      model.class_ubps.push_back(read_network(reader, "class" + std::to_string(k)));
    }
    model.integrator = read_network(reader, "integrator");
    reader.expect("end");
    model.spec.n_frames = n_frames;
    model.spec.height = height;
    model.spec.width = width;
    model.spec.n_classes = n_classes;
    model.spec.frame_ubp_spec = model.frame_ubps.front().spec;
    model.spec.class_ubp_spec = model.class_ubps.front().spec;
    model.spec.integrator_spec = model.integrator.spec;
    model.validate();
    return model;
  }
  reader.fail("unknown model kind '" + kind[0] + "'");
}

namespace {

nlohmann::json bbox_to_json(const BBox& bbox) {
  return {{"row", bbox.row_min}, {"col", bbox.col_min}, {"height", bbox.height},
          {"width", bbox.width}};
}

BBox bbox_from_json(const nlohmann::json& j) {
  return BBox{j.at("row").get<std::size_t>(), j.at("col").get<std::size_t>(),
              j.at("height").get<std::size_t>(), j.at("width").get<std::size_t>()};
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace

void write_ground_truth(const TabularGroundTruth& truth, const std::filesystem::path& path) {
  write_json({{"kind", "tabular"}, {"seed", truth.seed}, {"informative", truth.informative}},
             path);
}

void write_ground_truth(const MovieGroundTruth& truth, const std::filesystem::path& path) {
  write_json({{"kind", "movie"},
              {"seed", truth.seed},
              {"signal_bbox", bbox_to_json(truth.signal_bbox)},
              {"signal_frames", truth.signal_frames}},
             path);
}

TabularGroundTruth read_tabular_ground_truth(const std::filesystem::path& path) {
  const nlohmann::json j = read_json(path);
  if (j.at("kind") != "tabular") throw std::runtime_error(path.string() + ": not tabular truth");
  TabularGroundTruth truth;
  truth.seed = j.at("seed").get<std::uint64_t>();
  truth.informative = j.at("informative").get<std::vector<std::size_t>>();
  return truth;
}

MovieGroundTruth read_movie_ground_truth(const std::filesystem::path& path) {
  const nlohmann::json j = read_json(path);
  if (j.at("kind") != "movie") throw std::runtime_error(path.string() + ": not movie truth");
  MovieGroundTruth truth;
  truth.seed = j.at("seed").get<std::uint64_t>();
  truth.signal_bbox = bbox_from_json(j.at("signal_bbox"));
  truth.signal_frames = j.at("signal_frames").get<std::vector<std::size_t>>();
  return truth;
}

std::pair<TabularDataset, TabularGroundTruth> synth_tabular(
    std::uint64_t seed, std::size_t n, std::size_t d, std::size_t k,
    std::vector<std::size_t> informative) {
  if (n == 0 || d == 0) throw std::invalid_argument("synth_tabular: n and d must be positive");
  if (k < 2) throw std::invalid_argument("synth_tabular: need at least 2 classes");
  std::vector<bool> is_informative(d, false);
  for (std::size_t i = 0; i < informative.size(); ++i) {
    if (informative[i] >= d) throw std::invalid_argument("synth_tabular: informative index out of range");
    if (i > 0 && informative[i] <= informative[i - 1]) {
      throw std::invalid_argument("synth_tabular: informative indices must increase");
    }
    is_informative[informative[i]] = true;
  }

  constexpr double kSigma = 0.3;
  Rng rng(seed);

  // Prototypes over the informative coordinates, pairwise distance >= 2 sigma.
  const std::size_t m = informative.size();
  std::vector<std::vector<double>> prototypes;
  for (std::size_t cls = 0; cls < k && m > 0; ++cls) {
    std::vector<double> candidate(m);
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      for (double& v : candidate) v = rng.uniform(-1.5, 1.5);
      placed = true;
      for (const auto& other : prototypes) {
        double dist2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double diff = candidate[i] - other[i];
          dist2 += diff * diff;
        }
        if (dist2 < (2 * kSigma) * (2 * kSigma)) {
          placed = false;
          break;
        }
      }
    }
    if (!placed) throw std::runtime_error("synth_tabular: could not separate class prototypes");
    prototypes.push_back(candidate);
  }

  TabularDataset data;
  data.n_features = d;
  data.features.reserve(n * d);
  data.labels.reserve(n);
  // Position of each informative coordinate within the informative list.
  std::vector<std::size_t> position(d, 0);
  for (std::size_t i = 0; i < informative.size(); ++i) position[informative[i]] = i;

  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t label = s % k;
    data.labels.push_back(label);
    for (std::size_t i = 0; i < d; ++i) {
      if (is_informative[i]) {
        data.features.push_back(prototypes[label][position[i]] + kSigma * rng.gaussian());
      } else {
        data.features.push_back(rng.gaussian());
      }
    }
  }
  TabularGroundTruth truth;
  truth.seed = seed;
  truth.informative = std::move(informative);
  return {std::move(data), std::move(truth)};
}

std::pair<MovieDataset, MovieGroundTruth> synth_movies(std::uint64_t seed, std::size_t n,
                                                       std::size_t n_frames, std::size_t height,
                                                       std::size_t width, const BBox& signal_bbox,
                                                       std::vector<std::size_t> signal_frames,
                                                       std::size_t k) {
  if (n == 0) throw std::invalid_argument("synth_movies: n must be positive");
  if (n_frames == 0 || height == 0 || width == 0) {
    throw std::invalid_argument("synth_movies: zero dimension");
  }
  if (k < 2) throw std::invalid_argument("synth_movies: need at least 2 classes");
  if (signal_bbox.height == 0 || signal_bbox.width == 0 ||
      signal_bbox.row_min + signal_bbox.height > height ||
      signal_bbox.col_min + signal_bbox.width > width) {
    throw std::invalid_argument("synth_movies: signal box exceeds the frame");
  }
  for (std::size_t i = 0; i < signal_frames.size(); ++i) {
    if (signal_frames[i] >= n_frames) {
      throw std::invalid_argument("synth_movies: signal frame index out of range");
    }
    if (i > 0 && signal_frames[i] <= signal_frames[i - 1]) {
      throw std::invalid_argument("synth_movies: signal frame indices must increase");
    }
  }

  Rng rng(seed);
  MovieDataset data;
  data.n_frames = n_frames;
  data.height = height;
  data.width = width;
  std::vector<bool> is_signal_frame(n_frames, false);
  for (std::size_t f : signal_frames) is_signal_frame[f] = true;
  const double ramp_span =
      static_cast<double>(signal_bbox.height + signal_bbox.width > 2
                              ? signal_bbox.height + signal_bbox.width - 2
                              : 1);

  // Label-independent vignette: the subject sits on the frame's interior
  // plateau, the borders carry little activity. Noise scale ramps from 0.1 at
  // the edge to 1 over five pixels and stays flat inside.
  std::vector<double> noise_scale(height * width);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t edge = std::min(std::min(r, height - 1 - r), std::min(c, width - 1 - c));
      noise_scale[r * width + c] = 0.1 + 0.9 * std::min(1.0, static_cast<double>(edge) / 5.0);
    }
  }

  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t label = s % k;
    FrameSequence movie;
    movie.n_frames = n_frames;
    movie.height = height;
    movie.width = width;
    movie.pixels.resize(n_frames * height * width);
    for (std::size_t i = 0; i < movie.pixels.size(); ++i) {
      movie.pixels[i] = noise_scale[i % noise_scale.size()] * rng.gaussian();
    }
    const double amplitude = 0.6 + 0.5 * static_cast<double>(label);
    for (std::size_t f = 0; f < n_frames; ++f) {
      if (!is_signal_frame[f]) continue;
      for (std::size_t r = 0; r < signal_bbox.height; ++r) {
        for (std::size_t c = 0; c < signal_bbox.width; ++c) {
          const double ramp = 0.5 + static_cast<double>(r + c) / ramp_span;
          movie.at(f, signal_bbox.row_min + r, signal_bbox.col_min + c) += amplitude * ramp;
        }
      }
    }
    data.movies.push_back(std::move(movie));
    data.labels.push_back(label);
  }
  MovieGroundTruth truth;
  truth.seed = seed;
  truth.signal_bbox = signal_bbox;
  truth.signal_frames = std::move(signal_frames);
  return {std::move(data), std::move(truth)};
}

}  // namespace s2an2
