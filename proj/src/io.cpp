#include "npil/io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace npil {
namespace {

std::vector<std::string_view> split_on(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ') ++pos;
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line_no,
                       const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path)
      : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open " + path.string());
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

class FileWriter {
 public:
  explicit FileWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot write " + path.string());
  }

  void line(const std::string& text) { out_ << text << '\n'; }

  void comments(std::span<const std::string> lines) {
    for (const std::string& c : lines) out_ << "# " << c << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw DataError("write failed: " + path_.string());
  }

  std::ostream& stream() { return out_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

Index parse_index(std::string_view text) {
  const std::int64_t v = parse_int(text);
  if (v < 0 || v > std::numeric_limits<Index>::max()) {
    throw DataError("index out of range: '" + std::string(text) + "'");
  }
  return static_cast<Index>(v);
}

}  // namespace

SparseTensor3 read_coo(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  bool have_dims = false;
  Index di = 0, dj = 0, dk = 0;
  bool have_header = false;
  std::vector<Entry> entries;
  Index max_i = -1, max_j = -1, max_k = -1;

  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto tokens = split_whitespace(std::string_view(line).substr(1));
      if (tokens.size() == 4 && tokens[0] == "dims" && !have_dims) {
        try {
          di = parse_index(tokens[1]);
          dj = parse_index(tokens[2]);
          dk = parse_index(tokens[3]);
        } catch (const DataError&) {
          fail(path, reader.line_no(), "malformed dims comment");
        }
        have_dims = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != "i,j,k,value") {
        fail(path, reader.line_no(), "expected header 'i,j,k,value'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split_on(line, ',');
    if (fields.size() != 4) {
      fail(path, reader.line_no(), "expected 4 comma-separated fields");
    }
    Entry e;
    try {
      e.i = parse_index(fields[0]);
      e.j = parse_index(fields[1]);
      e.k = parse_index(fields[2]);
      e.value = parse_double(fields[3]);
    } catch (const DataError& err) {
      fail(path, reader.line_no(), err.what());
    }
    max_i = std::max(max_i, e.i);
    max_j = std::max(max_j, e.j);
    max_k = std::max(max_k, e.k);
    entries.push_back(e);
  }
  if (!have_header) throw DataError(path.string() + ": missing COO header");
  if (!have_dims) {
    if (entries.empty()) {
      throw DataError(path.string() + ": no records and no dims comment");
    }
    di = max_i + 1;
    dj = max_j + 1;
    dk = max_k + 1;
  }
  return SparseTensor3::build(di, dj, dk, std::move(entries));
}

void write_coo(const std::filesystem::path& path, const SparseTensor3& tensor,
               std::span<const std::string> comments) {
  FileWriter out(path);
  out.line("# dims " + std::to_string(tensor.dim_i()) + " " +
           std::to_string(tensor.dim_j()) + " " + std::to_string(tensor.dim_k()));
  out.comments(comments);
  out.line("i,j,k,value");
  for (const Entry& e : tensor.entries()) {
    out.stream() << e.i << ',' << e.j << ',' << e.k << ','
                 << format_double(e.value) << '\n';
  }
  out.close();
}

namespace {

std::string vector_line(const Eigen::VectorXd& v) {
  std::string line;
  for (Eigen::Index n = 0; n < v.size(); ++n) {
    if (n > 0) line += ' ';
    line += format_double(v[n]);
  }
  return line;
}

void parse_row(const std::vector<std::string_view>& tokens, double* dst,
               std::size_t count, const std::filesystem::path& path,
               std::size_t line_no) {
  if (tokens.size() != count) {
    fail(path, line_no,
         "expected " + std::to_string(count) + " values, got " +
             std::to_string(tokens.size()));
  }
  for (std::size_t n = 0; n < count; ++n) dst[n] = parse_double(tokens[n]);
}

}  // namespace

void save_model(const std::filesystem::path& path, const FactorModel& model,
                const NormalizationParams* params,
                std::span<const std::string> comments) {
  FileWriter out(path);
  out.line("npil-model v1");
  out.comments(comments);
  out.line("dims " + std::to_string(model.dim_i()) + " " +
           std::to_string(model.dim_j()) + " " + std::to_string(model.dim_k()) +
           " rank " + std::to_string(model.rank()));
  for (const Eigen::MatrixXd* mat : {&model.A, &model.B, &model.C}) {
    for (Eigen::Index i = 0; i < mat->rows(); ++i) {
      out.line(vector_line(mat->row(i).transpose()));
    }
  }
  out.line(vector_line(model.u));
  out.line(vector_line(model.f));
  out.line(vector_line(model.d));
  if (params != nullptr) {
    out.line("normalization " + std::to_string(params->channels.size()));
    for (std::size_t j = 0; j < params->channels.size(); ++j) {
      out.line(std::to_string(j) + "," + format_double(params->channels[j].min_raw) +
               "," + format_double(params->channels[j].max_raw));
    }
  }
  out.close();
}

ModelFile load_model(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;

  const auto next_content = [&](std::string& dst) {
    while (reader.next(dst)) {
      if (dst.empty() || dst[0] == '#') continue;
      return true;
    }
    return false;
  };

  if (!next_content(line) || line != "npil-model v1") {
    throw DataError(path.string() + ": not a npil-model v1 file");
  }
  if (!next_content(line)) throw DataError(path.string() + ": missing dims line");
  const auto dims_tokens = split_whitespace(line);
  if (dims_tokens.size() != 6 || dims_tokens[0] != "dims" ||
      dims_tokens[4] != "rank") {
    fail(path, reader.line_no(), "malformed dims line");
  }
  const Index di = parse_index(dims_tokens[1]);
  const Index dj = parse_index(dims_tokens[2]);
  const Index dk = parse_index(dims_tokens[3]);
  const Index rank = parse_index(dims_tokens[5]);
  if (di <= 0 || dj <= 0 || dk <= 0 || rank <= 0) {
    fail(path, reader.line_no(), "dims and rank must be positive");
  }

  ModelFile file;
  FactorModel& m = file.model;
  m.A.resize(di, rank);
  m.B.resize(dj, rank);
  m.C.resize(dk, rank);
  m.u.resize(di);
  m.f.resize(dj);
  m.d.resize(dk);

  const auto read_matrix_row = [&](double* dst, std::size_t count) {
    if (!next_content(line)) {
      throw DataError(path.string() + ": truncated model file");
    }
    parse_row(split_whitespace(line), dst, count, path, reader.line_no());
  };

  std::vector<double> row(rank);
  for (Eigen::MatrixXd* mat : {&m.A, &m.B, &m.C}) {
    for (Eigen::Index i = 0; i < mat->rows(); ++i) {
      read_matrix_row(row.data(), row.size());
      for (Index r = 0; r < rank; ++r) (*mat)(i, r) = row[r];
    }
  }
  read_matrix_row(m.u.data(), static_cast<std::size_t>(di));
  read_matrix_row(m.f.data(), static_cast<std::size_t>(dj));
  read_matrix_row(m.d.data(), static_cast<std::size_t>(dk));

  if (next_content(line)) {
    const auto tokens = split_whitespace(line);
    if (tokens.size() != 2 || tokens[0] != "normalization") {
      fail(path, reader.line_no(), "unexpected trailing content");
    }
    const Index channel_count = parse_index(tokens[1]);
    NormalizationParams params;
    params.channels.resize(channel_count);
    for (Index j = 0; j < channel_count; ++j) {
      if (!next_content(line)) {
        throw DataError(path.string() + ": truncated normalization section");
      }
      const auto fields = split_on(line, ',');
      if (fields.size() != 3 || parse_index(fields[0]) != j) {
        fail(path, reader.line_no(), "malformed normalization line");
      }
      params.channels[j].min_raw = parse_double(fields[1]);
      params.channels[j].max_raw = parse_double(fields[2]);
    }
    file.params = std::move(params);
  }
  return file;
}

void write_params(const std::filesystem::path& path,
                  const NormalizationParams& params,
                  std::span<const std::string> comments) {
  FileWriter out(path);
  out.comments(comments);
  for (std::size_t j = 0; j < params.channels.size(); ++j) {
    out.line(std::to_string(j) + "," + format_double(params.channels[j].min_raw) +
             "," + format_double(params.channels[j].max_raw));
  }
  out.close();
}

NormalizationParams read_params(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  NormalizationParams params;
  while (reader.next(line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_on(line, ',');
    if (fields.size() != 3) {
      fail(path, reader.line_no(), "expected 'channel,min,max'");
    }
    const Index j = parse_index(fields[0]);
    if (j != static_cast<Index>(params.channels.size())) {
      fail(path, reader.line_no(), "channel indices must be consecutive from 0");
    }
    params.channels.push_back(
        {parse_double(fields[1]), parse_double(fields[2])});
  }
  if (params.channels.empty()) {
    throw DataError(path.string() + ": no channels");
  }
  return params;
}

RawSeries read_raw_csv(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw DataError(path.string() + ": empty file");
  const auto header = split_on(line, ',');
  if (header.size() < 3 || header[0] != "day" || header[1] != "second") {
    throw DataError(path.string() + ":1: expected header 'day,second,<channels>'");
  }

  RawSeries series;
  for (std::size_t n = 2; n < header.size(); ++n) {
    series.channel_names.emplace_back(header[n]);
  }
  const std::size_t channel_count = series.channel_names.size();

  while (reader.next(line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_on(line, ',');
    if (fields.size() != channel_count + 2) {
      fail(path, reader.line_no(),
           "expected " + std::to_string(channel_count + 2) + " fields, got " +
               std::to_string(fields.size()));
    }
    RawRow row;
    try {
      row.day = parse_index(fields[0]);
      row.second = parse_index(fields[1]);
      for (std::size_t c = 0; c < channel_count; ++c) {
        if (fields[c + 2].empty()) {
          row.channels.emplace_back(std::nullopt);
        } else {
          row.channels.emplace_back(parse_double(fields[c + 2]));
        }
      }
    } catch (const DataError& err) {
      fail(path, reader.line_no(), err.what());
    }
    series.rows.push_back(std::move(row));
  }
  if (series.rows.empty()) throw DataError(path.string() + ": no data rows");
  return series;
}

void write_epoch_csv(const std::filesystem::path& path,
                     std::span<const EpochReport> reports,
                     std::span<const std::string> comments) {
  FileWriter out(path);
  out.comments(comments);
  out.line("epoch,train_loss,val_rmse,val_mae,seconds");
  for (const EpochReport& r : reports) {
    out.stream() << r.epoch << ',' << format_double(r.train_loss) << ','
                 << format_double(r.val_rmse) << ',' << format_double(r.val_mae)
                 << ',' << format_double(r.seconds) << '\n';
  }
  out.close();
}

void write_swarm_csv(const std::filesystem::path& path,
                     std::span<const ParticleTraceRow> trace,
                     std::span<const std::string> comments) {
  FileWriter out(path);
  out.comments(comments);
  std::string header = "iteration,particle,fitness";
  for (const char* name : GainVector::names()) {
    header += ',';
    header += name;
  }
  out.line(header + ",F");
  for (const ParticleTraceRow& row : trace) {
    const Vec9 gains = row.gains.to_vector();
    out.stream() << row.iteration << ',' << row.particle << ','
                 << format_double(row.fitness);
    for (int d = 0; d < 9; ++d) out.stream() << ',' << format_double(gains[d]);
    out.stream() << ',' << format_double(row.relative_fitness) << '\n';
  }
  out.close();
}

}  // namespace npil
