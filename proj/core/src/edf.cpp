#include "szbench/edf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "szbench/errors.hpp"
#include "szbench/strings.hpp"

namespace szbench::edf {

namespace {

constexpr std::size_t kFixedHeaderBytes = 256;
constexpr std::size_t kPerSignalBytes = 256;
constexpr const char* kAnnotationsLabel = "EDF Annotations";
constexpr std::int64_t kMaxSignals = 4096;

std::string sanitize_ascii(std::string s) {
  for (char& c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 32 || u > 126) c = '?';
  }
  return s;
}

bool printable_ascii(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 32 && u <= 126;
  });
}

// Sequential reader over the raw header bytes; tracks the byte offset so
// parse errors can name it.
class FieldReader {
 public:
  FieldReader(const std::string& buf, std::string source, std::size_t base_offset)
      : buf_(buf), source_(std::move(source)), pos_(0), base_(base_offset) {}

  std::size_t offset() const { return base_ + pos_; }

  std::string text(std::size_t n) {
    std::string raw = sanitize_ascii(buf_.substr(pos_, n));
    pos_ += n;
    return std::string(trim(raw));
  }

  double number(std::size_t n, const char* field) {
    const std::size_t at = offset();
    const std::string t = text(n);
    const auto v = parse_double(t);
    if (!v || !std::isfinite(*v)) {
      throw ParseError(std::string("non-numeric ") + field + " field '" + t + "'", source_,
                       static_cast<std::int64_t>(at));
    }
    return *v;
  }

  std::int64_t integer(std::size_t n, const char* field) {
    const std::size_t at = offset();
    const std::string t = text(n);
    const auto v = parse_int(t);
    if (!v) {
      throw ParseError(std::string("non-numeric ") + field + " field '" + t + "'", source_,
                       static_cast<std::int64_t>(at));
    }
    return *v;
  }

 private:
  const std::string& buf_;
  std::string source_;
  std::size_t pos_;
  std::size_t base_;
};

// dd.mm.yy / hh.mm.ss; ':' separators are tolerated on read.
void parse_clock_triple(const std::string& text, const char* field, const std::string& source,
                        int& a, int& b, int& c) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ':', '.');
  const auto parts = split(t, '.');
  if (parts.size() != 3) {
    throw ParseError(std::string("malformed ") + field + " field '" + text + "'", source);
  }
  int out[3];
  for (int i = 0; i < 3; ++i) {
    const auto v = parse_int(parts[i]);
    if (!v || *v < 0 || *v > 99) {
      throw ParseError(std::string("malformed ") + field + " field '" + text + "'", source);
    }
    out[i] = static_cast<int>(*v);
  }
  a = out[0];
  b = out[1];
  c = out[2];
}

std::string read_exact(std::ifstream& in, std::size_t n, const std::string& source,
                       std::size_t at, const char* what) {
  std::string buf(n, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw ParseError(std::string("truncated file while reading ") + what, source,
                     static_cast<std::int64_t>(at + static_cast<std::size_t>(in.gcount())));
  }
  return buf;
}

// Fixed-width ASCII field, space padded. Overflow or non-printable content is
// a caller error.
void put_field(std::string& out, std::size_t width, const std::string& value, const char* field) {
  if (!printable_ascii(value)) {
    throw ContractError(std::string("EDF ") + field + " field contains non-ASCII characters");
  }
  if (value.size() > width) {
    throw ContractError(std::string("EDF ") + field + " field '" + value + "' exceeds " +
                        std::to_string(width) + " characters");
  }
  out += value;
  out.append(width - value.size(), ' ');
}

std::string format_edf_number(double v, std::size_t width, const char* field) {
  {
    const std::string s = format_seconds(v);
    if (s.size() <= width) return s;
  }
  for (int prec = static_cast<int>(width); prec >= 1; --prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    std::string s(buf);
    if (s.size() <= width) return s;
  }
  throw ContractError(std::string("cannot format ") + field + " value into " +
                      std::to_string(width) + " characters");
}

std::string two_digits(int v) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d", v);
  return buf;
}

}  // namespace

double SignalInfo::gain() const {
  return (physical_max - physical_min) / (static_cast<double>(digital_max) - digital_min);
}

double SignalInfo::offset() const { return physical_min - digital_min * gain(); }

bool SignalInfo::is_annotation() const { return label == kAnnotationsLabel; }

std::int64_t EdfHeader::record_bytes() const {
  std::int64_t n = 0;
  for (const auto& s : signals) n += 2 * static_cast<std::int64_t>(s.samples_per_record);
  return n;
}

double SignalMatrix::common_fs() const {
  if (fs_hz.empty()) throw ContractError("signal matrix has no channels");
  for (double f : fs_hz) {
    if (std::abs(f - fs_hz.front()) > 1e-9 * std::max(1.0, fs_hz.front())) {
      throw ContractError("channels do not share one sampling rate");
    }
  }
  return fs_hz.front();
}

double recording_duration(const EdfHeader& header) {
  if (header.num_records < 0) {
    throw ContractError("recording duration requested before num_records was resolved");
  }
  return static_cast<double>(header.num_records) * header.record_duration_s;
}

EdfReader::EdfReader(const std::filesystem::path& path) : path_(path) {
  const std::string source = path.string();

  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat " + source + ": " + ec.message());

  stream_.open(path, std::ios::binary);
  if (!stream_) throw IoError("cannot open " + source);

  const std::string fixed = read_exact(stream_, kFixedHeaderBytes, source, 0, "fixed header");
  FieldReader f(fixed, source, 0);

  header_.version = f.text(8);
  if (header_.version != "0") {
    throw ParseError("unsupported version field '" + header_.version + "' (plain EDF expects '0')",
                     source, 0);
  }
  header_.patient_id = f.text(80);
  header_.recording_id = f.text(80);
  parse_clock_triple(f.text(8), "start date", source, header_.start_day, header_.start_month,
                     header_.start_year);
  parse_clock_triple(f.text(8), "start time", source, header_.start_hour, header_.start_minute,
                     header_.start_second);
  const std::int64_t declared_header_bytes = f.integer(8, "header bytes");
  header_.reserved = f.text(44);
  if (header_.reserved.rfind("EDF+D", 0) == 0) {
    throw ParseError("discontinuous recordings (EDF+D) are not supported", source);
  }
  header_.num_records = f.integer(8, "number of records");
  if (header_.num_records < -1) {
    throw ParseError("number of records must be >= 0 (or -1 for unknown)", source);
  }
  header_.record_duration_s = f.number(8, "record duration");
  if (!(header_.record_duration_s > 0)) {
    throw ParseError("non-positive record duration", source);
  }
  const std::int64_t num_signals = f.integer(4, "number of signals");
  if (num_signals < 1 || num_signals > kMaxSignals) {
    throw ParseError("implausible number of signals: " + std::to_string(num_signals), source);
  }
  if (declared_header_bytes != 256 + 256 * num_signals) {
    throw ParseError("inconsistent header size: declared " + std::to_string(declared_header_bytes) +
                         " bytes, expected " + std::to_string(256 + 256 * num_signals),
                     source, 184);
  }

  const std::size_t ns = static_cast<std::size_t>(num_signals);
  const std::string sig =
      read_exact(stream_, ns * kPerSignalBytes, source, kFixedHeaderBytes, "signal headers");
  FieldReader g(sig, source, kFixedHeaderBytes);

  header_.signals.resize(ns);
  for (auto& s : header_.signals) s.label = g.text(16);
  for (auto& s : header_.signals) s.transducer = g.text(80);
  for (auto& s : header_.signals) s.physical_dimension = g.text(8);
  for (auto& s : header_.signals) s.physical_min = g.number(8, "physical minimum");
  for (auto& s : header_.signals) s.physical_max = g.number(8, "physical maximum");
  for (auto& s : header_.signals) {
    const std::int64_t v = g.integer(8, "digital minimum");
    if (v < -32768 || v > 32767) throw ParseError("digital minimum out of 16-bit range", source);
    s.digital_min = static_cast<int>(v);
  }
  for (auto& s : header_.signals) {
    const std::int64_t v = g.integer(8, "digital maximum");
    if (v < -32768 || v > 32767) throw ParseError("digital maximum out of 16-bit range", source);
    s.digital_max = static_cast<int>(v);
  }
  for (auto& s : header_.signals) s.prefiltering = g.text(80);
  for (auto& s : header_.signals) {
    const std::int64_t v = g.integer(8, "samples per record");
    if (v < 1 || v > std::numeric_limits<int>::max()) {
      throw ParseError("implausible samples-per-record: " + std::to_string(v), source);
    }
    s.samples_per_record = static_cast<int>(v);
  }
  for (auto& s : header_.signals) s.reserved = g.text(32);

  for (const auto& s : header_.signals) {
    if (s.physical_min == s.physical_max) {
      throw ParseError("signal '" + s.label + "' has equal physical minimum and maximum", source);
    }
    if (s.digital_min == s.digital_max) {
      throw ParseError("signal '" + s.label + "' has equal digital minimum and maximum", source);
    }
  }

  // Resolve the record count against the data section size.
  const std::int64_t data_bytes =
      static_cast<std::int64_t>(file_size) - header_.header_bytes();
  if (data_bytes < 0) {
    throw ParseError("truncated file: header alone needs " +
                         std::to_string(header_.header_bytes()) + " bytes",
                     source, static_cast<std::int64_t>(file_size));
  }
  const std::int64_t rb = header_.record_bytes();
  const std::int64_t available = data_bytes / rb;
  if (header_.num_records == -1) {
    header_.num_records = available;
    if (data_bytes % rb != 0) {
      warnings_.push_back("data section is not a whole number of records; truncated to " +
                          std::to_string(available));
    }
  } else if (available < header_.num_records) {
    throw ParseError("truncated file: header declares " + std::to_string(header_.num_records) +
                         " records but data holds only " + std::to_string(available),
                     source,
                     static_cast<std::int64_t>(file_size));
  } else if (data_bytes > header_.num_records * rb) {
    warnings_.push_back("ignoring " + std::to_string(data_bytes - header_.num_records * rb) +
                        " trailing bytes after the last record");
  }
}

double EdfReader::duration_s() const { return recording_duration(header_); }

std::vector<std::vector<double>> EdfReader::read_records(std::int64_t first, std::int64_t count) {
  if (first < 0 || count < 0 || first + count > header_.num_records) {
    throw ContractError("record range [" + std::to_string(first) + ", " +
                        std::to_string(first + count) + ") outside 0.." +
                        std::to_string(header_.num_records));
  }

  const std::int64_t rb = header_.record_bytes();
  const std::size_t ns = header_.signals.size();

  std::vector<std::vector<double>> out(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    if (!header_.signals[s].is_annotation()) {
      out[s].reserve(static_cast<std::size_t>(count) * header_.signals[s].samples_per_record);
    }
  }

  stream_.clear();
  stream_.seekg(header_.header_bytes() + first * rb, std::ios::beg);
  std::string buf(static_cast<std::size_t>(rb), '\0');
  for (std::int64_t r = 0; r < count; ++r) {
    stream_.read(buf.data(), rb);
    if (stream_.gcount() != rb) {
      throw ParseError("truncated record " + std::to_string(first + r), path_.string(),
                       header_.header_bytes() + (first + r) * rb +
                           static_cast<std::int64_t>(stream_.gcount()));
    }
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& info = header_.signals[s];
      if (info.is_annotation()) {
        p += 2 * info.samples_per_record;
        continue;
      }
      const double gain = info.gain();
      const double offset = info.offset();
      for (int i = 0; i < info.samples_per_record; ++i) {
        const auto digital = static_cast<std::int16_t>(
            static_cast<std::uint16_t>(p[0]) | (static_cast<std::uint16_t>(p[1]) << 8));
        out[s].push_back(digital * gain + offset);
        p += 2;
      }
    }
  }
  return out;
}

SignalMatrix EdfReader::read_all() {
  SignalMatrix m;
  std::vector<std::size_t> kept;
  for (std::size_t s = 0; s < header_.signals.size(); ++s) {
    const auto& info = header_.signals[s];
    if (info.is_annotation()) continue;
    kept.push_back(s);
    m.channels.push_back(info.label);
    m.fs_hz.push_back(info.samples_per_record / header_.record_duration_s);
    m.samples.emplace_back();
    m.samples.back().reserve(static_cast<std::size_t>(header_.num_records) *
                             info.samples_per_record);
  }
  m.duration_s = duration_s();

  // Chunked so multi-hour files never need a second full copy in flight.
  constexpr std::int64_t kChunkRecords = 4096;
  for (std::int64_t first = 0; first < header_.num_records; first += kChunkRecords) {
    const std::int64_t count = std::min(kChunkRecords, header_.num_records - first);
    auto chunk = read_records(first, count);
    for (std::size_t c = 0; c < kept.size(); ++c) {
      auto& dst = m.samples[c];
      auto& src = chunk[kept[c]];
      dst.insert(dst.end(), src.begin(), src.end());
    }
  }
  return m;
}

std::pair<EdfHeader, SignalMatrix> read_edf(const std::filesystem::path& path) {
  EdfReader reader(path);
  SignalMatrix m = reader.read_all();
  return {reader.header(), std::move(m)};
}

EdfHeader read_edf_header(const std::filesystem::path& path) {
  return EdfReader(path).header();
}

void write_edf(const EdfHeader& header, const SignalMatrix& signals,
               const std::filesystem::path& path) {
  const std::size_t ns = header.signals.size();
  if (ns == 0) throw ContractError("refusing to write an EDF file with no signals");
  if (signals.channel_count() != ns) {
    throw ContractError("header declares " + std::to_string(ns) + " signals but the matrix has " +
                        std::to_string(signals.channel_count()) + " channels");
  }
  if (header.num_records < 0) throw ContractError("num_records must be resolved before writing");
  if (!(header.record_duration_s > 0)) throw ContractError("record duration must be positive");

  for (std::size_t s = 0; s < ns; ++s) {
    const auto& info = header.signals[s];
    if (info.samples_per_record < 1) {
      throw ContractError("signal '" + info.label + "' has no samples per record");
    }
    if (info.physical_min == info.physical_max || info.digital_min == info.digital_max) {
      throw ContractError("signal '" + info.label + "' has a degenerate physical/digital range");
    }
    const auto expected = static_cast<std::size_t>(header.num_records) *
                          static_cast<std::size_t>(info.samples_per_record);
    if (signals.samples[s].size() != expected) {
      throw ContractError("signal '" + info.label + "' holds " +
                          std::to_string(signals.samples[s].size()) + " samples, header implies " +
                          std::to_string(expected));
    }
  }

  std::string head;
  head.reserve(kFixedHeaderBytes + ns * kPerSignalBytes);
  put_field(head, 8, header.version, "version");
  put_field(head, 80, header.patient_id, "patient id");
  put_field(head, 80, header.recording_id, "recording id");
  put_field(head, 8,
            two_digits(header.start_day) + "." + two_digits(header.start_month) + "." +
                two_digits(header.start_year),
            "start date");
  put_field(head, 8,
            two_digits(header.start_hour) + "." + two_digits(header.start_minute) + "." +
                two_digits(header.start_second),
            "start time");
  put_field(head, 8, std::to_string(header.header_bytes()), "header bytes");
  put_field(head, 44, header.reserved, "reserved");
  put_field(head, 8, std::to_string(header.num_records), "number of records");
  put_field(head, 8, format_edf_number(header.record_duration_s, 8, "record duration"),
            "record duration");
  put_field(head, 4, std::to_string(ns), "number of signals");

  for (const auto& s : header.signals) put_field(head, 16, s.label, "label");
  for (const auto& s : header.signals) put_field(head, 80, s.transducer, "transducer");
  for (const auto& s : header.signals) put_field(head, 8, s.physical_dimension, "dimension");
  for (const auto& s : header.signals) {
    put_field(head, 8, format_edf_number(s.physical_min, 8, "physical minimum"), "physical minimum");
  }
  for (const auto& s : header.signals) {
    put_field(head, 8, format_edf_number(s.physical_max, 8, "physical maximum"), "physical maximum");
  }
  for (const auto& s : header.signals) {
    put_field(head, 8, std::to_string(s.digital_min), "digital minimum");
  }
  for (const auto& s : header.signals) {
    put_field(head, 8, std::to_string(s.digital_max), "digital maximum");
  }
  for (const auto& s : header.signals) put_field(head, 80, s.prefiltering, "prefiltering");
  for (const auto& s : header.signals) {
    put_field(head, 8, std::to_string(s.samples_per_record), "samples per record");
  }
  for (const auto& s : header.signals) put_field(head, 32, s.reserved, "signal reserved");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(head.data(), static_cast<std::streamsize>(head.size()));

  std::string record;
  record.resize(static_cast<std::size_t>(header.record_bytes()));
  for (std::int64_t r = 0; r < header.num_records; ++r) {
    char* p = record.data();
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& info = header.signals[s];
      const double gain = info.gain();
      const double offset = info.offset();
      const int lo = std::min(info.digital_min, info.digital_max);
      const int hi = std::max(info.digital_min, info.digital_max);
      const double* x =
          signals.samples[s].data() + static_cast<std::size_t>(r) * info.samples_per_record;
      for (int i = 0; i < info.samples_per_record; ++i) {
        long digital = std::lround((x[i] - offset) / gain);
        digital = std::clamp<long>(digital, lo, hi);
        const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(digital));
        *p++ = static_cast<char>(u & 0xff);
        *p++ = static_cast<char>(u >> 8);
      }
    }
    out.write(record.data(), static_cast<std::streamsize>(record.size()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

EdfHeader make_header(const SignalMatrix& signals, double record_duration_s) {
  if (signals.channel_count() == 0) {
    throw ContractError("cannot build an EDF header for an empty signal matrix");
  }
  if (!(record_duration_s > 0)) throw ContractError("record duration must be positive");

  EdfHeader header;
  header.record_duration_s = record_duration_s;

  std::int64_t num_records = -1;
  for (std::size_t c = 0; c < signals.channel_count(); ++c) {
    SignalInfo info;
    info.label = signals.channels[c];
    info.physical_dimension = "uV";
    info.digital_min = -32768;
    info.digital_max = 32767;

    const double spr_f = signals.fs_hz[c] * record_duration_s;
    const auto spr = static_cast<std::int64_t>(std::llround(spr_f));
    if (spr < 1 || std::abs(spr_f - static_cast<double>(spr)) > 1e-6) {
      throw ContractError("sampling rate " + std::to_string(signals.fs_hz[c]) +
                          " Hz does not fill whole records of " +
                          std::to_string(record_duration_s) + " s");
    }
    info.samples_per_record = static_cast<int>(spr);

    const auto n = static_cast<std::int64_t>(signals.samples[c].size());
    if (n % spr != 0) {
      throw ContractError("channel '" + info.label + "' sample count " + std::to_string(n) +
                          " is not a whole number of records");
    }
    const std::int64_t records = n / spr;
    if (num_records == -1) {
      num_records = records;
    } else if (records != num_records) {
      throw ContractError("channels disagree on the record count");
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : signals.samples[c]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      lo = -1.0;
      hi = 1.0;
    }
    const double max_abs = std::max({std::abs(lo), std::abs(hi), 1.0});
    const double bound = std::ceil(max_abs * 1.01);
    if (bound > 9'999'999.0) {
      throw ContractError("channel '" + info.label + "' amplitude too large for an EDF header");
    }
    info.physical_min = -bound;
    info.physical_max = bound;

    header.signals.push_back(std::move(info));
  }
  header.num_records = num_records;
  return header;
}

}  // namespace szbench::edf
