#include "qdspdc/tagfile.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "qdspdc/errors.hpp"

namespace qdspdc {

namespace {

constexpr std::size_t kChunk = 1 << 20;
constexpr const char* kMagic = "#tagfile v1 ";

bool parse_kv(const char*& p, const char* end, const char* key, std::int64_t& out) {
  const std::size_t kl = std::strlen(key);
  if (static_cast<std::size_t>(end - p) < kl || std::memcmp(p, key, kl) != 0) return false;
  p += kl;
  const auto r = std::from_chars(p, end, out);
  if (r.ec != std::errc()) return false;
  p = r.ptr;
  return true;
}

}  // namespace

TagWriter::TagWriter(std::ostream& os) : os_(os) { buf_.reserve(kChunk + 64); }

TagWriter::~TagWriter() {
  try {
    flush();
  } catch (...) {
  }
}

void TagWriter::begin(const TagHeader& h) {
  buf_ += kMagic;
  buf_ += "rep_ps=" + std::to_string(h.rep_ps) + " bin_ps=" + std::to_string(h.bin_ps) + "\n";
}

void TagWriter::consume(const TagRecord* r, std::size_t n) {
  char tmp[32];
  for (std::size_t i = 0; i < n; ++i) {
    char* p = std::to_chars(tmp, tmp + sizeof tmp, static_cast<int>(r[i].channel)).ptr;
    *p++ = '\t';
    p = std::to_chars(p, tmp + sizeof tmp, r[i].timestamp).ptr;
    *p++ = '\n';
    buf_.append(tmp, p);
    if (buf_.size() >= kChunk) flush();
  }
}

void TagWriter::end() {
  flush();
  os_.flush();
  if (!os_) throw IoError("tag writer: write failed");
}

void TagWriter::flush() {
  if (buf_.empty()) return;
  os_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  buf_.clear();
  if (!os_) throw IoError("tag writer: write failed");
}

TagReader::TagReader(std::istream& is) : is_(is), buf_(kChunk) {
  fill();
  const char* begin = buf_.data() + pos_;
  const char* end = buf_.data() + len_;
  const char* nl = static_cast<const char*>(std::memchr(begin, '\n', static_cast<std::size_t>(end - begin)));
  if (!nl) throw IoError("tag file: missing or unterminated header", 0);
  const char* p = begin;
  const std::size_t ml = std::strlen(kMagic);
  bool ok = static_cast<std::size_t>(nl - p) > ml && std::memcmp(p, kMagic, ml) == 0;
  if (ok) {
    p += ml;
    ok = parse_kv(p, nl, "rep_ps=", header_.rep_ps) && p < nl && *p++ == ' ' &&
         parse_kv(p, nl, "bin_ps=", header_.bin_ps) && p == nl;
  }
  if (!ok) throw IoError("tag file: malformed header", 0);
  pos_ = static_cast<std::size_t>(nl - buf_.data()) + 1;
}

bool TagReader::fill() {
  if (eof_) return false;
  if (pos_ > 0) {
    std::memmove(buf_.data(), buf_.data() + pos_, len_ - pos_);
    buf_offset_ += static_cast<std::int64_t>(pos_);
    len_ -= pos_;
    pos_ = 0;
  }
  if (len_ == buf_.size()) buf_.resize(buf_.size() * 2);
  is_.read(buf_.data() + len_, static_cast<std::streamsize>(buf_.size() - len_));
  const auto got = static_cast<std::size_t>(is_.gcount());
  if (got == 0) {
    eof_ = true;
    if (is_.bad()) throw IoError("tag file: read failed", buf_offset_ + static_cast<std::int64_t>(len_));
    return false;
  }
  len_ += got;
  return true;
}

bool TagReader::read_batch(std::vector<TagRecord>& out, std::size_t max) {
  out.clear();
  while (out.size() < max) {
    const char* begin = buf_.data() + pos_;
    const char* end = buf_.data() + len_;
    const char* nl = static_cast<const char*>(std::memchr(begin, '\n', static_cast<std::size_t>(end - begin)));
    if (!nl) {
      if (fill()) continue;
      if (pos_ < len_)
        throw IoError("tag file: truncated final record", buf_offset_ + static_cast<std::int64_t>(pos_));
      break;
    }
    const std::int64_t offset = buf_offset_ + static_cast<std::int64_t>(pos_);
    int ch = -1;
    std::int64_t ts = 0;
    auto r1 = std::from_chars(begin, nl, ch);
    bool ok = r1.ec == std::errc() && r1.ptr < nl && *r1.ptr == '\t' && ch >= 0 && ch <= 3;
    if (ok) {
      auto r2 = std::from_chars(r1.ptr + 1, nl, ts);
      ok = r2.ec == std::errc() && r2.ptr == nl && r1.ptr + 1 < nl;
    }
    if (!ok) throw IoError("tag file: malformed record", offset);
    if (ts < last_) ++non_monotone_;
    last_ = ts;
    out.push_back({static_cast<std::uint8_t>(ch), ts});
    ++count_;
    pos_ = static_cast<std::size_t>(nl - buf_.data()) + 1;
  }
  return !out.empty();
}

void write_tags(const std::vector<TagRecord>& records, const TagHeader& header, std::ostream& os) {
  TagWriter w(os);
  w.begin(header);
  w.consume(records.data(), records.size());
  w.end();
}

void write_tags(const std::vector<TagRecord>& records, const TagHeader& header, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_tags(records, header, os);
}

std::vector<TagRecord> read_tags(std::istream& is, TagHeader* header) {
  VectorSink sink;
  stream_tags(is, sink);
  if (header) *header = sink.header;
  return std::move(sink.records);
}

std::vector<TagRecord> read_tags(const std::string& path, TagHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_tags(is, header);
}

std::uint64_t stream_tags(std::istream& is, TagSink& sink) {
  TagReader reader(is);
  sink.begin(reader.header());
  std::vector<TagRecord> batch;
  while (reader.read_batch(batch)) sink.consume(batch.data(), batch.size());
  sink.end();
  return reader.non_monotone();
}

std::uint64_t stream_tags(const std::string& path, TagSink& sink) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  return stream_tags(is, sink);
}

}  // namespace qdspdc
