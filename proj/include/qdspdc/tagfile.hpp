#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace qdspdc {

enum Channel : std::uint8_t { kHerald = 0, kD1 = 1, kD2 = 2, kSync = 3 };

struct TagRecord {
  std::uint8_t channel = 0;
  std::int64_t timestamp = 0;  // ps since run start

  bool operator==(const TagRecord& o) const = default;
};

struct TagHeader {
  std::int64_t rep_ps = 0;
  std::int64_t bin_ps = 0;
};

// Consumer of a time-ordered record stream.
class TagSink {
 public:
  virtual ~TagSink() = default;
  virtual void begin(const TagHeader& header) { (void)header; }
  virtual void consume(const TagRecord* records, std::size_t n) = 0;
  virtual void end() {}
};

class VectorSink : public TagSink {
 public:
  void begin(const TagHeader& h) override { header = h; }
  void consume(const TagRecord* r, std::size_t n) override { records.insert(records.end(), r, r + n); }

  TagHeader header;
  std::vector<TagRecord> records;
};

// Buffered writer of the text tag format.
class TagWriter : public TagSink {
 public:
  explicit TagWriter(std::ostream& os);
  ~TagWriter() override;
  void begin(const TagHeader& header) override;
  void consume(const TagRecord* records, std::size_t n) override;
  void end() override;

 private:
  void flush();
  std::ostream& os_;
  std::string buf_;
};

// Streaming reader: bounded memory regardless of file size.
class TagReader {
 public:
  explicit TagReader(std::istream& is);
  const TagHeader& header() const { return header_; }
  // Fills `out` with up to `max` records; returns false at end of stream.
  bool read_batch(std::vector<TagRecord>& out, std::size_t max = 1 << 16);
  std::uint64_t records_read() const { return count_; }
  std::uint64_t non_monotone() const { return non_monotone_; }

 private:
  bool fill();
  std::istream& is_;
  TagHeader header_;
  std::vector<char> buf_;
  std::size_t pos_ = 0, len_ = 0;
  std::int64_t buf_offset_ = 0;  // file offset of buf_[0]
  bool eof_ = false;
  std::uint64_t count_ = 0, non_monotone_ = 0;
  std::int64_t last_ = INT64_MIN;
};

void write_tags(const std::vector<TagRecord>& records, const TagHeader& header, std::ostream& os);
void write_tags(const std::vector<TagRecord>& records, const TagHeader& header, const std::string& path);
std::vector<TagRecord> read_tags(std::istream& is, TagHeader* header = nullptr);
std::vector<TagRecord> read_tags(const std::string& path, TagHeader* header = nullptr);

// Streams a file into a sink; returns the number of non-monotone timestamps seen.
std::uint64_t stream_tags(const std::string& path, TagSink& sink);
std::uint64_t stream_tags(std::istream& is, TagSink& sink);

}  // namespace qdspdc
