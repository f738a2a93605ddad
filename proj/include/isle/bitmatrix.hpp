#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace isle {

// Dense bit matrix, row-major, 64-bit word packed.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::uint32_t rows, std::uint32_t cols)
      : rows_(rows), cols_(cols), stride_((cols + 63) / 64), words_(size_t(rows) * stride_, 0) {}

  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }

  void set(std::uint32_t r, std::uint32_t c) {
    words_[size_t(r) * stride_ + c / 64] |= std::uint64_t{1} << (c % 64);
  }
  bool get(std::uint32_t r, std::uint32_t c) const {
    return (words_[size_t(r) * stride_ + c / 64] >> (c % 64)) & 1;
  }

  std::uint64_t row_popcount(std::uint32_t r) const {
    std::uint64_t total = 0;
    for (std::uint32_t w = 0; w < stride_; ++w)
      total += std::popcount(words_[size_t(r) * stride_ + w]);
    return total;
  }

  std::uint64_t popcount() const {
    std::uint64_t total = 0;
    for (auto w : words_) total += std::popcount(w);
    return total;
  }

  // Flattened row-major bits as alternating run lengths, starting with the
  // length of the leading zero run (possibly 0).
  std::vector<std::uint64_t> to_rle() const;
  static BitMatrix from_rle(std::uint32_t rows, std::uint32_t cols,
                            const std::vector<std::uint64_t>& runs);

  bool operator==(const BitMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && words_ == o.words_;
  }

 private:
  std::uint32_t rows_ = 0, cols_ = 0, stride_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::vector<std::uint64_t> BitMatrix::to_rle() const {
  std::vector<std::uint64_t> runs;
  bool current = false;
  std::uint64_t len = 0;
  for (std::uint32_t r = 0; r < rows_; ++r)
    for (std::uint32_t c = 0; c < cols_; ++c) {
      bool bit = get(r, c);
      if (bit == current) {
        ++len;
      } else {
        runs.push_back(len);
        current = bit;
        len = 1;
      }
    }
  runs.push_back(len);
  return runs;
}

inline BitMatrix BitMatrix::from_rle(std::uint32_t rows, std::uint32_t cols,
                                     const std::vector<std::uint64_t>& runs) {
  BitMatrix m(rows, cols);
  std::uint64_t pos = 0;
  bool current = false;
  for (auto len : runs) {
    if (current)
      for (std::uint64_t i = pos; i < pos + len; ++i)
        m.set(static_cast<std::uint32_t>(i / cols), static_cast<std::uint32_t>(i % cols));
    pos += len;
    current = !current;
  }
  return m;
}

}  // namespace isle
