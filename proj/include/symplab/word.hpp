#pragma once

#include <vector>

#include "symplab/symplectic.hpp"

namespace symplab {

/// Finite sequence of symplectic letters of equal dimension. The product of
/// [a_0, ..., a_{n-1}] is a_0 a_1 ... a_{n-1}, so the last letter acts first.
class Word {
public:
  Word() = default;
  explicit Word(std::vector<SymplecticMatrix> letters);
  static Word constant(const SymplecticMatrix& letter, int length = 1);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Eigen::Index dim() const { return letters_.empty() ? 0 : letters_.front().dim(); }
  const std::vector<SymplecticMatrix>& letters() const { return letters_; }
  const SymplecticMatrix& operator[](std::size_t i) const { return letters_[i]; }

  /// `times` consecutive copies.
  Word power(int times) const;
  /// Letter acting at step `step` (step 0 is the last letter), cyclically.
  const SymplecticMatrix& acting(std::size_t step) const { return letters_[size() - 1 - step % size()]; }

private:
  std::vector<SymplecticMatrix> letters_;
};

/// [a, b]: the letters of a followed by those of b.
Word concat(const Word& a, const Word& b);

/// Product of the letters. Throws on an empty word.
SymplecticMatrix monodromy(const Word& w);

/// Product of a long word as exp(log_scale) * matrix with max|matrix| = 1.
struct ScaledProduct {
  Matrix matrix;
  double log_scale = 0.0;
};
ScaledProduct scaled_monodromy(const Word& w);

/// Composition of `count` consecutive acting steps starting at step `begin`,
/// taken cyclically.
Matrix cyclic_product(const Word& w, std::size_t begin, std::size_t count);

/// max over positions of the entrywise max difference; infinite for
/// different lengths.
Extended word_distance(const Word& a, const Word& b);

} // namespace symplab
