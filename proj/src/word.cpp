#include "symplab/word.hpp"

#include <cmath>

namespace symplab {

Word::Word(std::vector<SymplecticMatrix> letters) : letters_(std::move(letters)) {
  for (const auto& l : letters_)
    if (l.dim() != letters_.front().dim())
      throw Error(ErrorKind::InvalidDimension, "letters of different dimension");
}

Word Word::constant(const SymplecticMatrix& letter, int length) {
  if (length < 1) throw Error(ErrorKind::InvalidInput, "word length must be >= 1");
  return Word(std::vector<SymplecticMatrix>(static_cast<std::size_t>(length), letter));
}

Word concat(const Word& a, const Word& b) {
  if (!a.empty() && !b.empty() && a.dim() != b.dim())
    throw Error(ErrorKind::InvalidDimension, "concatenating words of different dimension");
  std::vector<SymplecticMatrix> all = a.letters();
  all.insert(all.end(), b.letters().begin(), b.letters().end());
  return Word(std::move(all));
}

Word Word::power(int times) const {
  std::vector<SymplecticMatrix> all;
  all.reserve(letters_.size() * static_cast<std::size_t>(std::max(times, 0)));
  for (int t = 0; t < times; ++t) all.insert(all.end(), letters_.begin(), letters_.end());
  return Word(std::move(all));
}

SymplecticMatrix monodromy(const Word& w) {
  if (w.empty()) throw Error(ErrorKind::InvalidInput, "monodromy of an empty word");
  Matrix p = w[0].matrix();
  double growth = w[0].matrix().norm();
  for (std::size_t i = 1; i < w.size(); ++i) {
    p = p * w[i].matrix();
    growth = std::max(growth, p.norm());
  }
  // Rounding grows with the word length and with the size of the partial
  // products; the defect bound scales accordingly.
  const double bound = tol::sympl * static_cast<double>(w.size()) * std::max(1.0, growth * growth);
  return SymplecticMatrix(std::move(p), bound);
}

ScaledProduct scaled_monodromy(const Word& w) {
  if (w.empty()) throw Error(ErrorKind::InvalidInput, "monodromy of an empty word");
  ScaledProduct out{Matrix::Identity(w.dim(), w.dim()), 0.0};
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.matrix = out.matrix * w[i].matrix();
    const double s = max_abs(out.matrix);
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::Numerical, "product underflow or overflow");
    out.matrix /= s;
    out.log_scale += std::log(s);
  }
  return out;
}

Matrix cyclic_product(const Word& w, std::size_t begin, std::size_t count) {
  Matrix p = Matrix::Identity(w.dim(), w.dim());
  for (std::size_t i = 0; i < count; ++i) p = w.acting(begin + i).matrix() * p;
  return p;
}

Extended word_distance(const Word& a, const Word& b) {
  if (a.size() != b.size()) return Extended::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].dim() != b[i].dim()) return Extended::infinity();
    worst = std::max(worst, max_abs(a[i].matrix() - b[i].matrix()));
  }
  return Extended(worst);
}

} // namespace symplab
