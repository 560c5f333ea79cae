#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "symplab/spectrum.hpp"
#include "symplab/word.hpp"

namespace symplab {

/// Periodic orbits of a linear cocycle, each carried by its word.
class PeriodicLinearSystem {
public:
  explicit PeriodicLinearSystem(Eigen::Index dim) : dim_(dim) {}

  /// Adds an orbit; the word length is its period.
  void add(const std::string& id, Word word);

  Eigen::Index dim() const { return dim_; }
  const Word& word(const std::string& id) const;
  int period(const std::string& id) const { return static_cast<int>(word(id).size()); }
  std::vector<std::string> points() const;

private:
  Eigen::Index dim_;
  std::map<std::string, Word> words_;
};

/// Connecting word from orbit `from` to orbit `to` (may be empty).
struct Transition {
  std::string from, to;
  Word word;
  double epsilon = 0.0;
};

/// Transitions keyed by (to, from), i.e. t^{i,j} is stored under (i, j).
using TransitionTable = std::map<std::pair<std::string, std::string>, Transition>;

/// One letter of an itinerary: orbit id and repeat count.
using ItineraryStep = std::pair<std::string, int>;

/// True when the cyclic sequence is not a proper power of a shorter one.
bool is_primitive(const std::vector<ItineraryStep>& itinerary);

/// [t^{i1,im}][M(x_im)]^{a_m}[t^{im,im-1}] ... [t^{i2,i1}][M(x_i1)]^{a_1}.
Word compose_with_transitions(const PeriodicLinearSystem& system, const std::vector<ItineraryStep>& itinerary,
                              const TransitionTable& transitions);

/// Output of the spectrum realification step.
struct Realification {
  Word word;                  // k-fold perturbed repeat
  int k = 1;                  // argument-clearing power
  double rationalize_distance = 0.0; // letter distance added by the argument shift
  double split_distance = 0.0;       // letter distance added by splitting double eigenvalues
  double distance = 0.0;             // word_distance to the k-fold repeat
  std::vector<double> split_parameters;
};

constexpr int realify_q_max = 64;

/// Perturbs and repeats `w` so that its monodromy has simple real positive
/// spectrum; each of the two perturbation stages stays within eps/4 per letter.
Realification realify(const Word& w, double eps, int q_max = realify_q_max);
Word realify_spectrum(const Word& w, double eps);

/// One alignment round of the diagonalization.
struct AlignmentStage {
  int pair = 0; // lines (pair, 2d-1-pair) in increasing modulus order
  int j_out = 0, j_in = 0;
  double angle_out = 0.0, angle_in = 0.0;        // before correction
  double distance_out = 0.0, distance_in = 0.0;  // letter distances of L-maps
  double middle_defect = 0.0; // max |omega(N v, u)| over middle v and extremal u (unit vectors)
};

struct DiagonalizationReport {
  int k = 1;
  double realify_distance = 0.0;
  int nudges = 0;
  double nudge_distance = 0.0;
  std::vector<AlignmentStage> stages;
  int l = 0;
  std::size_t length = 0;
  double admissible_distance = 0.0; // letter distance to the unperturbed concatenation
  double input_top = 0.0;           // (1/n) log |lambda_x|
  double realified_top = 0.0;
  double output_top = 0.0;          // (1/tau) log |mu_max| of the certified spectrum
  std::vector<double> output_exponents; // descending
  double line_defect = 0.0;         // max sin-angle between E_i and its image
  bool simple_real = false;
  bool positive = false;
};

struct Diagonalization {
  Word word;
  Matrix eigenlines; // columns E_1..E_2d, increasing modulus
  DiagonalizationReport report;
};

constexpr int alignment_j_max = 10000;

/// A word close to [M_1]^{j+l}[t][M_1]^{j}
/// whose monodromy is diagonalizable with the eigenlines of the realified
/// monodromy M_1, and whose top exponent is within eps of x's.
Diagonalization diagonalize_with_transition(const PeriodicLinearSystem& system, const std::string& x,
                                            const Transition& self_transition, double eps,
                                            std::uint64_t seed = 0);

/// Certifies that the product of `w` preserves each column of `lines`
/// (ordered by increasing modulus, paired i <-> 2d-1-i). Returns the max
/// line defect and fills the exponents (1/|w|) log|mu_i| in column order.
double certify_eigenlines(const Word& w, const Matrix& lines, std::vector<double>& exponents,
                          std::vector<int>& signs);

} // namespace symplab
