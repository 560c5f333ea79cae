#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symplab/dynamics.hpp"
#include "symplab/entropy.hpp"
#include "symplab/spectrum.hpp"

namespace symplab {

enum class CenterMode { Full, Gap };
const char* to_string(CenterMode mode);
CenterMode center_mode_from_string(const std::string& s);

enum class Verdict { Consistent, Inconclusive, ViolationFlag };
const char* to_string(Verdict v);

namespace harness_tol {
inline constexpr double consistent_band = 0.05; // margin >= -band is consistent
inline constexpr double violation = 0.05;       // extra slack before a violation flag
inline constexpr double min_width = 0.05;       // floor of the entropy confidence width
} // namespace harness_tol

/// Domination levels tried when certifying a splitting along an orbit word.
inline const std::vector<int> domination_levels{1, 2, 4, 8};

/// Center of one orbit in gap mode: the eigen-gap block, kept only when the
/// induced strong splitting is dominated along the orbit word; else the full space.
Subspace certified_center(const PeriodicOrbit& orbit, double min_gap = 1.2);

struct InequalityReport {
  std::string map_id;
  double estimate = 0.0;
  Extended confidence_width;
  std::optional<double> S;   // empty when no orbits were found
  CenterMode center_mode = CenterMode::Gap;
  std::size_t orbits = 0;
  std::size_t certified_centers = 0; // orbits whose center came from a certified gap
  double margin = 0.0;       // estimate - S (0 when S is empty)
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> exact_entropy; // linear maps only
  std::optional<double> exact_check;   // exact entropy minus S, linear maps only
  EntropyReport entropy;
};

Verdict decide_verdict(double estimate, const Extended& width, const std::optional<double>& s);

InequalityReport run_inequality(const MapFamily& map, const OrbitSearchConfig& orbit_config,
                                const EntropyConfig& entropy_config, CenterMode mode);

enum class Signature { Anosov, PartiallyHyperbolic, Elliptic, Unresolved };
const char* to_string(Signature s);

struct ScanCell {
  std::string key;
  MapFamily map;
};

struct CellResult {
  std::string key;
  std::string map_name;
  Signature signature = Signature::Unresolved;
  int center_half_dim = 0; // m of the PH(m) signature
  std::size_t orbits = 0;
  OrbitCensus census;
  std::optional<int> dominated_k; // strong dimension certified on every orbit, if any
  int domination_level = 0;
  std::string note;
};

/// One signature per cell, decided in the order anosov, PH(m), elliptic,
/// unresolved. Cells run in parallel and come back sorted by key.
std::vector<CellResult> run_trichotomy_scan(const std::vector<ScanCell>& cells, const OrbitSearchConfig& orbit_config,
                                            int probe_grid = 32, int threads = 1);

/// Cells from a config object: either {"cells": [{"key", "map"}]} or a sweep
/// {"base": map, "path": "/json/pointer", "values": [...]}; both may appear.
std::vector<ScanCell> scan_cells_from_json(const nlohmann::json& j);

nlohmann::json inequality_to_json(const InequalityReport& r);
nlohmann::json scan_to_json(const std::vector<CellResult>& cells);
std::string scan_to_csv(const std::vector<CellResult>& cells);

} // namespace symplab
