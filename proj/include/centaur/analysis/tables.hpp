#pragma once

#include <cstdio>

#include "centaur/analysis/stats.hpp"
#include "centaur/chess/features.hpp"

namespace centaur::analysis {

namespace detail {

inline std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline nlohmann::json num_json(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

}  // namespace detail

struct FeaturePreferenceRow {
  std::string feature;
  double mean_m = std::numeric_limits<double>::quiet_NaN();
  double mean_l = std::numeric_limits<double>::quiet_NaN();
  std::optional<EffectReport> effect;  // absent when a column is empty
};

/// Board features of the positions where the manager chose M against those
/// where it chose L.
struct FeaturePreferenceTable {
  std::size_t n_m = 0, n_l = 0;
  bool m_empty = false, l_empty = false;
  std::vector<FeaturePreferenceRow> rows;

  const FeaturePreferenceRow& row(std::string_view feature) const {
    for (const auto& r : rows)
      if (r.feature == feature) return r;
    throw PreconditionError("no feature row " + std::string(feature));
  }

  std::string csv() const {
    std::string out = "feature,mean_m,mean_l,a_w,higher,n_m,n_l\n";
    for (const auto& r : rows)
      out += r.feature + ',' + detail::num(r.mean_m) + ',' + detail::num(r.mean_l) + ',' +
             (r.effect ? detail::num(r.effect->a_w) : "") + ',' +
             (r.effect ? (r.effect->higher == EffectReport::Higher::A   ? "M"
                          : r.effect->higher == EffectReport::Higher::B ? "L"
                                                                         : "equal")
                       : "") +
             ',' + std::to_string(n_m) + ',' + std::to_string(n_l) + '\n';
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows)
      rs.push_back({{"feature", r.feature},
                    {"mean_m", detail::num_json(r.mean_m)},
                    {"mean_l", detail::num_json(r.mean_l)},
                    {"effect", r.effect ? r.effect->to_json() : nlohmann::json(nullptr)}});
    return {{"n_m", n_m}, {"n_l", n_l}, {"m_empty", m_empty}, {"l_empty", l_empty}, {"rows", rs}};
  }
};

/// One row per board feature: mean over M-chosen positions, mean over
/// L-chosen positions, and A_w oriented lower to higher mean (A = M).
inline FeaturePreferenceTable feature_preference_table(
    std::span<const std::pair<chess::Position, team::Member>> decisions, const chess::FeatureOptions& opt = {}) {
  if (decisions.empty()) throw PreconditionError("feature_preference_table: no decisions");
  constexpr std::size_t K = chess::BoardFeatures::kCount;
  std::array<std::vector<double>, K> m, l;
  FeaturePreferenceTable t;
  for (const auto& [p, who] : decisions) {
    const auto v = chess::board_features(p, opt).values();
    auto& dst = who == team::Member::M ? m : l;
    for (std::size_t k = 0; k < K; ++k) dst[k].push_back(v[k]);
    ++(who == team::Member::M ? t.n_m : t.n_l);
  }
  t.m_empty = t.n_m == 0;
  t.l_empty = t.n_l == 0;
  const auto names = chess::BoardFeatures::names();
  for (std::size_t k = 0; k < K; ++k) {
    FeaturePreferenceRow r;
    r.feature = std::string(names[k]);
    if (!t.m_empty) r.mean_m = mean(m[k]);
    if (!t.l_empty) r.mean_l = mean(l[k]);
    if (!t.m_empty && !t.l_empty) r.effect = a_w(m[k], l[k]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

struct HumanlikenessRow {
  std::string feature;
  double freq_m = 0, sem_m = 0;
  double freq_l = 0, sem_l = 0;
};

struct HumanlikenessReport {
  std::size_t pairs = 0;
  std::vector<HumanlikenessRow> rows;

  const HumanlikenessRow& row(std::string_view feature) const {
    for (const auto& r : rows)
      if (r.feature == feature) return r;
    throw PreconditionError("no move feature row " + std::string(feature));
  }

  std::string csv() const {
    std::string out = "feature,freq_m,sem_m,freq_l,sem_l,n\n";
    for (const auto& r : rows)
      out += r.feature + ',' + detail::num(r.freq_m) + ',' + detail::num(r.sem_m) + ',' + detail::num(r.freq_l) + ',' +
             detail::num(r.sem_l) + ',' + std::to_string(pairs) + '\n';
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows)
      rs.push_back({{"feature", r.feature}, {"freq_m", r.freq_m}, {"sem_m", r.sem_m}, {"freq_l", r.freq_l}, {"sem_l", r.sem_l}});
    return {{"pairs", pairs}, {"rows", rs}};
  }
};

struct RecommendationPair {
  chess::Position position;
  chess::Move rec_m;
  chess::Move rec_l;
};

/// Move-feature frequencies of each member's recommendations over
/// disagreement states, with SEM sqrt(f (1 - f) / n).
inline HumanlikenessReport humanlikeness_report(std::span<const RecommendationPair> pairs) {
  if (pairs.empty()) throw PreconditionError("humanlikeness_report: no pairs");
  constexpr std::size_t K = chess::MoveFeatures::kCount;
  std::array<std::size_t, K> cm{}, cl{};
  for (const auto& pr : pairs) {
    if (pr.rec_m == pr.rec_l)
      throw PreconditionError("humanlikeness_report: members agree at " + pr.position.fen() + "; disagreements only");
    const auto fm = chess::move_features(pr.position, pr.rec_m).values();
    const auto fl = chess::move_features(pr.position, pr.rec_l).values();
    for (std::size_t k = 0; k < K; ++k) {
      cm[k] += fm[k];
      cl[k] += fl[k];
    }
  }
  HumanlikenessReport r;
  r.pairs = pairs.size();
  const auto names = chess::MoveFeatures::names();
  const double n = static_cast<double>(pairs.size());
  for (std::size_t k = 0; k < K; ++k) {
    HumanlikenessRow row;
    row.feature = std::string(names[k]);
    row.freq_m = static_cast<double>(cm[k]) / n;
    row.freq_l = static_cast<double>(cl[k]) / n;
    row.sem_m = sem_frequency(row.freq_m, pairs.size());
    row.sem_l = sem_frequency(row.freq_l, pairs.size());
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace centaur::analysis
