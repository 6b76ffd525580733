#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "centaur/error.hpp"
#include "centaur/team/types.hpp"

namespace centaur::analysis {

/// (wins + draws / 2) / games.
inline double wdl(std::size_t wins, std::size_t draws, std::size_t losses) {
  const std::size_t n = wins + draws + losses;
  if (n == 0) throw PreconditionError("wdl: no games");
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(draws)) / static_cast<double>(n);
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw PreconditionError("mean: empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Unbiased (n - 1) variance; 0 for a single observation.
inline double sample_variance(std::span<const double> xs) {
  const double m = mean(xs);
  if (xs.size() < 2) return 0.0;
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

/// Standard error of the mean from the sample standard deviation.
inline double sem(std::span<const double> xs) {
  return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

/// Standard error of a frequency f over n Bernoulli observations.
inline double sem_frequency(double f, std::size_t n) {
  if (n == 0) throw PreconditionError("sem_frequency: n = 0");
  return std::sqrt(f * (1.0 - f) / static_cast<double>(n));
}

/// Two-sample unpooled Z on per-game rewards. Zero spread with equal means
/// gives 0; zero spread with different means gives a signed infinity.
inline double z_score(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("z_score: empty group");
  const double diff = mean(a) - mean(b);
  const double se2 = sample_variance(a) / static_cast<double>(a.size()) + sample_variance(b) / static_cast<double>(b.size());
  if (se2 == 0.0) {
    if (diff == 0.0) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
  return diff / std::sqrt(se2);
}

/// P(a > b) + P(a = b) / 2 over all cross pairs.
inline double superiority(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("a_w: empty group");
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());
  double greater = 0, equal = 0;
  for (double x : a) {
    const auto lo = std::lower_bound(sb.begin(), sb.end(), x);
    const auto hi = std::upper_bound(lo, sb.end(), x);
    greater += static_cast<double>(lo - sb.begin());
    equal += static_cast<double>(hi - lo);
  }
  return (greater + 0.5 * equal) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

struct EffectReport {
  enum class Higher { A, B, Equal };

  double mean_a = 0, mean_b = 0;
  std::size_t n_a = 0, n_b = 0;
  double a_w = 0.5;  // oriented from the lower-mean group to the higher-mean group
  Higher higher = Higher::Equal;

  static std::string to_string(Higher h) { return h == Higher::A ? "A" : h == Higher::B ? "B" : "equal"; }
  nlohmann::json to_json() const {
    return {{"mean_a", mean_a}, {"mean_b", mean_b}, {"n_a", n_a},
            {"n_b", n_b},       {"a_w", a_w},       {"higher", to_string(higher)}};
  }
};

/// Probability of superiority of the higher-mean group over the other.
/// With equal means it is P(a > b) + ties / 2 as-is.
inline EffectReport a_w(std::span<const double> a, std::span<const double> b) {
  EffectReport r;
  r.mean_a = mean(a);
  r.mean_b = mean(b);
  r.n_a = a.size();
  r.n_b = b.size();
  if (r.mean_b > r.mean_a) {
    r.higher = EffectReport::Higher::B;
    r.a_w = superiority(b, a);
  } else {
    r.higher = r.mean_a > r.mean_b ? EffectReport::Higher::A : EffectReport::Higher::Equal;
    r.a_w = superiority(a, b);
  }
  return r;
}

/// Quartiles by linear interpolation between order statistics; whiskers at
/// the farthest data point within 1.5 IQR of the box.
struct BoxSummary {
  std::size_t n = 0;
  double mean = 0, min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double whisker_low = 0, whisker_high = 0;
  std::vector<double> outliers;

  nlohmann::json to_json() const {
    return {{"n", n},           {"mean", mean}, {"min", min},
            {"q1", q1},         {"median", median}, {"q3", q3},
            {"max", max},       {"whisker_low", whisker_low}, {"whisker_high", whisker_high},
            {"outliers", outliers}};
  }
};

inline double quantile_sorted(std::span<const double> s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  return i + 1 < s.size() ? s[i] + frac * (s[i + 1] - s[i]) : s[i];
}

inline BoxSummary box_summary(std::span<const double> xs) {
  if (xs.empty()) throw PreconditionError("box_summary: empty sample");
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  BoxSummary b;
  b.n = s.size();
  b.mean = mean(s);
  b.min = s.front();
  b.max = s.back();
  b.q1 = quantile_sorted(s, 0.25);
  b.median = quantile_sorted(s, 0.5);
  b.q3 = quantile_sorted(s, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo = b.q1 - 1.5 * iqr, hi = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  for (double x : s) {
    if (x < lo || x > hi) {
      b.outliers.push_back(x);
      continue;
    }
    b.whisker_low = std::min(b.whisker_low, x);
    b.whisker_high = std::max(b.whisker_high, x);
  }
  return b;
}

/// Outcome counts for one team/adversary pairing over an opening set.
/// Aborted games are counted but excluded from every statistic.
struct MatchSummary {
  std::string team;
  std::string adversary;
  std::string opening_set;
  std::size_t wins = 0, draws = 0, losses = 0, aborted = 0;
  std::vector<double> rewards;

  std::size_t games() const noexcept { return wins + draws + losses; }
  double wdl() const { return analysis::wdl(wins, draws, losses); }
  double sem() const { return analysis::sem(rewards); }

  void add(const team::GameRecord& g) {
    if (g.aborted) {
      ++aborted;
      return;
    }
    switch (g.outcome.result) {
      case chess::Result::Win: ++wins; break;
      case chess::Result::Draw: ++draws; break;
      case chess::Result::Loss: ++losses; break;
    }
    rewards.push_back(g.reward());
  }

  static MatchSummary of(std::span<const team::GameRecord> games, std::string opening_set = {}) {
    MatchSummary s;
    s.opening_set = std::move(opening_set);
    for (const auto& g : games) {
      if (s.team.empty()) {
        s.team = g.team_label;
        s.adversary = g.adversary_label;
      }
      s.add(g);
    }
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"team", team},   {"adversary", adversary}, {"opening_set", opening_set},
                        {"wins", wins},   {"draws", draws},         {"losses", losses},
                        {"aborted", aborted}, {"games", games()}};
    j["wdl"] = games() ? nlohmann::json(wdl()) : nlohmann::json(nullptr);
    j["sem"] = games() ? nlohmann::json(sem()) : nlohmann::json(nullptr);
    return j;
  }
};

/// Count-weighted pooling: the result is the summary of the concatenated games.
inline MatchSummary pool(std::span<const MatchSummary> parts) {
  MatchSummary s;
  for (const auto& p : parts) {
    if (s.team.empty()) {
      s.team = p.team;
      s.adversary = p.adversary;
      s.opening_set = p.opening_set;
    }
    s.wins += p.wins;
    s.draws += p.draws;
    s.losses += p.losses;
    s.aborted += p.aborted;
    s.rewards.insert(s.rewards.end(), p.rewards.begin(), p.rewards.end());
  }
  return s;
}

}  // namespace centaur::analysis
