#include "tracethresh/epidemic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "tracethresh/errors.hpp"
#include "tracethresh/parallel.hpp"

namespace tracethresh {

namespace {

enum class Status : std::uint8_t { Susceptible, Latent, Infective, Removed };

enum class EventKind : std::uint8_t { Contact, LatencyEnd, NaturalRemoval, TraceArrival };

struct Event {
  double time;
  std::uint64_t seq;  // insertion order breaks time ties deterministically
  EventKind kind;
  std::int32_t who;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

class Simulation {
 public:
  Simulation(const ModelParams& params, RngStream& rng)
      : params_(params),
        rng_(rng),
        total_(params.population + params.initial_infectives),
        contact_rate_(params.lambda * static_cast<double>(total_ - 1) /
                      static_cast<double>(params.population)),
        status_(total_, Status::Susceptible),
        infectees_(total_) {
    s_count_ = total_;
    for (int i = 0; i < params.initial_infectives; ++i) {
      --s_count_;
      activate(i, 0.0);
    }
  }

  EpidemicStats run() {
    while (!events_.empty() && e_count_ + i_count_ > 0) {
      const Event ev = events_.top();
      events_.pop();
      dispatch(ev);
      if (s_count_ + e_count_ + i_count_ + r_count_ != total_) {
        throw std::logic_error("population count invariant violated");
      }
    }
    stats_.final_size = r_count_;
    return stats_;
  }

 private:
  void push(double time, EventKind kind, std::int32_t who) {
    events_.push(Event{time, seq_++, kind, who});
  }

  // Susceptible/latent individual becomes infective: draws its infectious
  // period and starts its contact stream.
  void activate(std::int32_t who, double now) {
    status_[who] = Status::Infective;
    ++i_count_;
    push(now + params_.infectious.sample(rng_), EventKind::NaturalRemoval, who);
    if (contact_rate_ > 0.0) {
      push(now + rng_.exponential(contact_rate_), EventKind::Contact, who);
    }
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::Contact: {
        if (status_[ev.who] != Status::Infective) return;  // removed earlier
        std::int32_t target = static_cast<std::int32_t>(rng_.uniform_index(total_ - 1));
        if (target >= ev.who) ++target;
        if (status_[target] == Status::Susceptible) {
          status_[target] = Status::Latent;
          --s_count_;
          ++e_count_;
          infectees_[ev.who].push_back(target);
          push(ev.time + params_.latent.sample(rng_), EventKind::LatencyEnd, target);
        }
        push(ev.time + rng_.exponential(contact_rate_), EventKind::Contact, ev.who);
        return;
      }
      case EventKind::LatencyEnd: {
        if (status_[ev.who] != Status::Latent) return;  // traced while latent
        --e_count_;
        activate(ev.who, ev.time);
        return;
      }
      case EventKind::NaturalRemoval: {
        if (status_[ev.who] != Status::Infective) return;  // traced earlier
        status_[ev.who] = Status::Removed;
        --i_count_;
        ++r_count_;
        if (rng_.bernoulli(params_.pi_r)) interview(ev.who, ev.time);
        return;
      }
      case EventKind::TraceArrival: {
        if (status_[ev.who] == Status::Removed) {
          ++stats_.trace_noops;
          return;
        }
        if (status_[ev.who] == Status::Latent) {
          --e_count_;
        } else {
          --i_count_;
        }
        status_[ev.who] = Status::Removed;
        ++r_count_;
        ++stats_.traced_removals;
        if (rng_.bernoulli(params_.pi_t)) interview(ev.who, ev.time);
        return;
      }
    }
  }

  // Naming lottery over the remover's infectees; still-infected named
  // contacts get a trace arrival after the delay (one shared delay draw per
  // interview under mutual coupling).
  void interview(std::int32_t who, double now) {
    double shared_delay = -1.0;
    for (std::int32_t child : infectees_[who]) {
      if (!rng_.bernoulli(params_.p)) continue;
      if (status_[child] == Status::Removed) continue;
      double delay;
      if (params_.coupling == DelayCoupling::Mutual) {
        if (shared_delay < 0.0) shared_delay = params_.delay.sample(rng_);
        delay = shared_delay;
      } else {
        delay = params_.delay.sample(rng_);
      }
      push(now + delay, EventKind::TraceArrival, child);
    }
  }

  const ModelParams& params_;
  RngStream& rng_;
  const long total_;
  const double contact_rate_;
  std::vector<Status> status_;
  std::vector<std::vector<std::int32_t>> infectees_;
  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  std::uint64_t seq_ = 0;
  long s_count_ = 0, e_count_ = 0, i_count_ = 0, r_count_ = 0;
  EpidemicStats stats_;
};

}  // namespace

EpidemicStats run_epidemic_stats(const ModelParams& params, RngStream& rng) {
  params.validate();
  Simulation sim(params, rng);
  return sim.run();
}

long run_epidemic(const ModelParams& params, RngStream& rng) {
  return run_epidemic_stats(params, rng).final_size;
}

double FinalSizeHistogram::p_minor() const {
  if (cutoff < 0 || n == 0) return 0.0;
  std::int64_t minor = 0;
  const std::size_t limit = std::min<std::size_t>(cutoff + 1, counts.size());
  for (std::size_t k = 0; k < limit; ++k) minor += counts[k];
  return static_cast<double>(minor) / static_cast<double>(n);
}

double FinalSizeHistogram::standard_error() const {
  const double p = p_minor();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

int detect_minor_major_cutoff(const std::vector<std::int64_t>& counts, int lo, int hi) {
  const int len = hi - lo + 1;
  if (len < 3) throw DegenerateHistogram("final-size range too narrow for a cutoff");

  // Moving average, bandwidth 5 (clipped at the ends).
  std::vector<double> smooth(len);
  for (int i = 0; i < len; ++i) {
    const int from = std::max(0, i - 2);
    const int to = std::min(len - 1, i + 2);
    double acc = 0.0;
    for (int k = from; k <= to; ++k) acc += static_cast<double>(counts[lo + k]);
    smooth[i] = acc / (to - from + 1);
  }

  std::vector<double> prefix_max(len), suffix_max(len);
  prefix_max[0] = smooth[0];
  for (int i = 1; i < len; ++i) prefix_max[i] = std::max(prefix_max[i - 1], smooth[i]);
  suffix_max[len - 1] = smooth[len - 1];
  for (int i = len - 2; i >= 0; --i) suffix_max[i] = std::max(suffix_max[i + 1], smooth[i]);

  std::int64_t total = 0;
  for (int i = 0; i < len; ++i) total += counts[lo + i];
  // A valley must separate two genuine modes: at least 1% of the mass on
  // each side, so stray gaps in a ragged tail never qualify.
  const double min_side_mass = std::max<double>(1.0, 0.01 * static_cast<double>(total));

  int best = -1;
  double best_depth = 0.0;
  std::int64_t mass_left = 0;
  for (int i = 1; i + 1 < len; ++i) {
    mass_left += counts[lo + i - 1];
    if (smooth[i] > smooth[i - 1] || smooth[i] > smooth[i + 1]) continue;
    if (!(prefix_max[i - 1] > smooth[i]) || !(suffix_max[i + 1] > smooth[i])) continue;
    const double mass_right =
        static_cast<double>(total - mass_left - counts[lo + i]);
    if (static_cast<double>(mass_left) < min_side_mass || mass_right < min_side_mass) continue;
    // Depth of the valley below the lower of its two flanking peaks.
    const double depth = std::min(prefix_max[i - 1], suffix_max[i + 1]) - smooth[i];
    if (depth > best_depth || (depth == best_depth && best >= 0 && smooth[i] < smooth[best])) {
      best = i;
      best_depth = depth;
    }
  }
  if (best < 0) {
    throw DegenerateHistogram("no interior valley separates minor and major outbreaks");
  }
  return lo + best;
}

FinalSizeHistogram final_size_distribution(const ModelParams& params, std::size_t n,
                                           std::uint64_t seed,
                                           std::optional<int> cutoff_override) {
  params.validate();
  const long total = params.population + params.initial_infectives;
  std::vector<std::int32_t> sizes(n);
  parallel_for(n, [&](std::size_t i) {
    RngStream rng = RngStream::substream(seed, i);
    sizes[i] = static_cast<std::int32_t>(run_epidemic(params, rng));
  });

  FinalSizeHistogram hist;
  hist.counts.assign(total + 1, 0);
  hist.n = n;
  hist.population = params.population;
  hist.initial = params.initial_infectives;
  for (auto s : sizes) ++hist.counts[s];
  if (cutoff_override) {
    hist.cutoff = *cutoff_override;
  } else {
    hist.cutoff =
        detect_minor_major_cutoff(hist.counts, params.initial_infectives, static_cast<int>(total));
  }
  return hist;
}

std::vector<ExtinctionVsN> estimate_extinction_vs_population(
    const ModelParams& params, const std::vector<long>& populations, std::size_t n,
    std::uint64_t seed, std::optional<int> cutoff_override) {
  std::vector<ExtinctionVsN> out;
  out.reserve(populations.size());
  for (std::size_t idx = 0; idx < populations.size(); ++idx) {
    ModelParams scaled = params;
    scaled.population = populations[idx];
    const FinalSizeHistogram hist =
        final_size_distribution(scaled, n, splitmix64(seed) + idx, cutoff_override);
    out.push_back({populations[idx], hist.p_minor(), hist.standard_error(), hist.cutoff});
  }
  return out;
}

}  // namespace tracethresh
