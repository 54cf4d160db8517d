#include "laborflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "laborflow/community.hpp"

namespace laborflow {

std::optional<std::size_t> find_occupation(const std::vector<Occupation>& occupations,
                                           std::string_view code) {
  auto it = std::lower_bound(occupations.begin(), occupations.end(), code,
                             [](const Occupation& o, std::string_view c) {
                               return o.code < c;
                             });
  if (it == occupations.end() || it->code != code) return std::nullopt;
  return static_cast<std::size_t>(it - occupations.begin());
}

std::int64_t FlowCounts::out_total(std::size_t j) const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += counts(i, j);
  return s;
}

std::int64_t FlowCounts::in_total(std::size_t i) const {
  std::int64_t s = 0;
  for (std::size_t j = 0; j < size(); ++j) s += counts(i, j);
  return s;
}

std::int64_t FlowCounts::total() const {
  std::int64_t s = 0;
  for (std::int64_t v : counts.data()) s += v;
  return s;
}

namespace {

[[noreturn]] void reject(std::size_t row_1based, const std::string& why) {
  throw InputError("row " + std::to_string(row_1based) + ": " + why);
}

void validate_record(const FlowRecord& r, std::size_t row) {
  if (r.origin.empty() || r.destination.empty()) reject(row, "empty occupation code");
  if (r.count < 0) reject(row, "negative count");
  if (r.origin == kExitCode) reject(row, "EXIT cannot be an origin");
  if (r.destination == kEntryCode) reject(row, "ENTRY cannot be a destination");
  if (r.origin == kEntryCode && r.destination == kExitCode)
    reject(row, "ENTRY->EXIT flow is not representable");
}

FlowCounts empty_counts(const std::vector<Occupation>& occupations) {
  FlowCounts fc;
  fc.occupations = occupations;
  fc.counts = CountGrid(occupations.size(), occupations.size(), 0);
  fc.entry_counts.assign(occupations.size(), 0);
  fc.exit_counts.assign(occupations.size(), 0);
  return fc;
}

void add_record(FlowCounts& fc, const FlowRecord& r) {
  if (r.origin == kEntryCode) {
    fc.entry_counts[*fc.index_of(r.destination)] += r.count;
  } else if (r.destination == kExitCode) {
    fc.exit_counts[*fc.index_of(r.origin)] += r.count;
  } else {
    fc.counts(*fc.index_of(r.destination), *fc.index_of(r.origin)) += r.count;
  }
}

}  // namespace

FlowCounts ingest_counts(const std::vector<FlowRecord>& rows) {
  std::set<std::string> codes;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    validate_record(rows[k], k + 1);
    if (!is_sentinel(rows[k].origin)) codes.insert(rows[k].origin);
    if (!is_sentinel(rows[k].destination)) codes.insert(rows[k].destination);
  }
  std::vector<Occupation> occupations;
  occupations.reserve(codes.size());
  for (const auto& c : codes) occupations.push_back({c, ""});

  FlowCounts fc = empty_counts(occupations);
  std::set<std::string> groups;
  for (const auto& r : rows)
    if (!r.group.empty()) groups.insert(r.group);
  for (const auto& g : groups) fc.tags.emplace(g, empty_counts(occupations));

  for (const auto& r : rows) {
    add_record(fc, r);
    if (!r.group.empty()) add_record(fc.tags.at(r.group), r);
  }
  return fc;
}

TransitionMatrix build_transition_matrix(const FlowCounts& counts, double theta) {
  if (counts.size() == 0) throw InputError("empty occupation set");
  if (!counts.counts.square()) throw InputError("count matrix is not square");
  if (!(theta >= 0.0 && theta < 1.0)) throw InputError("theta must lie in [0,1)");

  const std::size_t n = counts.size();
  TransitionMatrix tm;
  tm.occupations = counts.occupations;
  tm.probs = Matrix(n, n, 0.0);
  tm.theta = theta;
  tm.self_loops = SelfLoops::included;

  for (std::size_t j = 0; j < n; ++j) {
    const double out = static_cast<double>(counts.out_total(j));
    const double cutoff = theta * out;
    double kept = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = static_cast<double>(counts.counts(i, j));
      if (c > 0 && c >= cutoff) kept += c;
    }
    if (kept <= 0.0) {
      // No surviving outflow: make the origin absorbing.
      tm.probs(j, j) = 1.0;
      tm.dangling.push_back(counts.occupations[j].code);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double c = static_cast<double>(counts.counts(i, j));
      if (c > 0 && c >= cutoff) tm.probs(i, j) = c / kept;
    }
  }
  return tm;
}

TransitionMatrix strip_self_loops(const TransitionMatrix& P) {
  TransitionMatrix out = P;
  out.self_loops = SelfLoops::excluded;
  out.degenerate.clear();
  const std::size_t n = P.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (P.probs(j, j) == 0.0) {
      // No mass removed: leave the column bit-identical.
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += out.probs(i, j);
      if (s <= 0.0 && P.self_loops == SelfLoops::excluded &&
          std::find(P.degenerate.begin(), P.degenerate.end(),
                    P.occupations[j].code) != P.degenerate.end())
        out.degenerate.push_back(P.occupations[j].code);
      continue;
    }
    out.probs(j, j) = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += out.probs(i, j);
    if (s <= 0.0) {
      out.degenerate.push_back(P.occupations[j].code);  // pure self-loop column
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) out.probs(i, j) /= s;
  }
  return out;
}

std::vector<EntryExitShare> entry_exit_shares(const FlowCounts& counts,
                                              const CommunityAssignment& communities) {
  if (communities.occupations != counts.occupations)
    throw InputError("community assignment does not cover the occupation set");

  const std::size_t n = counts.size();
  const int c = communities.n_communities;
  std::vector<std::int64_t> entries(c, 0), exits(c, 0);
  std::vector<std::int64_t> arrivals(c, 0), departures(c, 0);

  for (std::size_t i = 0; i < n; ++i) {
    const int ci = communities.membership[i];
    entries[ci] += counts.entry_counts[i];
    exits[ci] += counts.exit_counts[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;  // stayers are not transitions
      arrivals[ci] += counts.counts(i, j);
      departures[communities.membership[j]] += counts.counts(i, j);
    }
  }

  std::vector<EntryExitShare> shares(c);
  for (int k = 0; k < c; ++k) {
    const std::int64_t in_total = entries[k] + arrivals[k];
    const std::int64_t out_total = exits[k] + departures[k];
    if (in_total > 0)
      shares[k].inflow_from_outside =
          static_cast<double>(entries[k]) / static_cast<double>(in_total);
    if (out_total > 0)
      shares[k].outflow_to_outside =
          static_cast<double>(exits[k]) / static_cast<double>(out_total);
  }
  return shares;
}

StabilityCoefficients temporal_stability(
    const std::map<std::string, TransitionMatrix>& by_year,
    const std::string& base_year) {
  auto base_it = by_year.find(base_year);
  if (base_it == by_year.end())
    throw InputError("base year '" + base_year + "' not present");
  const TransitionMatrix& base = base_it->second;
  for (const auto& [year, tm] : by_year)
    if (tm.occupations != base.occupations)
      throw InputError("year '" + year + "' has a different occupation set");

  const std::size_t n = base.size();
  StabilityCoefficients sc;
  sc.occupations = base.occupations;
  for (const auto& [year, tm] : by_year)
    if (year != base_year) sc.years.push_back(year);

  for (const auto& year : sc.years) {
    const TransitionMatrix& tm = by_year.at(year);
    std::vector<std::optional<StabilityCell>> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      std::size_t m = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double x = base.probs(i, j);
        const double y = tm.probs(i, j);
        if (x == 0.0 && y == 0.0) continue;  // no link in either year
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
      }
      if (m < 2) {
        sc.skipped.emplace_back(year, base.occupations[i].code);
        continue;
      }
      const double dm = static_cast<double>(m);
      const double var = sxx - sx * sx / dm;
      if (var <= 0.0) {
        sc.skipped.emplace_back(year, base.occupations[i].code);
        continue;
      }
      StabilityCell cell;
      cell.beta = (sxy - sx * sy / dm) / var;
      cell.alpha = (sy - cell.beta * sx) / dm;
      cell.n_points = m;
      row[i] = cell;
    }
    sc.cells.push_back(std::move(row));
  }
  return sc;
}

}  // namespace laborflow
